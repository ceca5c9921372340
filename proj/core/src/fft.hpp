#pragma once

#include <complex>
#include <span>

#include "schatten/torus.hpp"

namespace schatten::detail {

/// Unnormalized forward DFT over the grid (sign -1).
void fft_forward(const TorusGrid& grid, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out);

/// Inverse DFT normalized by 1/n^N, so fft_inverse(fft_forward(u)) = u.
void fft_inverse(const TorusGrid& grid, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out);

}  // namespace schatten::detail

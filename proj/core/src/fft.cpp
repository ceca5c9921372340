#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "schatten/errors.hpp"

namespace schatten::detail {
namespace {

// Planning is not thread-safe in FFTW; execution on fresh arrays is. Plans are
// created once per (shape, sign) under the lock and executed with
// fftw_execute_dft, which requires FFTW_UNALIGNED for arbitrary buffers.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dimension, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dimension, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> dims(static_cast<std::size_t>(dimension), n);
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    std::vector<fftw_complex> a(total), b(total);
    fftw_plan plan = fftw_plan_dft(dimension, dims.data(), a.data(), b.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(const TorusGrid& grid, std::span<const std::complex<double>> in,
         std::span<std::complex<double>> out, int sign) {
  if (in.size() != grid.size() || out.size() != grid.size())
    throw InvalidArgument("FFT buffer does not match the grid");
  fftw_plan plan = cache().get(grid.dimension(), grid.points_per_axis(), sign);
  // FFTW never writes to the input of an out-of-place complex transform.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  if (src == dst) {
    std::vector<std::complex<double>> tmp(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()), dst);
  } else {
    fftw_execute_dft(plan, src, dst);
  }
}

}  // namespace

void fft_forward(const TorusGrid& grid, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out) {
  run(grid, in, out, FFTW_FORWARD);
}

void fft_inverse(const TorusGrid& grid, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out) {
  run(grid, in, out, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& z : out) z *= scale;
}

}  // namespace schatten::detail

#pragma once

#include "schatten/coeff_algebra.hpp"
#include "schatten/errors.hpp"
#include "schatten/experiment.hpp"
#include "schatten/linalg.hpp"
#include "schatten/multiindex.hpp"
#include "schatten/norms.hpp"
#include "schatten/quadrature.hpp"
#include "schatten/report.hpp"
#include "schatten/schatten.hpp"
#include "schatten/torus.hpp"

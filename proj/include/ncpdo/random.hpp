#pragma once

#include <cstdint>
#include <random>

#include "ncpdo/grid.hpp"

namespace ncpdo {

using Rng = std::mt19937_64;

cplx gaussian(Rng& rng);

// Gaussian coefficients on the ball |m| <= band (band < 0: whole box minus the Nyquist planes).
OpValuedFunction random_function(const GridSpec& g, Rng& rng, double band = -1.0);

// real scalar samples, uniform in [-1,1]
std::vector<cplx> random_real_samples(const GridSpec& g, Rng& rng);

Mat random_matrix(int q, Rng& rng);
Mat random_unitary(int q, Rng& rng);

} // namespace ncpdo

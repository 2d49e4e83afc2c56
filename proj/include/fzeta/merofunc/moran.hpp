#pragma once

#include <vector>

#include "fzeta/common.hpp"

namespace fzeta::merofunc {

/// Checks 0 < r_j < 1 and Σ r_j < 1; throws InvalidRatios otherwise.
void validate_ratios(const std::vector<double>& ratios);

/// True when all ratios coincide, so the roots form one vertical lattice.
bool equal_ratios(const std::vector<double>& ratios);

/// Σ r_j^s - 1 and its derivative.
cplx moran_residual(const std::vector<double>& ratios, cplx s);
cplx moran_derivative(const std::vector<double>& ratios, cplx s);

/// Solutions of Σ r_j^s = 1 with im_lo ≤ Im s ≤ im_hi, sorted by Im then Re.
/// The real root comes from bisection; the complex ones from Newton seeded on
/// D + i·grid, deduplicated within tol. For equal ratios the exact lattice is
/// returned after checking every Newton root against it.
std::vector<cplx> moran_roots(const std::vector<double>& ratios, double im_lo, double im_hi, double tol = 1e-10);

}  // namespace fzeta::merofunc

#pragma once

#include "fzeta/geometry/tube.hpp"

namespace fzeta::geometry {

/// ∫_{A_δ} d(x,A)^{s-1} dx for A ⊂ ℝ by summation over gaps.
/// eps bounds the truncation error of infinite gap families.
cplx distance_zeta_1d(const BoundedSet& A, cplx s, double delta, double eps = 1e-13);

struct Quadrature2d {
  int resolution = 1024;          // cells per side, power of two
  bool interior_only = false;     // integrate over the open unit square only
  bool use_square_formula = false;  // carpet: exact per-square values inside [0,1]^2
  int max_depth = 30;            // digit depth for the carpet limit set
  unsigned threads = 0;          // 0: hardware concurrency
};

/// Midpoint-rule ∫_{A_δ} d(x,A)^{s-2} dx over a uniform grid on [-δ, side+δ]^2.
/// The error is estimated from the same sum at half the resolution.
Estimate<cplx> distance_zeta_2d(const BoundedSet& A, cplx s, double delta, const Quadrature2d& q = {});

/// ∫_0^δ t^{s-2}|A_t| dt for A ⊂ ℝ, integrated panel by panel between the
/// breakpoints t = g/2 of the exact tube function. Once the remaining gaps are
/// narrow their contribution is summed in closed form from the enumerator tail.
Estimate<cplx> tube_zeta_1d(const BoundedSet& A, cplx s, double delta, double tol = 1e-10,
                            std::size_t max_panels = 4'000'000);

/// ∫_0^δ t^{s-N-1}|A_t| dt from samples: trapezoid rule in log t over the
/// sampled range plus a fitted power-law tail below the smallest t.
Estimate<cplx> tube_zeta_numeric(const TubeSamples& tube, cplx s, double delta);

}  // namespace fzeta::geometry

#pragma once

#include <span>
#include <vector>

#include "fzeta/common.hpp"

namespace fzeta::numeric {

/// Hurwitz zeta ζ(z, q) = Σ_{n≥0} (q+n)^{-z} for complex z ≠ 1 and real q > 0,
/// by Euler–Maclaurin summation after shifting q past max(|z|, 20).
/// The returned error is the magnitude of the first omitted correction term.
Estimate<cplx> hurwitz_zeta(cplx z, double q);

/// Power-series arithmetic on truncated complex coefficient vectors (index = power).
std::vector<cplx> series_log1p(std::span<const cplx> e);  // log(1 + e(y)), e[0] must be 0
std::vector<cplx> series_exp(std::span<const cplx> g);    // exp(g(y)), g[0] must be 0
std::vector<cplx> series_pow1p(std::span<const cplx> e, cplx power);

/// Generalized binomial coefficient C(alpha, k) for real alpha.
double binomial(double alpha, int k);

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

/// Pairwise (cascade) summation; deterministic for a fixed input order.
double pairwise_sum(std::span<const double> values);
cplx pairwise_sum(std::span<const cplx> values);

/// λ^s = exp(s ln λ) for real λ > 0 (principal branch).
inline cplx real_pow(double base, cplx s) {
  // std::pow is exact for small integer exponents, which keeps closed forms exact at integer s
  if (s.imag() == 0.0) return std::pow(base, s.real());
  return std::exp(s * std::log(base));
}

}  // namespace fzeta::numeric

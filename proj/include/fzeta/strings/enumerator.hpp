#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fzeta/common.hpp"

namespace fzeta::strings {

/// A run of equal lengths in a fractal string.
struct LengthGroup {
  double length = 0.0;
  double multiplicity = 1.0;
};

/// Lazy, single-pass enumeration of a fractal string in nonincreasing order of length.
///
/// Implementations own all their state; a fresh enumerator is created for every
/// traversal, so concurrent callers never share one.
class LengthEnumerator {
 public:
  virtual ~LengthEnumerator() = default;

  virtual std::optional<LengthGroup> next() = 0;

  /// Upper bound on Σ m·ℓ^sigma over everything not yet returned by next().
  /// +inf when no bound is available at this sigma.
  virtual double tail_bound(double sigma) const = 0;

  /// Estimate of Σ m·ℓ^s over everything not yet returned, with an error bound.
  /// Families without an asymptotic model return zero with error tail_bound(Re s).
  virtual Estimate<cplx> tail_estimate(cplx s) const { return {cplx{0.0}, tail_bound(s.real())}; }
};

using EnumeratorFactory = std::function<std::unique_ptr<LengthEnumerator>()>;

// Building blocks. Each returns a factory so the same string can be re-enumerated.

EnumeratorFactory finite_lengths(std::vector<LengthGroup> groups);

/// Groups k = 0, 1, ...: length first·ratio^k with multiplicity exp(log_mult(k)).
/// mult(k+1)/mult(k) must be nonincreasing in k; the tail bound relies on it.
EnumeratorFactory lattice_lengths(double first, double ratio, std::function<double(long)> log_mult);

/// ℓ_j = j^{-a} - (j+1)^{-a}, j ≥ 1.
EnumeratorFactory a_string_lengths(double a);

/// All words r_{i1}·…·r_{in} (n ≥ 0) over the ratio list, counted with multiplicity.
EnumeratorFactory moran_lengths(std::vector<double> ratios);

EnumeratorFactory scaled_lengths(double c, EnumeratorFactory inner);

/// Multiset union. omitted_tail, when given, bounds the contribution of components
/// that were never built (e.g. the truncated tail of an infinite union).
EnumeratorFactory union_lengths(std::vector<EnumeratorFactory> parts,
                                std::function<double(double)> omitted_tail = {});

/// All pairwise products, best-first in descending order.
EnumeratorFactory tensor_lengths(EnumeratorFactory left, EnumeratorFactory right);

/// Σ_{j>J} ℓ_j^s for the a-string via the large-j expansion of ℓ_j^s in Hurwitz zeta values.
Estimate<cplx> a_string_tail(double a, cplx s, long J);

}  // namespace fzeta::strings

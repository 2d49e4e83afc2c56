#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "fzeta/strings/enumerator.hpp"
#include "fzeta/strings/spec.hpp"

namespace fzeta::strings {

/// An immutable fractal string: a recipe for fresh length enumerators plus
/// whatever is known about it analytically.
class FractalString {
 public:
  FractalString(EnumeratorFactory factory, std::optional<double> total_length_hint,
                std::optional<double> analytic_abscissa, std::string description, bool finite = false);

  std::unique_ptr<LengthEnumerator> enumerate() const { return factory_(); }
  const EnumeratorFactory& factory() const { return factory_; }

  std::optional<double> total_length_hint() const { return total_length_hint_; }
  std::optional<double> analytic_abscissa() const { return analytic_abscissa_; }
  const std::string& description() const { return description_; }
  bool finite() const { return finite_; }

  /// Bound on Σ m·ℓ^sigma over the groups after the first `level` groups.
  double tail_bound(std::size_t level, double sigma = 1.0) const;

  /// First `count` groups (fewer if the string is finite).
  std::vector<LengthGroup> groups(std::size_t count) const;

 private:
  EnumeratorFactory factory_;
  std::optional<double> total_length_hint_;
  std::optional<double> analytic_abscissa_;
  std::string description_;
  bool finite_ = false;
};

FractalString build(const StringSpec& spec);

/// Unique real solution of Σ r_j^D = 1 (bisection).
double moran_dimension(const std::vector<double>& ratios);

/// Σ ℓ_j to within eps.
double total_length(const FractalString& L, double eps = 1e-12);

struct PartialSum {
  cplx value;
  double error = 0.0;       // bound on |ζ_L(s) − value|
  std::size_t groups = 0;   // groups enumerated
};

/// ζ_L(s) = Σ ℓ_j^s with a truncation remainder ≤ eps (absolute).
PartialSum geometric_zeta_partial(const FractalString& L, cplx s, double eps = 1e-12,
                                  std::size_t max_groups = std::size_t{1} << 24);

struct AbscissaEstimate {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool analytic = false;
};

/// Analytic abscissa of convergence when the construction has one, otherwise a
/// least-squares fit of log ℓ_j against log j over the last decade of indices.
AbscissaEstimate abscissa_estimate(const FractalString& L, std::size_t max_groups = 200000);

/// Meromorphic continuation of the a-string zeta: Σ_{j≤J} ℓ_j^s plus the Hurwitz
/// expansion of the remainder. Valid on ℂ away from s = (1-k)/(a+1), k ≥ 0.
Estimate<cplx> a_string_zeta(double a, cplx s, long J = 1000);

}  // namespace fzeta::strings

#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "fzeta/geometry/tube.hpp"
#include "fzeta/merofunc/closed_zeta.hpp"

namespace fzeta::analysis {

enum class Branch { Measurable, Periodic };

struct MinkowskiFit {
  double D = 0.0;
  std::optional<double> M;  // measurable branch only
  double M_average = 0.0;   // mean of the detrended profile over the final decade
  double M_lower = 0.0;
  double M_upper = 0.0;
  std::optional<double> alpha;   // second-order exponent, measurable branch
  std::optional<double> period;  // periodic branch, in units of log t
  Branch branch = Branch::Measurable;
  double residual = 0.0;  // RMS of the relative (measurable) or log (periodic) residuals
  double variation = 0.0;  // coefficient of variation that chose the branch
};

struct FitOptions {
  std::optional<double> period;  // known minimal period T; estimated when absent
  int harmonics = 8;             // Fourier columns in the periodic regression
  double cv_threshold = 1e-3;
};

/// Fits |A_t| = t^{N-D}(M + c t^α) or t^{N-D} G(log 1/t) with G periodic.
MinkowskiFit fit_minkowski(const geometry::TubeSamples& tube, const FitOptions& opt = {});

/// Advisory period estimate: the strongest periodogram peak of the detrended log tube.
double estimate_period(const geometry::TubeSamples& tube, double D);

struct PeriodicProfile {
  double T = 0.0;
  std::vector<double> tau_grid;  // uniform on [0, T)
  std::vector<double> G_values;
  std::vector<cplx> fourier;     // Ĝ₀(k/T) for k = -k_max..k_max, index k + k_max
  int k_max = 0;
  double spread = 0.0;           // largest relative disagreement between folded periods
  bool nonconstant = true;
  bool exact = true;             // built from exact tube samples

  cplx coefficient(int k) const { return fourier.at(static_cast<std::size_t>(k + k_max)); }
};

/// Folds t^{D-N}|A_t| onto τ = log(1/t) mod T. Throws PeriodMismatch when
/// folded periods disagree by more than fold_tol (relative).
PeriodicProfile extract_G(const geometry::TubeSamples& tube, double D, double T, int grid = 4096, int k_max = 64,
                          double fold_tol = 1e-3);

/// Residues (1/T)Ĝ₀(k/T) of the tube zeta at s_k = D + 2πik/T for |k| ≤ k_max above the noise floor.
std::vector<merofunc::PoleRecord> fourier_residues(const PeriodicProfile& profile, double D, int k_max);

/// res(ζ_A, ω) = (N - ω) res(ζ̃_A, ω).
std::vector<merofunc::PoleRecord> distance_residues_from_tube(const std::vector<merofunc::PoleRecord>& records, int N);

nlohmann::json fit_to_json(const MinkowskiFit& fit);
nlohmann::json profile_to_json(const PeriodicProfile& p);

}  // namespace fzeta::analysis

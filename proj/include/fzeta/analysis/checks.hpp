#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fzeta/analysis/minkowski.hpp"
#include "fzeta/geometry/bounded_set.hpp"

namespace fzeta::analysis {

struct Report {
  std::string check;
  nlohmann::json inputs;
  std::vector<double> defects;
  bool pass = false;
  nlohmann::json details;  // per-point values, optional
};

nlohmann::json report_to_json(const Report& r);

/// Per-s defect |ζ_A(s) - δ^{s-N}|A_δ| - (N-s)ζ̃_A(s)|, evaluated in parallel over s.
Report verify_functional_equation(const geometry::BoundedSet& A, const std::vector<cplx>& s_list, double delta,
                                  double tol);

/// Sandwich (N-D)M_lower ≤ res(ζ_A, D) ≤ (N-D)M_upper: strict on the periodic
/// branch, within relative slack tol (and against (N-D)M) on the measurable one.
Report verify_residue_content(const MinkowskiFit& fit, const std::vector<merofunc::PoleRecord>& records, int N,
                              double tol);

/// Solutions of the Moran equation Σ r_j^s = 1 in the strip im_lo ≤ Im s ≤ im_hi.
std::vector<cplx> moran_roots(const std::vector<double>& ratios, double im_lo, double im_hi, double tol = 1e-10);

/// Largest gap between consecutive points of ∪_{k≤K} p_k ℤ ∩ [0, window], p_k = 2πD/log m_k.
double hyperfractal_density(double D, const std::vector<long>& m_seq, int K, double window);

}  // namespace fzeta::analysis

#include "fzeta/analysis/checks.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "fzeta/geometry/tube.hpp"
#include "fzeta/geometry/zeta.hpp"
#include "fzeta/merofunc/moran.hpp"

namespace fzeta::analysis {

using nlohmann::json;

json report_to_json(const Report& r) {
  json j = {{"check", r.check}, {"inputs", r.inputs}, {"defects", r.defects}, {"pass", r.pass}};
  if (!r.details.is_null()) j["details"] = r.details;
  return j;
}

namespace {

struct Point {
  double defect = 0.0;
  cplx lhs, rhs;
};

Point functional_equation_at(const geometry::BoundedSet& A, cplx s, double delta,
                             const geometry::TubeSamples* tube) {
  const int N = A.ambient_dim();
  // At s = N the tube term drops out and the distance integrand is identically one.
  if (s == cplx{static_cast<double>(N)}) return {};
  const double vol = geometry::tube_volume(A, delta);
  cplx lhs, tube_zeta;
  if (N == 1) {
    lhs = geometry::distance_zeta_1d(A, s, delta);
    tube_zeta = geometry::tube_zeta_1d(A, s, delta).value;
  } else {
    lhs = geometry::distance_zeta_2d(A, s, delta).value;
    tube_zeta = geometry::tube_zeta_numeric(*tube, s, delta).value;
  }
  const cplx rhs = std::exp((s - static_cast<double>(N)) * std::log(delta)) * vol + (static_cast<double>(N) - s) * tube_zeta;
  return {std::abs(lhs - rhs), lhs, rhs};
}

}  // namespace

Report verify_functional_equation(const geometry::BoundedSet& A, const std::vector<cplx>& s_list, double delta,
                                  double tol) {
  if (!(delta > 0.0) || !(tol > 0.0)) throw Error(ErrorCode::InvalidParameters, "delta and tol must be positive");
  Report r;
  r.check = "functional-equation";
  json points = json::array();
  for (cplx s : s_list) points.push_back({s.real(), s.imag()});
  r.inputs = {{"set", A.describe()}, {"delta", delta}, {"tol", tol}, {"s", points}};

  std::optional<geometry::TubeSamples> tube;
  if (A.ambient_dim() == 2) tube = geometry::sample_tube(A, delta * 1e-4, delta, 32);

  std::vector<std::future<Point>> jobs;
  for (cplx s : s_list)
    jobs.push_back(std::async(std::launch::async, functional_equation_at, std::cref(A), s, delta,
                              tube ? &*tube : nullptr));
  r.pass = true;
  r.details = json::array();
  for (auto& job : jobs) {
    const Point p = job.get();
    r.defects.push_back(p.defect);
    r.pass = r.pass && p.defect < tol;
    r.details.push_back({{"distance_zeta", {p.lhs.real(), p.lhs.imag()}}, {"rearranged", {p.rhs.real(), p.rhs.imag()}}});
  }
  return r;
}

Report verify_residue_content(const MinkowskiFit& fit, const std::vector<merofunc::PoleRecord>& records, int N,
                              double tol) {
  const merofunc::PoleRecord* principal = nullptr;
  for (const auto& rec : records) {
    if (rec.essential || std::abs(rec.location.imag()) > 1e-9) continue;
    if (std::abs(rec.location.real() - fit.D) > 0.05) continue;
    if (!principal || std::abs(rec.location.real() - fit.D) < std::abs(principal->location.real() - fit.D))
      principal = &rec;
  }
  if (!principal) throw Error(ErrorCode::MissingPrincipalPole, "no real pole near the fitted dimension");

  const double res = principal->residue.real();
  const double w = N - fit.D;
  const double lo = w * fit.M_lower, hi = w * fit.M_upper;
  Report r;
  r.check = "residue-content";
  r.inputs = {{"fit", fit_to_json(fit)}, {"N", N}, {"tol", tol}};
  r.details = {{"pole", principal->location.real()}, {"residue", res}, {"lower", lo}, {"upper", hi}};
  if (fit.branch == Branch::Periodic) {
    r.defects = {std::max(0.0, lo - res), std::max(0.0, res - hi)};
    r.pass = lo < res && res < hi;
  } else {
    const double target = w * fit.M.value_or(fit.M_average);
    const double rel = std::abs(res - target) / std::abs(target);
    r.defects = {rel};
    r.details["expected"] = target;
    r.pass = rel <= tol && res >= lo * (1.0 - tol) && res <= hi * (1.0 + tol);
  }
  return r;
}

std::vector<cplx> moran_roots(const std::vector<double>& ratios, double im_lo, double im_hi, double tol) {
  return merofunc::moran_roots(ratios, im_lo, im_hi, tol);
}

double hyperfractal_density(double D, const std::vector<long>& m_seq, int K, double window) {
  if (!(D > 0.0) || !(window > 0.0) || K < 1 || static_cast<std::size_t>(K) > m_seq.size())
    throw Error(ErrorCode::InvalidParameters, "need D > 0, window > 0 and 1 <= K <= len(m)");
  for (std::size_t i = 0; i < m_seq.size(); ++i)
    if (m_seq[i] < 2 || (i > 0 && m_seq[i] <= m_seq[i - 1]))
      throw Error(ErrorCode::InvalidParameters, "m sequence must be strictly increasing from at least 2");

  std::vector<double> pts{0.0};
  for (int k = 0; k < K; ++k) {
    const double p = 2.0 * kPi * D / std::log(static_cast<double>(m_seq[static_cast<std::size_t>(k)]));
    for (long j = 1; j * p <= window; ++j) pts.push_back(static_cast<double>(j) * p);
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 2) throw Error(ErrorCode::EmptyUnion, "no nonzero lattice point inside the window");
  double gap = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) gap = std::max(gap, pts[i] - pts[i - 1]);
  return gap;
}

}  // namespace fzeta::analysis

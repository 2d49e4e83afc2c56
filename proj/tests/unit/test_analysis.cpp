#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fzeta/analysis/checks.hpp"
#include "fzeta/geometry/tube.hpp"
#include "fzeta/merofunc/contour.hpp"
#include "fzeta/strings/fractal_string.hpp"

using namespace fzeta;
using namespace fzeta::analysis;
using namespace fzeta::geometry;

namespace {

const double kT = std::log(3.0);
const double kD = std::log(2.0) / kT;

// t^{D-1}|C_t| as a function of τ = log(1/t): with x the fractional part of
// (τ - log 2)/log 3, the tube holds 2^n intervals plus 2^n gaps of width 2t.
double cantor_G(double tau) {
  const double x = (tau - std::log(2.0)) / kT;
  const double fr = x - std::floor(x);
  return std::pow(2.0, 1.0 - kD) * (std::pow(2.0, -fr) + std::pow(1.5, fr));
}

std::pair<double, double> cantor_G_range() {
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double g = cantor_G(std::log(2.0) + kT * i / 200000.0);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  return {lo, hi};
}

cplx tube_residue(cplx s) { return std::exp(-s * std::log(2.0)) / (kT * s * (1.0 - s)); }

const TubeSamples& cantor_tube() {
  static const TubeSamples tube = sample_tube([](double t) { return cantor_tube_exact(t); }, 1, 1e-9, 0.49, 2000);
  return tube;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidSpec;
}

BoundedSet a_string_set() { return string_set(strings::build(*strings::make_spec(strings::AString{1.0}))); }

}  // namespace

TEST_CASE("Cantor tube fit lands on the periodic branch") {
  const auto [lo, hi] = cantor_G_range();
  const auto fit = fit_minkowski(cantor_tube());
  CHECK(fit.branch == Branch::Periodic);
  CHECK(fit.D == doctest::Approx(kD).epsilon(1e-6));
  CHECK(fit.M_lower == doctest::Approx(lo).epsilon(0.01));
  CHECK(fit.M_upper == doctest::Approx(hi).epsilon(0.01));
  CHECK_FALSE(fit.M.has_value());
  REQUIRE(fit.period.has_value());
  CHECK(*fit.period == doctest::Approx(kT).epsilon(1e-3));

  FitOptions known;
  known.period = kT;
  CHECK(fit_minkowski(cantor_tube(), known).D == doctest::Approx(kD).epsilon(1e-6));
  CHECK(estimate_period(cantor_tube(), kD) == doctest::Approx(kT).epsilon(1e-3));
}

TEST_CASE("measurable fits") {
  // a-string: the tube is 2√2 t^{1/2} to leading order
  const auto af = fit_minkowski(sample_tube(a_string_set(), 1e-8, 0.1, 40));
  CHECK(af.branch == Branch::Measurable);
  CHECK(af.D == doctest::Approx(0.5).epsilon(1e-3));
  REQUIRE(af.M.has_value());
  CHECK(*af.M == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-3));

  const auto pf = fit_minkowski(sample_tube([](double t) { return 3.0 * t; }, 1, 1e-6, 1.0, 20));
  CHECK(std::abs(pf.D) < 1e-9);
  CHECK(pf.M.value_or(0.0) == doctest::Approx(3.0).epsilon(1e-9));

  CHECK(code_of([] { fit_minkowski(sample_tube([](double t) { return t; }, 1, 1e-2, 0.1, 10)); }) ==
        ErrorCode::InsufficientSamples);
  CHECK(code_of([] { fit_minkowski(sample_tube([](double t) { return t * t * t; }, 1, 1e-6, 0.1, 20)); }) ==
        ErrorCode::DegenerateFit);
}

TEST_CASE("periodic profile of the Cantor set") {
  const auto dense = sample_tube([](double t) { return cantor_tube_exact(t); }, 1, 1e-12, 0.49, 20000);
  const auto prof = extract_G(dense, kD, kT);
  double worst = 0.0;
  for (std::size_t j = 0; j < prof.tau_grid.size(); ++j)
    worst = std::max(worst, std::abs(prof.G_values[j] - cantor_G(prof.tau_grid[j])));
  CHECK(worst < 1e-6);
  CHECK(prof.nonconstant);
  CHECK(prof.spread < 1e-3);

  const auto flat = extract_G(sample_tube([](double t) { return 3.0 * t; }, 1, 1e-6, 1.0, 50), 0.0, 1.0);
  CHECK_FALSE(flat.nonconstant);
  CHECK(fourier_residues(flat, 0.0, 5).size() == 1);

  CHECK(code_of([] { extract_G(cantor_tube(), kD, 1.2 * kT); }) == ErrorCode::PeriodMismatch);
  CHECK(code_of([] { extract_G(sample_tube([](double t) { return cantor_tube_exact(t); }, 1, 0.1, 0.49, 50), kD, kT); }) ==
        ErrorCode::InsufficientSamples);
}

TEST_CASE("Fourier residues of the Cantor tube zeta") {
  const auto prof = extract_G(cantor_tube(), kD, kT);
  const auto res = fourier_residues(prof, kD, 5);
  REQUIRE(res.size() == 11);
  for (const auto& r : res) {
    CHECK(r.location.real() == doctest::Approx(kD));
    CHECK(std::abs(r.residue - tube_residue(r.location)) / std::abs(tube_residue(r.location)) < 1e-5);
    CHECK(r.provenance == merofunc::Provenance::NumericContour);
  }
  // distance residues carry the extra factor (1 - ω)
  for (const auto& r : distance_residues_from_tube(res, 1)) {
    const cplx w = r.location;
    const cplx expected = std::exp(-w * std::log(2.0)) / (kT * w);
    CHECK(std::abs(r.residue - expected) / std::abs(expected) < 1e-5);
  }
}

TEST_CASE("Moran roots as analysis entry point") {
  const auto roots = moran_roots({1.0 / 3.0, 1.0 / 3.0}, -20.0, 20.0);
  REQUIRE(roots.size() == 7);
  for (std::size_t i = 0; i < roots.size(); ++i)
    CHECK(std::abs(roots[i] - cplx{kD, (static_cast<int>(i) - 3) * 2.0 * kPi / kT}) < 1e-10);
  const auto q = moran_roots({0.25, 0.25}, -1.0, 1.0);
  REQUIRE(q.size() == 1);
  CHECK(std::abs(q[0] - 0.5) < 1e-10);
  const auto h = moran_roots({0.5}, -1.0, 1.0);
  REQUIRE(h.size() == 1);
  CHECK(std::abs(h[0]) < 1e-12);
}

TEST_CASE("hyperfractal lattice gaps") {
  std::vector<long> m;
  for (long k = 2; k <= 101; ++k) m.push_back(k);
  const double p1 = kPi / std::log(2.0), p2 = kPi / std::log(3.0);
  CHECK(hyperfractal_density(0.5, m, 1, 10.0) == doctest::Approx(p1));
  // union {0, p2, p1, 2p2, 3p2, 2p1}: the widest step is p2
  CHECK(hyperfractal_density(0.5, m, 2, 10.0) == doctest::Approx(p2));
  CHECK(code_of([&] { hyperfractal_density(0.5, m, 1, 1.0); }) == ErrorCode::EmptyUnion);
  CHECK(code_of([&] { hyperfractal_density(-0.5, m, 1, 10.0); }) == ErrorCode::InvalidParameters);
  CHECK(code_of([&] { hyperfractal_density(0.5, {3, 2}, 2, 10.0); }) == ErrorCode::InvalidParameters);
  CHECK(code_of([&] { hyperfractal_density(0.5, m, 101, 10.0); }) == ErrorCode::InvalidParameters);
}

TEST_CASE("functional equation reports") {
  std::vector<cplx> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({0.76 + 0.12 * i, -3.0 + 0.6 * i});
  const auto rc = verify_functional_equation(cantor_set(), pts, 0.5, 1e-6);
  CHECK(rc.pass);
  REQUIRE(rc.defects.size() == 10);
  for (double d : rc.defects) CHECK(d < 1e-9);
  CHECK(report_to_json(rc)["check"] == "functional-equation");

  CHECK(verify_functional_equation(a_string_set(), {cplx{0.7, 1.0}, cplx{1.4, -2.0}}, 0.5, 1e-6).pass);
  CHECK(verify_functional_equation(cantor_set(), {cplx{1.0}}, 0.5, 1e-6).defects[0] == 0.0);
  CHECK(code_of([] { verify_functional_equation(cantor_set(), {cplx{1.0}}, -0.5, 1e-6); }) ==
        ErrorCode::InvalidParameters);
}

TEST_CASE("residue content on both branches") {
  FitOptions known;
  known.period = kT;
  const auto fit = fit_minkowski(cantor_tube(), known);
  const auto res = distance_residues_from_tube(fourier_residues(extract_G(cantor_tube(), kD, kT), kD, 2), 1);
  CHECK(verify_residue_content(fit, res, 1, 0.0).pass);

  auto moved = res;
  for (auto& r : moved) r.residue *= 1.2;
  CHECK_FALSE(verify_residue_content(fit, moved, 1, 0.0).pass);

  const auto af = fit_minkowski(sample_tube(a_string_set(), 1e-8, 0.1, 40));
  merofunc::PoleRecord pole;
  pole.location = 0.5;
  pole.residue = std::sqrt(2.0);  // (1 - 1/2) 2√2
  CHECK(verify_residue_content(af, {pole}, 1, 0.02).pass);
  pole.residue = 1.0;
  CHECK_FALSE(verify_residue_content(af, {pole}, 1, 0.02).pass);

  pole.location = {0.5, 3.0};
  CHECK(code_of([&] { verify_residue_content(af, {pole}, 1, 0.02); }) == ErrorCode::MissingPrincipalPole);
}

// ---- properties --------------------------------------------------------------

TEST_CASE("Fourier coefficients of a real profile") {
  const auto prof = extract_G(cantor_tube(), kD, kT, 4096, 50);
  const cplx mean = prof.coefficient(0);
  CHECK(std::abs(mean.imag()) < 1e-15);
  for (int k = 1; k <= 50; ++k) {
    CHECK(std::abs(prof.coefficient(-k) - std::conj(prof.coefficient(k))) < 1e-12);
    CHECK(std::abs(prof.coefficient(k)) <= mean.real());  // G > 0
  }
}

TEST_CASE("Cantor residues decay like k^-2") {
  const auto prof = extract_G(cantor_tube(), kD, kT, 4096, 50);
  const auto res = fourier_residues(prof, kD, 50);
  std::vector<double> mag(51, 0.0);
  for (const auto& r : res) {
    const int k = static_cast<int>(std::lround(r.location.imag() * kT / (2.0 * kPi)));
    if (k >= 0) mag[static_cast<std::size_t>(k)] = std::abs(r.residue);
  }
  // least-squares slope of log|res_k| against log k
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = 20;
  for (int k = 1; k <= n; ++k) {
    const double x = std::log(k), y = std::log(mag[static_cast<std::size_t>(k)]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-2.0).epsilon(0.05));
  // running maximum from the right is nonincreasing
  double envelope = 0.0;
  for (int k = 50; k >= 1; --k) {
    envelope = std::max(envelope, mag[static_cast<std::size_t>(k)]);
    CHECK(mag[static_cast<std::size_t>(k)] <= envelope);
  }
  // distance residues grow slower than k
  for (const auto& r : distance_residues_from_tube(res, 1))
    if (std::abs(r.location.imag()) * kT / (2.0 * kPi) > 49.5) CHECK(std::abs(r.residue) / 50.0 < 0.01);
}

TEST_CASE("Moran lattices for equal ratios") {
  for (double r : {0.1, 0.2, 0.3, 0.45}) {
    for (int m : {2, 3}) {
      if (m * r >= 1.0) continue;
      const double D = std::log(m) / std::log(1.0 / r), p = 2.0 * kPi / std::log(1.0 / r);
      const auto roots = moran_roots(std::vector<double>(static_cast<std::size_t>(m), r), -2.5 * p, 2.5 * p);
      REQUIRE(roots.size() == 5);
      for (std::size_t i = 0; i < roots.size(); ++i)
        CHECK(std::abs(roots[i] - cplx{D, (static_cast<int>(i) - 2) * p}) < 1e-10);
    }
  }
}

TEST_CASE("synthetic measurable tubes recover D and M") {
  struct Correction {
    double M, alpha, c;
  };
  for (double D : {0.25, 0.5, 0.8}) {
    for (const auto& [M, alpha, c] : {Correction{1.0, 0.5, 1.0}, Correction{2.5, 1.0, -0.5}, Correction{4.0, 0.25, 0.3}}) {
      const auto tube =
          sample_tube([=](double t) { return std::pow(t, 1.0 - D) * (M + c * std::pow(t, alpha)); }, 1, 1e-9, 0.1, 40);
      const auto fit = fit_minkowski(tube);
      CAPTURE(D);
      CAPTURE(M);
      CHECK(fit.branch == Branch::Measurable);
      CHECK(std::abs(fit.D - D) < 1e-3);
      CHECK(std::abs(fit.M.value_or(0.0) - M) / M < 1e-2);
    }
  }
}

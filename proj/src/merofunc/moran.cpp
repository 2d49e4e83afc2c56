#include "fzeta/merofunc/moran.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "fzeta/numeric/special.hpp"
#include "fzeta/strings/fractal_string.hpp"

namespace fzeta::merofunc {

void validate_ratios(const std::vector<double>& ratios) {
  if (ratios.empty()) throw Error(ErrorCode::InvalidRatios, "empty ratio list");
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidRatios, "scaling ratios must lie in (0, 1)");
    sum += r;
  }
  if (!(sum < 1.0)) throw Error(ErrorCode::InvalidRatios, "scaling ratios must sum to less than 1");
}

bool equal_ratios(const std::vector<double>& ratios) {
  return std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r == ratios.front(); });
}

cplx moran_residual(const std::vector<double>& ratios, cplx s) {
  cplx acc = -1.0;
  for (double r : ratios) acc += numeric::real_pow(r, s);
  return acc;
}

cplx moran_derivative(const std::vector<double>& ratios, cplx s) {
  cplx acc = 0.0;
  for (double r : ratios) acc += std::log(r) * numeric::real_pow(r, s);
  return acc;
}

namespace {

std::optional<cplx> newton(const std::vector<double>& ratios, cplx s, double tol) {
  for (int it = 0; it < 100; ++it) {
    const cplx d = moran_derivative(ratios, s);
    if (d == cplx{0.0}) return std::nullopt;
    const cplx step = moran_residual(ratios, s) / d;
    s -= step;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || std::abs(s) > 1e8) return std::nullopt;
    if (std::abs(step) <= 1e-3 * tol * (1.0 + std::abs(s))) return s;
  }
  return std::abs(moran_residual(ratios, s)) < tol ? std::optional<cplx>(s) : std::nullopt;
}

void sort_roots(std::vector<cplx>& roots) {
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
}

}  // namespace

std::vector<cplx> moran_roots(const std::vector<double>& ratios, double im_lo, double im_hi, double tol) {
  validate_ratios(ratios);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParameters, "tolerance must be positive");
  if (!(im_lo <= im_hi)) throw Error(ErrorCode::InvalidParameters, "empty imaginary range");
  const double D = strings::moran_dimension(ratios);

  double log_max = 0.0;
  for (double r : ratios) log_max = std::max(log_max, -std::log(r));
  // roots of an equal-ratio equation are 2π/log(1/r) apart; seed four times denser
  const double step = 0.5 * kPi / log_max;
  const double margin = 2.0 * step;

  std::vector<cplx> found;
  std::size_t attempts = 0, failures = 0;
  cplx last_failed{};
  for (double offset : {0.0, -0.25, -0.5, -1.0}) {
    for (double y = im_lo - margin; y <= im_hi + margin; y += step) {
      ++attempts;
      const auto root = newton(ratios, {D + offset, y}, tol);
      if (!root) {
        ++failures;
        last_failed = {D + offset, y};
        continue;
      }
      if (root->imag() < im_lo - tol || root->imag() > im_hi + tol) continue;
      if (std::none_of(found.begin(), found.end(), [&](cplx f) { return std::abs(f - *root) <= tol * 10.0; }))
        found.push_back(*root);
    }
  }
  if (attempts > 0 && failures == attempts) {
    std::ostringstream msg;
    msg << "Newton diverged from every seed, e.g. " << last_failed;
    throw Error(ErrorCode::NewtonDiverged, msg.str());
  }

  if (equal_ratios(ratios)) {
    const double period = 2.0 * kPi / -std::log(ratios.front());
    for (cplx z : found) {
      const double k = std::round(z.imag() / period);
      if (std::abs(z - cplx{D, k * period}) > std::max(tol, 1e-9 * (1.0 + std::abs(z)))) {
        std::ostringstream msg;
        msg << "Newton root " << z << " is off the analytic lattice";
        throw Error(ErrorCode::NewtonDiverged, msg.str());
      }
    }
    std::vector<cplx> lattice;
    for (double k = std::ceil(im_lo / period); k * period <= im_hi; ++k) lattice.push_back({D, k * period});
    return lattice;
  }
  sort_roots(found);
  return found;
}

}  // namespace fzeta::merofunc

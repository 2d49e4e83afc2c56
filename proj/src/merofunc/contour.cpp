#include "fzeta/merofunc/contour.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace fzeta::merofunc {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx node(cplx omega, double radius, int j, int count) {
  const double theta = 2.0 * kPi * j / count;
  return omega + std::polar(radius, theta);
}

Function as_function(const ClosedZeta& Z) {
  return [&Z](cplx s) { return eval(Z, s); };
}

void check_isolated(const ClosedZeta& Z, cplx omega, double radius) {
  if (!Z.catalog) return;
  const double same = 1e-9 * (1.0 + std::abs(omega));
  auto check = [&](cplx p) {
    const double d = std::abs(p - omega);
    if (d > same && d <= radius * (1.0 + 1e-6)) {
      std::ostringstream msg;
      msg << "contour of radius " << radius << " around " << omega << " reaches the pole " << p;
      throw Error(ErrorCode::ContourCrossesPole, msg.str());
    }
  };
  for (const auto& p : Z.catalog->finite) check(p.location);
  for (const auto& f : Z.catalog->families)
    for (cplx p : f.points_in(omega.imag() - 2.0 * radius, omega.imag() + 2.0 * radius)) check(p);
}

struct Samples {
  std::vector<cplx> values;
  double max_abs = 0.0;
  double min_abs = kInf;
};

Samples sample_circle(const Function& f, cplx omega, double radius, int count) {
  Samples out;
  out.values.reserve(count);
  for (int j = 0; j < count; ++j) {
    const cplx v = f(node(omega, radius, j, count));
    if (!finite(v)) throw Error(ErrorCode::ContourCrossesPole, "function is not finite on the contour");
    out.values.push_back(v);
    out.max_abs = std::max(out.max_abs, std::abs(v));
    out.min_abs = std::min(out.min_abs, std::abs(v));
  }
  return out;
}

}  // namespace

Estimate<cplx> laurent_coeff(const Function& f, cplx omega, int n, double radius, const ContourOptions& opt) {
  if (n < 1) throw Error(ErrorCode::InvalidOrder, "Laurent index must be at least 1");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidParameters, "contour radius must be positive");
  if (opt.n_nodes < 64) throw Error(ErrorCode::InvalidParameters, "need at least 64 contour nodes");

  // c_{-n} = r^n · mean over θ of f(ω + r e^{iθ}) e^{inθ}
  const double rn = std::pow(radius, n);
  double scale = 0.0;
  auto term = [&](int j, int count) {
    const cplx v = f(node(omega, radius, j, count));
    if (!finite(v)) throw Error(ErrorCode::ContourCrossesPole, "function is not finite on the contour");
    scale = std::max(scale, std::abs(v));
    return v * std::polar(1.0, 2.0 * kPi * n * j / count);
  };

  int count = opt.n_nodes;
  cplx sum = 0.0;
  for (int j = 0; j < count; ++j) sum += term(j, count);
  cplx estimate = rn * sum / static_cast<double>(count);
  while (count < opt.max_nodes) {
    // the new nodes sit halfway between the old ones
    for (int j = 1; j < 2 * count; j += 2) sum += term(j, 2 * count);
    count *= 2;
    const cplx refined = rn * sum / static_cast<double>(count);
    const double diff = std::abs(refined - estimate);
    estimate = refined;
    if (diff <= opt.rel_tol * std::abs(refined) || diff <= 1e-15 * scale * rn) return {refined, diff};
  }
  std::ostringstream msg;
  msg << "contour integral did not settle with " << count << " nodes";
  throw Error(ErrorCode::NotConverged, msg.str());
}

Estimate<cplx> residue_numeric(const Function& f, cplx omega, double radius, const ContourOptions& opt) {
  return laurent_coeff(f, omega, 1, radius, opt);
}

Estimate<cplx> laurent_coeff(const ClosedZeta& Z, cplx omega, int n, double radius, const ContourOptions& opt) {
  check_isolated(Z, omega, radius);
  return laurent_coeff(as_function(Z), omega, n, radius, opt);
}

Estimate<cplx> residue_numeric(const ClosedZeta& Z, cplx omega, double radius, const ContourOptions& opt) {
  return laurent_coeff(Z, omega, 1, radius, opt);
}

OrderResult order_numeric(const Function& f, cplx omega, double radius, int probe_depth) {
  if (probe_depth < 1) throw Error(ErrorCode::InvalidParameters, "probe depth must be at least 1");
  int count = 256;
  double winding = 0.0;
  Samples smp;
  while (true) {
    smp = sample_circle(f, omega, radius, count);
    if (smp.min_abs <= 1e-12 * smp.max_abs) throw Error(ErrorCode::ZeroOnContour, "function vanishes on the contour");
    double total = 0.0, worst = 0.0;
    for (int j = 0; j < count; ++j) {
      const double d = std::arg(smp.values[(j + 1) % count] / smp.values[j]);
      total += d;
      worst = std::max(worst, std::abs(d));
    }
    winding = total / (2.0 * kPi);
    if (worst < kPi / 3.0) break;  // phase resolved between neighbouring nodes
    if (count >= (1 << 14)) throw Error(ErrorCode::Ambiguous, "argument of f varies too fast on the contour");
    count *= 2;
  }
  const double k = std::round(winding);
  if (std::abs(winding - k) > 0.05) {
    std::ostringstream msg;
    msg << "winding number " << winding << " is not near an integer";
    throw Error(ErrorCode::Ambiguous, msg.str());
  }

  OrderResult out;
  out.order = static_cast<int>(-k);
  bool beyond = false;
  for (int n = 1; n <= probe_depth; ++n) {
    const auto c = laurent_coeff(f, omega, n, radius);
    out.probes.push_back(c);
    // significant relative to the size of f on the circle and to its own error bar
    const bool nonzero = std::abs(c.value) * std::pow(radius, n) > 1e-9 * smp.max_abs && std::abs(c.value) > 10.0 * c.error;
    if (nonzero && n > std::max(out.order, 0)) beyond = true;
  }
  out.essential_suspect = beyond || out.order > probe_depth;
  return out;
}

OrderResult order_numeric(const ClosedZeta& Z, cplx omega, double radius, int probe_depth) {
  check_isolated(Z, omega, radius);
  return order_numeric(as_function(Z), omega, radius, probe_depth);
}

std::vector<PoleRecord> poles_in_window(const Function& f, double re_lo, double re_hi, double im_lo, double im_hi) {
  if (!(re_lo <= re_hi) || !(im_lo <= im_hi)) throw Error(ErrorCode::InvalidParameters, "empty search window");

  // On a circle around c: residue moments μ_k = (1/2πi)∮ (s-c)^k f ds, blind to zeros,
  // and the log-derivative count (1/2πi)∮ f'/f ds = Z - P with first moment Σ zeros - Σ poles.
  struct Moments {
    cplx mu0{}, mu1{};
    double noise = 0.0;
    std::optional<int> net_poles;
    cplx pole_sum{};
  };
  auto moments = [&f](cplx c, double rho) -> std::optional<Moments> {
    const int count = 256;
    const double h = 1e-5 * rho;
    Moments m;
    cplx l0 = 0.0, l1 = 0.0;
    double peak = 0.0;
    bool log_ok = true;
    for (int j = 0; j < count; ++j) {
      const cplx e = std::polar(1.0, 2.0 * kPi * j / count);
      const cplx s = c + rho * e;
      const cplx v = f(s);
      if (!finite(v)) return std::nullopt;
      peak = std::max(peak, std::abs(v));
      // ds = i ρ e dθ, so (1/2πi)∮ g ds is the mean of g·ρe
      m.mu0 += v * rho * e;
      m.mu1 += v * rho * e * (rho * e);
      const cplx dv = (f(s + h * e) - f(s - h * e)) / (2.0 * h * e);
      if (!finite(dv) || v == cplx{0.0}) {
        log_ok = false;
        continue;
      }
      l0 += dv / v * rho * e;
      l1 += s * (dv / v * rho * e);
    }
    m.mu0 /= static_cast<double>(count);
    m.mu1 /= static_cast<double>(count);
    m.noise = 1e-10 * peak * rho;
    l0 /= static_cast<double>(count);
    l1 /= static_cast<double>(count);
    const double k = std::round(l0.real());
    if (log_ok && std::abs(l0 - cplx{k}) < 0.05) {
      m.net_poles = static_cast<int>(-k);
      m.pole_sum = -l1;
    }
    return m;
  };
  // best single-pole location from the moments, if they show a pole at all
  auto locate = [](const Moments& m, cplx c) -> std::optional<cplx> {
    if (std::abs(m.mu0) > m.noise) return c + m.mu1 / m.mu0;
    if (m.net_poles && *m.net_poles >= 1) return m.pole_sum / static_cast<double>(*m.net_poles);
    return std::nullopt;
  };

  const double spacing = 0.25, rho = 0.2;  // overlapping circles cover the window
  const int nx = static_cast<int>(std::ceil((re_hi - re_lo) / spacing)) + 1;
  const int ny = static_cast<int>(std::ceil((im_hi - im_lo) / spacing)) + 1;
  std::vector<cplx> found;
  int cells = 0, broken = 0;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      ++cells;
      const cplx c{std::min(re_lo + ix * spacing, re_hi), std::min(im_lo + iy * spacing, im_hi)};
      std::optional<Moments> m;
      try {
        m = moments(c, rho);
      } catch (const Error&) {
      }
      if (!m) {
        ++broken;
        continue;
      }
      auto w = locate(*m, c);
      if (!w) continue;
      for (double r = 0.05; r > 1e-6; r /= 10.0) {
        std::optional<Moments> fine;
        try {
          fine = moments(*w, r);
        } catch (const Error&) {
        }
        if (!fine) break;
        const auto next = locate(*fine, *w);
        if (!next) break;
        w = next;
      }
      if (w->real() < re_lo || w->real() > re_hi || w->imag() < im_lo || w->imag() > im_hi) continue;
      if (std::none_of(found.begin(), found.end(), [&](cplx r) { return std::abs(r - *w) < 1e-6 * (1.0 + std::abs(*w)); }))
        found.push_back(*w);
    }
  }
  if (2 * broken > cells) throw Error(ErrorCode::CatalogMissingAndSearchFailed, "function not evaluable on the search grid");

  std::vector<PoleRecord> out;
  for (cplx w : found) {
    double nearest = kInf;
    for (cplx other : found)
      if (other != w) nearest = std::min(nearest, std::abs(other - w));
    // a nearby zero hides the pole from the winding number; shrink until it is outside
    for (double radius = std::min(0.05, 0.3 * nearest); radius > 1e-5; radius /= 10.0) {
      try {
        const auto ord = order_numeric(f, w, radius);
        if (ord.order < 1 && !ord.essential_suspect) continue;
        PoleRecord r;
        r.location = w;
        r.essential = ord.essential_suspect;
        r.order = std::max(ord.order, 1);
        r.residue = laurent_coeff(f, w, r.order, radius).value;
        r.provenance = Provenance::NumericContour;
        out.push_back(r);
        break;
      } catch (const Error&) {
        continue;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PoleRecord& a, const PoleRecord& b) {
    return a.location.imag() != b.location.imag() ? a.location.imag() < b.location.imag()
                                                  : a.location.real() < b.location.real();
  });
  return out;
}

std::vector<PoleRecord> poles_in_window(const ClosedZeta& Z, double re_lo, double re_hi, double im_lo,
                                        double im_hi) {
  if (Z.catalog) return catalog_poles(Z, re_lo, re_hi, im_lo, im_hi);
  return poles_in_window(as_function(Z), re_lo, re_hi, im_lo, im_hi);
}

}  // namespace fzeta::merofunc

#include "fzeta/analysis/minkowski.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>

namespace fzeta::analysis {

namespace {

using nlohmann::json;

// Nelder–Mead on R^2; enough for the two nonlinear parameters of the tube model.
std::array<double, 2> nelder_mead(const std::function<double(const std::array<double, 2>&)>& f,
                                  std::array<double, 2> start, std::array<double, 2> step, int max_iter = 4000) {
  std::array<std::array<double, 2>, 3> x{start, start, start};
  x[1][0] += step[0];
  x[2][1] += step[1];
  std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const auto best = x[idx[0]], mid = x[idx[1]], worst = x[idx[2]];
    const double f_best = fx[idx[0]], f_mid = fx[idx[1]], f_worst = fx[idx[2]];
    const double size = std::max(std::abs(worst[0] - best[0]) + std::abs(mid[0] - best[0]),
                                 std::abs(worst[1] - best[1]) + std::abs(mid[1] - best[1]));
    if (size < 1e-13 || std::abs(f_worst - f_best) <= 1e-30 + 1e-15 * std::abs(f_best)) break;
    const std::array<double, 2> c{(best[0] + mid[0]) / 2.0, (best[1] + mid[1]) / 2.0};
    auto along = [&](double k) { return std::array<double, 2>{c[0] + k * (worst[0] - c[0]), c[1] + k * (worst[1] - c[1])}; };
    const auto r = along(-1.0);
    const double fr = f(r);
    std::array<double, 2> next;
    double f_next;
    if (fr < f_best) {
      const auto e = along(-2.0);
      const double fe = f(e);
      next = fe < fr ? e : r;
      f_next = std::min(fe, fr);
    } else if (fr < f_mid) {
      next = r;
      f_next = fr;
    } else {
      const auto k = fr < f_worst ? along(-0.5) : along(0.5);
      const double fk = f(k);
      if (fk < std::min(fr, f_worst)) {
        next = k;
        f_next = fk;
      } else {
        // shrink towards the best vertex
        x = {best, {(best[0] + mid[0]) / 2.0, (best[1] + mid[1]) / 2.0},
             {(best[0] + worst[0]) / 2.0, (best[1] + worst[1]) / 2.0}};
        fx = {f_best, f(x[1]), f(x[2])};
        continue;
      }
    }
    x[idx[2]] = next;
    fx[idx[2]] = f_next;
  }
  const auto it = std::min_element(fx.begin(), fx.end());
  return x[static_cast<std::size_t>(it - fx.begin())];
}

struct Prepared {
  std::vector<double> logt, logv, t, v;
  double N = 1.0;
  std::size_t final_begin = 0;  // first sample of the final (smallest-t) decade
};

Prepared prepare(const geometry::TubeSamples& tube) {
  Prepared p;
  p.N = tube.N;
  auto samples = tube.samples;
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.t > b.t; });
  for (const auto& s : samples) {
    if (!(s.t > 0.0) || !(s.volume > 0.0)) throw Error(ErrorCode::InsufficientSamples, "tube samples must be positive");
    p.t.push_back(s.t);
    p.v.push_back(s.volume);
    p.logt.push_back(std::log(s.t));
    p.logv.push_back(std::log(s.volume));
  }
  if (p.t.size() < 24 || p.logt.front() - p.logt.back() < 3.0 * std::log(10.0) - 1e-9)
    throw Error(ErrorCode::InsufficientSamples, "need at least three decades of tube samples");
  p.final_begin = p.t.size() - 1;
  while (p.final_begin > 0 && p.logt[p.final_begin - 1] <= p.logt.back() + std::log(10.0) + 1e-12) --p.final_begin;
  return p;
}

// Ordinary least squares for the slope and intercept of y against x.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateFit, "tube samples share a single radius");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double checked_dimension(double D, double N) {
  if (D < -1e-6 || D > N + 1e-6 || !std::isfinite(D))
    throw Error(ErrorCode::DegenerateFit, "fitted dimension lies outside [0, N]");
  return std::clamp(D, 0.0, N);
}

struct Stats {
  double min = kInf, max = -kInf, mean = 0.0, cv = 0.0;
};

Stats stats(const std::vector<double>& v, std::size_t begin) {
  Stats s;
  const double n = static_cast<double>(v.size() - begin);
  for (std::size_t i = begin; i < v.size(); ++i) {
    s.min = std::min(s.min, v[i]);
    s.max = std::max(s.max, v[i]);
    s.mean += v[i] / n;
  }
  double var = 0.0;
  for (std::size_t i = begin; i < v.size(); ++i) var += (v[i] - s.mean) * (v[i] - s.mean) / n;
  s.cv = std::sqrt(var) / std::abs(s.mean);
  return s;
}

}  // namespace

double estimate_period(const geometry::TubeSamples& tube, double D) {
  const Prepared p = prepare(tube);
  std::vector<double> r(p.t.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = p.logv[i] - (p.N - D) * p.logt[i];
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
  for (auto& x : r) x -= mean;

  const double span = p.logt.front() - p.logt.back();
  const double step = span / static_cast<double>(p.t.size() - 1);
  const double lo = 8.0 * step, hi = span / 3.0;
  if (!(hi > lo)) throw Error(ErrorCode::InsufficientSamples, "too few samples to estimate a period");
  double best_T = lo, best_power = -1.0;
  for (int j = 0; j <= 4000; ++j) {
    const double T = lo * std::pow(hi / lo, j / 4000.0);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r[i] * std::polar(1.0, 2.0 * kPi * -p.logt[i] / T);
    if (std::norm(acc) > best_power) {
      best_power = std::norm(acc);
      best_T = T;
    }
  }
  // refine between the neighbouring scan points
  const double ratio = std::pow(hi / lo, 1.0 / 4000.0);
  const double a = best_T / ratio, b = best_T * ratio;
  for (int j = 0; j <= 400; ++j) {
    const double T = a * std::pow(b / a, j / 400.0);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r[i] * std::polar(1.0, 2.0 * kPi * -p.logt[i] / T);
    if (std::norm(acc) > best_power) {
      best_power = std::norm(acc);
      best_T = T;
    }
  }
  return best_T;
}

MinkowskiFit fit_minkowski(const geometry::TubeSamples& tube, const FitOptions& opt) {
  const Prepared p = prepare(tube);
  const std::size_t n = p.t.size();
  const auto [slope, intercept] = line_fit(p.logt, p.logv);
  (void)intercept;
  const double D0 = p.N - slope;

  // Variable projection: for fixed (D, α) the model M + c t^α is linear in (M, c).
  // Residuals are relative to the profile G = t^{D-N}|A_t|.
  auto inner = [&](double D, double alpha, double& M, double& c) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double G = p.v[i] * std::exp((D - p.N) * p.logt[i]);
      const double z = std::exp(alpha * p.logt[i]);
      const double w = 1.0 / (G * G);
      a11 += w;
      a12 += w * z;
      a22 += w * z * z;
      b1 += w * G;
      b2 += w * G * z;
    }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) <= 1e-14 * a11 * a22) {
      M = b1 / a11;
      c = 0.0;
    } else {
      M = (a22 * b1 - a12 * b2) / det;
      c = (a11 * b2 - a12 * b1) / det;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double G = p.v[i] * std::exp((D - p.N) * p.logt[i]);
      const double r = (M + c * std::exp(alpha * p.logt[i])) / G - 1.0;
      acc += r * r;
    }
    return acc;
  };
  auto objective = [&](const std::array<double, 2>& x) {
    if (x[1] < 0.02 || x[1] > 4.0) return 1e300;
    double M, c;
    return inner(x[0], x[1], M, c);
  };
  const auto best = nelder_mead(objective, {D0, 0.5}, {0.01, 0.2});
  double M = 0.0, c = 0.0;
  const double sse = inner(best[0], best[1], M, c);

  MinkowskiFit fit;
  fit.D = best[0];
  std::vector<double> detrended(n);
  for (std::size_t i = 0; i < n; ++i)
    detrended[i] = p.v[i] * std::exp((fit.D - p.N) * p.logt[i]) - c * std::exp(best[1] * p.logt[i]);
  const Stats final_decade = stats(detrended, p.final_begin);
  fit.variation = final_decade.cv;

  if (fit.variation <= opt.cv_threshold) {
    fit.branch = Branch::Measurable;
    fit.D = checked_dimension(fit.D, p.N);
    fit.M = M;
    fit.alpha = best[1];
    fit.M_lower = final_decade.min;
    fit.M_upper = final_decade.max;
    fit.M_average = final_decade.mean;
    fit.residual = std::sqrt(sse / static_cast<double>(n));
    return fit;
  }

  // Periodic branch: log|A_t| = (N-D) log t + log G(log 1/t), G expanded in harmonics of 1/T.
  const double T = opt.period ? *opt.period : estimate_period(tube, D0);
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidParameters, "period must be positive");
  const int K = std::max(0, opt.harmonics);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 2 + 2 * K);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double tau = -p.logt[i];
    X(r, 0) = 1.0;
    X(r, 1) = p.logt[i];
    for (int k = 1; k <= K; ++k) {
      X(r, 2 * k) = std::cos(2.0 * kPi * k * tau / T);
      X(r, 2 * k + 1) = std::sin(2.0 * kPi * k * tau / T);
    }
    y(r) = p.logv[i];
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  fit.branch = Branch::Periodic;
  fit.period = T;
  fit.D = checked_dimension(p.N - beta(1), p.N);
  fit.residual = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(n));
  std::vector<double> G(n);
  for (std::size_t i = 0; i < n; ++i) G[i] = p.v[i] * std::exp((fit.D - p.N) * p.logt[i]);
  const Stats g = stats(G, p.final_begin);
  fit.M_lower = g.min;
  fit.M_upper = g.max;
  fit.M_average = g.mean;
  return fit;
}

PeriodicProfile extract_G(const geometry::TubeSamples& tube, double D, double T, int grid, int k_max, double fold_tol) {
  if (!(D >= 0.0) || !(T > 0.0)) throw Error(ErrorCode::InvalidParameters, "need D >= 0 and T > 0");
  if (grid < 16 || k_max < 0 || 2 * k_max >= grid) throw Error(ErrorCode::InvalidParameters, "bad profile grid");
  // τ = log(1/t) ascending
  std::vector<double> tau, G;
  auto samples = tube.samples;
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.t > b.t; });
  bool exact = true;
  for (const auto& s : samples) {
    if (!(s.t > 0.0) || !(s.volume > 0.0)) throw Error(ErrorCode::InsufficientSamples, "tube samples must be positive");
    tau.push_back(-std::log(s.t));
    G.push_back(s.volume * std::pow(s.t, D - tube.N));
    exact = exact && s.exact;
  }
  if (tau.size() < 2 || tau.back() - tau.front() < 3.0 * T)
    throw Error(ErrorCode::InsufficientSamples, "tube must span at least three periods");

  auto interpolate = [&](double x) {
    const auto it = std::upper_bound(tau.begin(), tau.end(), x);
    const auto j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - tau.begin(), 1, static_cast<std::ptrdiff_t>(tau.size()) - 1));
    const double w = (x - tau[j - 1]) / (tau[j] - tau[j - 1]);
    return (1.0 - w) * G[j - 1] + w * G[j];
  };

  const auto first = static_cast<long>(std::ceil(tau.front() / T - 1e-12));
  const auto last = static_cast<long>(std::floor(tau.back() / T + 1e-12)) - 1;
  PeriodicProfile prof;
  prof.T = T;
  prof.exact = exact;
  prof.k_max = k_max;
  const double h = T / grid;
  std::vector<std::vector<double>> branches;
  for (long b = first; b <= last; ++b) {
    std::vector<double> row(static_cast<std::size_t>(grid));
    for (int j = 0; j < grid; ++j) row[static_cast<std::size_t>(j)] = interpolate(b * T + j * h);
    branches.push_back(std::move(row));
  }
  if (branches.size() < 2) throw Error(ErrorCode::InsufficientSamples, "need two complete periods to fold");

  std::vector<double> mean_row(static_cast<std::size_t>(grid), 0.0);
  for (const auto& row : branches)
    for (int j = 0; j < grid; ++j) mean_row[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)] / branches.size();
  for (const auto& row : branches)
    for (int j = 0; j < grid; ++j) {
      const double ref = mean_row[static_cast<std::size_t>(j)];
      prof.spread = std::max(prof.spread, std::abs(row[static_cast<std::size_t>(j)] - ref) / std::abs(ref));
    }

  // The profile itself interpolates the samples of all complete periods pooled by
  // phase: the phases interleave, so kinks of G are resolved far better than by
  // any single period.
  std::vector<std::pair<double, double>> pooled;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < first * T || tau[i] >= (last + 1) * T) continue;
    pooled.emplace_back(tau[i] - std::floor(tau[i] / T) * T, G[i]);
  }
  std::sort(pooled.begin(), pooled.end());
  const std::size_t P = pooled.size();
  for (int j = 0; j < grid; ++j) {
    const double x = j * h;
    const auto it = std::lower_bound(pooled.begin(), pooled.end(), std::make_pair(x, -kInf));
    const std::size_t hi = static_cast<std::size_t>(it - pooled.begin()) % P;
    const std::size_t lo = (hi + P - 1) % P;
    double xl = pooled[lo].first, xh = pooled[hi].first;
    if (xl > x) xl -= T;  // wrap around the period
    if (xh < x) xh += T;
    const double w = xh > xl ? (x - xl) / (xh - xl) : 0.0;
    prof.G_values.push_back((1.0 - w) * pooled[lo].second + w * pooled[hi].second);
    prof.tau_grid.push_back(x);
  }
  if (prof.spread > fold_tol) throw Error(ErrorCode::PeriodMismatch, "folded periods disagree; wrong period?");

  const auto [lo, hi] = std::minmax_element(prof.G_values.begin(), prof.G_values.end());
  const double mean = std::accumulate(prof.G_values.begin(), prof.G_values.end(), 0.0) / grid;
  prof.nonconstant = (*hi - *lo) > 1e-9 * std::abs(mean);

  // trapezoid rule on the periodic grid: Ĝ₀(k/T) = h Σ_j G_j e^{-2πi k j/grid}
  for (int k = -k_max; k <= k_max; ++k) {
    cplx acc = 0.0;
    for (int j = 0; j < grid; ++j)
      acc += prof.G_values[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k) * j / grid);
    prof.fourier.push_back(h * acc);
  }
  return prof;
}

std::vector<merofunc::PoleRecord> fourier_residues(const PeriodicProfile& profile, double D, int k_max) {
  if (k_max < 0 || k_max > profile.k_max) throw Error(ErrorCode::InvalidParameters, "k_max exceeds the profile");
  double peak = 0.0;
  for (cplx c : profile.fourier) peak = std::max(peak, std::abs(c));
  if (!(peak > 0.0) || !std::isfinite(peak))
    throw Error(ErrorCode::NoiseFloorUndetermined, "profile has no usable Fourier coefficients");
  // exact tubes: relative floor; numeric tubes: ten times the fold disagreement, integrated over a period
  const double mean = std::abs(profile.coefficient(0)) / profile.T;
  const double floor = profile.exact ? 1e-9 * peak : 10.0 * profile.spread * mean * profile.T;

  std::vector<merofunc::PoleRecord> out;
  for (int k = -k_max; k <= k_max; ++k) {
    const cplx g = profile.coefficient(k);
    if (k != 0 && std::abs(g) <= floor) continue;
    merofunc::PoleRecord r;
    r.location = {D, 2.0 * kPi * k / profile.T};
    r.order = 1;
    r.residue = g / profile.T;
    r.provenance = merofunc::Provenance::NumericContour;
    out.push_back(r);
  }
  return out;
}

std::vector<merofunc::PoleRecord> distance_residues_from_tube(const std::vector<merofunc::PoleRecord>& records, int N) {
  std::vector<merofunc::PoleRecord> out = records;
  for (auto& r : out) {
    const cplx factor = static_cast<double>(N) - r.location;
    if (std::abs(factor) < 1e-12) throw Error(ErrorCode::OmegaEqualsN, "pole at s = N has no distance residue");
    r.residue *= factor;
  }
  return out;
}

json fit_to_json(const MinkowskiFit& fit) {
  json j = {{"D", fit.D},
            {"M_lower", fit.M_lower},
            {"M_upper", fit.M_upper},
            {"M_average", fit.M_average},
            {"branch", fit.branch == Branch::Measurable ? "measurable" : "periodic"},
            {"residual", fit.residual},
            {"variation", fit.variation}};
  j["M"] = fit.M ? json(*fit.M) : json(nullptr);
  j["alpha"] = fit.alpha ? json(*fit.alpha) : json(nullptr);
  j["period"] = fit.period ? json(*fit.period) : json(nullptr);
  return j;
}

json profile_to_json(const PeriodicProfile& p) {
  json coeffs = json::array();
  for (int k = -p.k_max; k <= p.k_max; ++k) {
    const cplx c = p.coefficient(k);
    coeffs.push_back({{"k", k}, {"re", c.real()}, {"im", c.imag()}});
  }
  const auto [lo, hi] = std::minmax_element(p.G_values.begin(), p.G_values.end());
  return {{"T", p.T},       {"grid", p.G_values.size()}, {"G_min", *lo},          {"G_max", *hi},
          {"spread", p.spread}, {"nonconstant", p.nonconstant}, {"exact", p.exact}, {"fourier", coeffs}};
}

}  // namespace fzeta::analysis

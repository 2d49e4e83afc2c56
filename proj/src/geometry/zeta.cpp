#include "fzeta/geometry/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fzeta/numeric/special.hpp"

namespace fzeta::geometry {

namespace {

using numeric::real_pow;

struct ComplexAccumulator {
  double re = 0.0, im = 0.0, c_re = 0.0, c_im = 0.0;

  static void add(double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  void operator+=(cplx z) {
    add(re, c_re, z.real());
    add(im, c_im, z.imag());
  }
  cplx value() const { return {re + c_re, im + c_im}; }
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Midpoint sum over a res × res grid on [lo, hi]^2; rows are reduced pairwise so
// the result does not depend on the thread count.
cplx grid_sum(const BoundedSet& A, cplx s, double delta, double lo, double hi, int res, const Quadrature2d& q,
              double side) {
  const double h = (hi - lo) / res;
  const double cell = h * h;
  const bool at_two = std::abs(s - 2.0) == 0.0;
  std::vector<cplx> rows(static_cast<std::size_t>(res));

  auto work = [&](int row_begin, int row_end) {
    std::vector<cplx> terms(static_cast<std::size_t>(res));
    for (int iy = row_begin; iy < row_end; ++iy) {
      const double y = lo + (iy + 0.5) * h;
      for (int ix = 0; ix < res; ++ix) {
        const double x = lo + (ix + 0.5) * h;
        cplx v = 0.0;
        const bool inside = x > 0.0 && y > 0.0 && x < side && y < side;
        if ((q.interior_only && !inside) || (q.use_square_formula && inside)) {
          terms[ix] = v;
          continue;
        }
        const double d = distance_to_set(Point2{x, y}, A);
        if (d < delta) {
          if (d > 0.0)
            v = std::exp((s - 2.0) * std::log(d)) * cell;
          else if (at_two)
            v = cell;
        }
        terms[ix] = v;
      }
      rows[iy] = numeric::pairwise_sum(std::span<const cplx>(terms));
    }
  };

  unsigned threads = q.threads ? q.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(res));
  std::vector<std::thread> pool;
  const int chunk = (res + static_cast<int>(threads) - 1) / static_cast<int>(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const int b = static_cast<int>(t) * chunk, e = std::min(res, b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  for (auto& th : pool) th.join();
  return numeric::pairwise_sum(std::span<const cplx>(rows));
}

// Σ_k 8^{k-1} · 8·2^{-s} a_k^s / (s(s-1)) with a_k = 3^{-k}.
cplx carpet_interior_by_squares(cplx s, int level) {
  const cplx per = 8.0 * real_pow(2.0, -s) / (s * (s - 1.0));
  cplx acc = 0.0;
  const int depth = level < 0 ? 100000 : level;
  for (int k = 1; k <= depth; ++k) {
    const cplx term = std::pow(8.0, k - 1) * real_pow(3.0, -static_cast<double>(k) * s) * per;
    acc += term;
    if (level < 0 && std::abs(term) < 1e-17 * std::abs(acc)) break;
  }
  return acc;
}

struct PanelRules {
  const numeric::GaussLegendre& g2 = numeric::gauss_legendre(2);
  const numeric::GaussLegendre& g4 = numeric::gauss_legendre(4);
  const numeric::GaussLegendre& g8 = numeric::gauss_legendre(8);
  const numeric::GaussLegendre& g24 = numeric::gauss_legendre(24);
};

// ∫_lo^hi t^{s-2}(alpha + beta t) dt with Gauss–Legendre in u = log t.
cplx panel_integral(const PanelRules& rules, cplx s, double lo, double hi, double alpha, double beta) {
  const double u0 = std::log(lo), u1 = std::log(hi);
  const double width = u1 - u0;
  const double scale = std::abs(s) + 1.0;
  const double x = scale * width;
  const numeric::GaussLegendre* rule = &rules.g24;
  int pieces = 1;
  if (x < 1e-3)
    rule = &rules.g2;
  else if (x < 0.05)
    rule = &rules.g4;
  else if (x < 0.5)
    rule = &rules.g8;
  else
    pieces = static_cast<int>(std::ceil(x / 4.0));

  cplx acc = 0.0;
  const double piece = width / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double a = u0 + p * piece;
    const double half = 0.5 * piece, mid = a + half;
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
      const double u = mid + half * rule->nodes[i];
      const double t = std::exp(u);
      acc += rule->weights[i] * half * std::exp((s - 1.0) * u) * (alpha + beta * t);
    }
  }
  return acc;
}

}  // namespace

cplx distance_zeta_1d(const BoundedSet& A, cplx s, double delta, double eps) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParameters, "delta must be positive");
  if (!(s.real() > 0.0)) throw Error(ErrorCode::DivergentAt, "distance zeta diverges for Re s <= 0");
  const GapView view = gap_view(A);

  cplx solid = 0.0;
  if (view.measure > 0.0) {
    if (s == cplx(1.0))
      solid = view.measure;
    else if (!(s.real() > 1.0))
      throw Error(ErrorCode::DivergentAt, "set of positive measure: distance zeta diverges for Re s < 1");
  }
  const auto& gaps = view.gaps;
  if (!gaps.finite() && gaps.analytic_abscissa() && !(s.real() > *gaps.analytic_abscissa()))
    throw Error(ErrorCode::DivergentAt, "Re s at or below the dimension of " + A.describe());

  const cplx cap = 2.0 * real_pow(delta, s) / s;  // two slabs of depth δ
  const cplx half = real_pow(2.0, 1.0 - s) / s;   // 2 (g/2)^s / s = half · g^s
  double wide = 0.0;
  ComplexAccumulator narrow;

  auto e = gaps.enumerate();
  std::size_t count = 0, next_check = 16;
  bool converged = false;
  while (auto g = e->next()) {
    if (g->length >= 2.0 * delta) {
      wide += g->multiplicity;
      continue;
    }
    narrow += g->multiplicity * real_pow(g->length, s);
    if (++count == next_check) {
      const auto tail = e->tail_estimate(s);
      if (tail.error * std::abs(half) <= eps) {
        narrow += tail.value;
        converged = true;
        break;
      }
      next_check = count + std::max<std::size_t>(16, count / 4);
    }
    if (count > (std::size_t{1} << 24))
      throw Error(ErrorCode::DivergentAt, "gap sum not converging at this s for " + A.describe());
  }
  if (!converged) {
    const auto tail = e->tail_estimate(s);
    if (tail.error * std::abs(half) > eps)
      throw Error(ErrorCode::DivergentAt, "gap tail not summable at this s for " + A.describe());
    narrow += tail.value;
  }
  return cap * (1.0 + wide) + half * narrow.value() + solid;
}

Estimate<cplx> distance_zeta_2d(const BoundedSet& A, cplx s, double delta, const Quadrature2d& q) {
  if (A.ambient_dim() != 2) throw Error(ErrorCode::InvalidParameters, "distance_zeta_2d needs a planar set");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParameters, "delta must be positive");
  if (q.resolution < 64 || !is_power_of_two(q.resolution))
    throw Error(ErrorCode::GridTooCoarse, "resolution must be a power of two and at least 64");

  const auto* cc = std::get_if<CarpetComplement>(&A.rep);
  const double side_unscaled = cc ? 1.0 : std::get<SquareBoundary>(A.rep).side;
  const double lambda = A.scale;
  const double side = lambda * side_unscaled;

  if (cc) {
    const double dim = std::log(8.0) / std::log(3.0);
    if (cc->level < 0 && !(s.real() > dim))
      throw Error(ErrorCode::DivergentAt, "carpet distance zeta diverges for Re s <= log_3 8");
    if (cc->level >= 0 && s != cplx(2.0) && !(s.real() > 2.0))
      throw Error(ErrorCode::DivergentAt, "carpet iterate has positive area: diverges for Re s < 2");
  } else if (!(s.real() > 1.0)) {
    throw Error(ErrorCode::DivergentAt, "square boundary distance zeta diverges for Re s <= 1");
  }
  if (q.use_square_formula && !cc) throw Error(ErrorCode::InvalidParameters, "square formula applies to carpets");

  const double lo = q.interior_only ? 0.0 : -delta;
  const double hi = q.interior_only ? side : side + delta;
  const cplx fine = grid_sum(A, s, delta, lo, hi, q.resolution, q, side);
  const cplx coarse = grid_sum(A, s, delta, lo, hi, q.resolution / 2, q, side);

  cplx exact_part = 0.0;
  if (q.use_square_formula) exact_part = real_pow(lambda, s) * carpet_interior_by_squares(s, cc->level);
  return {fine + exact_part, std::abs(fine - coarse)};
}

Estimate<cplx> tube_zeta_1d(const BoundedSet& A, cplx s, double delta, double tol, std::size_t max_panels) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParameters, "delta must be positive");
  const GapView view = gap_view(A);
  const auto& gaps = view.gaps;
  const double dim = gaps.finite() ? 0.0 : gaps.analytic_abscissa().value_or(1.0);
  if (!(s.real() > dim) || (view.measure > 0.0 && !(s.real() > 1.0)))
    throw Error(ErrorCode::DivergentAt, "tube zeta diverges at this s for " + A.describe());

  const PanelRules rules;
  const long double hull = static_cast<long double>(view.hi) - view.lo;
  long double mass = 0.0L;  // Σ m g over gaps wider than 2t
  double count = 0.0;       // Σ m over the same gaps
  ComplexAccumulator acc;
  double upper = delta;
  std::size_t panels = 0;

  // Below u the narrow gaps g contribute ∫_0^u t^{s-2} min(g, 2t) dt, which sums to
  // T(1) u^{s-1}/(s-1) - 2^{1-s} T(s)/(s(s-1)) with T the remaining Σ m g^s.
  auto closed_tail = [&](double u, cplx z, const Estimate<cplx>& Tz, const Estimate<cplx>& T1) -> Estimate<cplx> {
    const double beta = 2.0 * (1.0 + count);
    const cplx v = beta * real_pow(u, z) / z + (view.measure + T1.value) * real_pow(u, z - 1.0) / (z - 1.0) -
                   real_pow(2.0, 1.0 - z) * Tz.value / (z * (z - 1.0));
    const double err = T1.error * std::pow(u, z.real() - 1.0) / std::abs(z - 1.0) +
                       std::pow(2.0, 1.0 - z.real()) * Tz.error / std::abs(z * (z - 1.0));
    return {v, err};
  };
  auto tail_below = [&](double u, const strings::LengthEnumerator& rest) -> Estimate<cplx> {
    const auto T1 = rest.tail_estimate(1.0);
    if (std::abs(s - 1.0) > 1e-6) return closed_tail(u, s, rest.tail_estimate(s), T1);
    // the two pieces are singular separately at s = 1; average symmetric neighbours
    const cplx h = 1e-6;
    const auto a = closed_tail(u, s + h, rest.tail_estimate(s + h), T1);
    const auto b = closed_tail(u, s - h, rest.tail_estimate(s - h), T1);
    return {0.5 * (a.value + b.value), std::max(a.error, b.error) + 1e-12 * std::abs(a.value - b.value)};
  };

  auto e = gaps.enumerate();
  while (true) {
    auto g = e->next();
    const double lower = g ? std::min(g->length / 2.0, upper) : 0.0;
    const double beta = 2.0 * (1.0 + count);
    double alpha = static_cast<double>(hull - mass);
    if (g) {
      // hull - mass cancels badly deep in the string; use the remaining mass when it is known
      const auto rest = e->tail_estimate(1.0);
      const double known = view.measure + g->length * g->multiplicity + rest.value.real();
      if (rest.error <= 1e-13 * known) alpha = known;
    }
    if (!g) {
      // last panel (0, upper): the tube is exactly linear there
      cplx last = beta * real_pow(upper, s) / s;
      if (alpha != 0.0) last += alpha * real_pow(upper, s - 1.0) / (s - 1.0);
      acc += last;
      return {acc.value(), 0.0};
    }
    if (lower < upper) {
      acc += panel_integral(rules, s, lower, upper, alpha, beta);
      ++panels;
      upper = lower;
    }
    mass += static_cast<long double>(g->length) * g->multiplicity;
    count += g->multiplicity;
    if (panels >= 8 && !gaps.finite()) {
      const auto tail = tail_below(upper, *e);
      if (tail.error <= tol || panels >= max_panels) {
        acc += tail.value;
        return {acc.value(), tail.error};
      }
    }
  }
}

Estimate<cplx> tube_zeta_numeric(const TubeSamples& tube, cplx s, double delta) {
  const auto& smp = tube.samples;
  if (smp.size() < 8) throw Error(ErrorCode::InsufficientSamples, "need at least 8 tube samples");
  if (smp.front().t < delta * (1.0 - 1e-9))
    throw Error(ErrorCode::InsufficientSamples, "samples do not reach up to delta");
  const double N = tube.N;

  std::vector<double> tau, vol;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    if (smp[i].t > delta) {
      if (i + 1 < smp.size() && smp[i + 1].t < delta) {
        // log-log interpolation onto t = δ
        const double w = std::log(delta / smp[i + 1].t) / std::log(smp[i].t / smp[i + 1].t);
        tau.push_back(std::log(delta));
        vol.push_back(std::exp((1.0 - w) * std::log(smp[i + 1].volume) + w * std::log(smp[i].volume)));
      }
      continue;
    }
    tau.push_back(std::log(smp[i].t));
    vol.push_back(smp[i].volume);
  }
  if (tau.size() < 8) throw Error(ErrorCode::InsufficientSamples, "fewer than 8 samples below delta");

  auto integrand = [&](std::size_t i) { return std::exp((s - N) * tau[i]) * vol[i]; };
  auto trapezoid = [&](std::size_t stride) {
    cplx acc = 0.0;
    std::size_t i = 0;
    for (; i + stride < tau.size(); i += stride)
      acc += 0.5 * (tau[i] - tau[i + stride]) * (integrand(i) + integrand(i + stride));
    const std::size_t last = tau.size() - 1;
    if (i != last) acc += 0.5 * (tau[i] - tau[last]) * (integrand(i) + integrand(last));
    return acc;
  };
  const cplx fine = trapezoid(1);
  const cplx coarse = trapezoid(2);

  // power-law tail fitted over the last decade of samples
  const double t_min = std::exp(tau.back());
  std::size_t first = tau.size() - 1;
  while (first > 0 && tau[first - 1] < tau.back() + std::log(10.0)) --first;
  if (tau.size() - first < 4) first = tau.size() >= 4 ? tau.size() - 4 : 0;
  const double n = static_cast<double>(tau.size() - first);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < tau.size(); ++i) {
    mx += tau[i];
    my += std::log(vol[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = first; i < tau.size(); ++i) {
    sxx += (tau[i] - mx) * (tau[i] - mx);
    sxy += (tau[i] - mx) * (std::log(vol[i]) - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;  // N - D
  const double D = N - slope;
  if (!(s.real() > D)) throw Error(ErrorCode::DivergentAt, "Re s at or below the fitted dimension");
  double worst = 0.0;
  for (std::size_t i = first; i < tau.size(); ++i)
    worst = std::max(worst, std::abs(std::log(vol[i]) - my - slope * (tau[i] - mx)));
  const double C = std::exp(my - slope * mx);
  const cplx tail = C * real_pow(t_min, s - D) / (s - D);

  // the (fine - coarse)/3 Richardson term is the usual trapezoid error proxy
  const double err = std::abs(fine - coarse) / 3.0 + std::abs(tail) * std::max(std::expm1(worst), 1e-12);
  return {fine + tail, err};
}

}  // namespace fzeta::geometry

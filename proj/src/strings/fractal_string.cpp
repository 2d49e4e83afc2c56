#include "fzeta/strings/fractal_string.hpp"

#include <algorithm>
#include <cmath>

#include "fzeta/numeric/special.hpp"

namespace fzeta::strings {

namespace {

using numeric::real_pow;

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
  double re = 0.0, im = 0.0, c_re = 0.0, c_im = 0.0;

  static void add(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  void operator+=(cplx z) {
    add(re, c_re, z.real());
    add(im, c_im, z.imag());
  }

  cplx value() const { return {re + c_re, im + c_im}; }
};

// C^(m,a) as a string: m-1 gaps of length g = (1-ma)/(m-1), then each level
// scaled by a with m times as many gaps.
EnumeratorFactory generalized_cantor_lengths(long m, double a, double scale) {
  const double g = (1.0 - static_cast<double>(m) * a) / static_cast<double>(m - 1);
  const double log_m1 = std::log(static_cast<double>(m - 1));
  const double log_m = std::log(static_cast<double>(m));
  return lattice_lengths(scale * g, a, [=](long k) { return log_m1 + static_cast<double>(k) * log_m; });
}

std::optional<double> max_opt(std::optional<double> x, std::optional<double> y) {
  if (!x || !y) return std::nullopt;
  return std::max(*x, *y);
}

}  // namespace

FractalString::FractalString(EnumeratorFactory factory, std::optional<double> total_length_hint,
                             std::optional<double> analytic_abscissa, std::string description, bool finite)
    : factory_(std::move(factory)),
      total_length_hint_(total_length_hint),
      analytic_abscissa_(analytic_abscissa),
      description_(std::move(description)),
      finite_(finite) {}

double FractalString::tail_bound(std::size_t level, double sigma) const {
  auto e = enumerate();
  for (std::size_t i = 0; i < level; ++i)
    if (!e->next()) return 0.0;
  return e->tail_bound(sigma);
}

std::vector<LengthGroup> FractalString::groups(std::size_t count) const {
  std::vector<LengthGroup> out;
  auto e = enumerate();
  while (out.size() < count) {
    auto g = e->next();
    if (!g) break;
    out.push_back(*g);
  }
  return out;
}

double moran_dimension(const std::vector<double>& ratios) {
  if (ratios.empty()) throw Error(ErrorCode::InvalidRatios, "empty ratio list");
  auto f = [&](double sigma) {
    double acc = -1.0;
    for (double r : ratios) acc += std::pow(r, sigma);
    return acc;
  };
  // f is strictly decreasing; f(0) = J - 1 >= 0.
  double lo = 0.0, hi = 1.0;
  if (f(lo) == 0.0) return 0.0;
  while (f(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

FractalString build(const StringSpec& spec) {
  validate(spec);
  const std::string name = describe(spec);
  return std::visit(
      [&name](const auto& n) -> FractalString {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AString>) {
          return {a_string_lengths(n.a), 1.0, 1.0 / (1.0 + n.a), name};
        } else if constexpr (std::is_same_v<T, CantorString>) {
          return {generalized_cantor_lengths(2, 1.0 / 3.0, 1.0), 1.0, std::log(2.0) / std::log(3.0), name};
        } else if constexpr (std::is_same_v<T, GeneralizedCantor>) {
          return {generalized_cantor_lengths(n.m, n.a, 1.0), 1.0, std::log(n.m) / std::log(1.0 / n.a), name};
        } else if constexpr (std::is_same_v<T, NthOrderCantor>) {
          // lengths 3^{-1-k} with multiplicity 2^k C(n+k-1, k)
          const double order = n.n;
          auto log_mult = [order](long k) {
            const double kk = static_cast<double>(k);
            return kk * std::log(2.0) + std::lgamma(order + kk) - std::lgamma(kk + 1.0) - std::lgamma(order);
          };
          return {lattice_lengths(1.0 / 3.0, 1.0 / 3.0, log_mult), std::pow(3.0, order - 1.0), std::log(2.0) / std::log(3.0),
                  name};
        } else if constexpr (std::is_same_v<T, ExtendedSelfSimilar>) {
          const FractalString base = build(*n.base);
          double ratio_sum = 0.0;
          for (double r : n.ratios) ratio_sum += r;
          std::optional<double> total;
          if (base.total_length_hint()) total = *base.total_length_hint() / (1.0 - ratio_sum);
          std::optional<double> dim;
          if (base.analytic_abscissa()) dim = std::max(*base.analytic_abscissa(), moran_dimension(n.ratios));
          return {tensor_lengths(base.factory(), moran_lengths(n.ratios)), total, dim, name};
        } else if constexpr (std::is_same_v<T, Scaled>) {
          const FractalString inner = build(*n.inner);
          std::optional<double> total;
          if (inner.total_length_hint()) total = n.c * *inner.total_length_hint();
          return {scaled_lengths(n.c, inner.factory()), total, inner.analytic_abscissa(), name, inner.finite()};
        } else if constexpr (std::is_same_v<T, Union>) {
          std::vector<EnumeratorFactory> parts;
          std::optional<double> total = 0.0;
          std::optional<double> dim;
          bool finite = true;
          for (const auto& p : n.parts) {
            const FractalString part = build(*p);
            parts.push_back(part.factory());
            if (total && part.total_length_hint())
              *total += *part.total_length_hint();
            else
              total.reset();
            dim = dim ? max_opt(dim, part.analytic_abscissa()) : part.analytic_abscissa();
            finite = finite && part.finite();
          }
          return {union_lengths(std::move(parts)), total, dim, name, finite};
        } else if constexpr (std::is_same_v<T, Tensor>) {
          const FractalString left = build(*n.left);
          const FractalString right = build(*n.right);
          std::optional<double> total;
          if (left.total_length_hint() && right.total_length_hint())
            total = *left.total_length_hint() * *right.total_length_hint();
          return {tensor_lengths(left.factory(), right.factory()), total,
                  max_opt(left.analytic_abscissa(), right.analytic_abscissa()), name,
                  left.finite() && right.finite()};
        } else if constexpr (std::is_same_v<T, Hyperfractal>) {
          std::vector<EnumeratorFactory> parts;
          double total = 0.0;
          for (std::size_t k = 0; k < n.m.size(); ++k) {
            const double a_k = std::pow(static_cast<double>(n.m[k]), -1.0 / n.D);
            parts.push_back(generalized_cantor_lengths(n.m[k], a_k, n.c[k]));
            total += n.c[k];
          }
          std::function<double(double)> omitted;
          if (n.c_geometric_ratio > 0.0) {
            const double r = n.c_geometric_ratio;
            const double K = static_cast<double>(n.m.size());
            // each omitted component has Σ ℓ^σ ≤ c_k^σ for σ ≥ 1
            omitted = [r, K](double sigma) {
              if (sigma < 1.0) return kInf;
              const double rs = std::pow(r, sigma);
              return std::pow(r, (K + 1.0) * sigma) / (1.0 - rs);
            };
            total += std::pow(r, K + 1.0) / (1.0 - r);
          }
          return {union_lengths(std::move(parts), omitted), total, n.D, name};
        } else {
          return {finite_lengths({LengthGroup{n.length, 1.0}}), n.length, 0.0, name, true};
        }
      },
      spec.node);
}

PartialSum geometric_zeta_partial(const FractalString& L, cplx s, double eps, std::size_t max_groups) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParameters, "eps must be positive");
  if (!L.finite() && L.analytic_abscissa() && !(s.real() > *L.analytic_abscissa()))
    throw Error(ErrorCode::NotConvergent, "Re s is at or below the abscissa of convergence of " + L.description());

  auto e = L.enumerate();
  CompensatedSum sum;
  std::size_t count = 0;
  std::size_t next_check = 16;
  while (true) {
    auto g = e->next();
    if (!g) break;
    sum += g->multiplicity * real_pow(g->length, s);
    if (++count == next_check) {
      const auto tail = e->tail_estimate(s);
      if (tail.error <= eps) return {sum.value() + tail.value, tail.error, count};
      next_check = count + std::max<std::size_t>(16, count / 4);
    }
    if (count >= max_groups)
      throw Error(ErrorCode::TailBoundUnavailable,
                  "tail of " + L.description() + " not below eps after " + std::to_string(count) + " groups");
  }
  const auto tail = e->tail_estimate(s);
  if (tail.error > eps)
    throw Error(ErrorCode::TailBoundUnavailable, "omitted mass of " + L.description() + " exceeds eps");
  return {sum.value() + tail.value, tail.error, count};
}

double total_length(const FractalString& L, double eps) { return geometric_zeta_partial(L, 1.0, eps).value.real(); }

AbscissaEstimate abscissa_estimate(const FractalString& L, std::size_t max_groups) {
  if (L.analytic_abscissa()) {
    const double d = *L.analytic_abscissa();
    return {d, d, d, true};
  }
  // (log j, log ℓ_j) at the last index of each group
  std::vector<double> xs, ys;
  auto e = L.enumerate();
  double j = 0.0;
  for (std::size_t i = 0; i < max_groups; ++i) {
    auto g = e->next();
    if (!g) break;
    j += g->multiplicity;
    xs.push_back(std::log(j));
    ys.push_back(std::log(g->length));
  }
  if (xs.size() < 3) return {0.0, 0.0, 0.0, false};
  const double x_end = xs.back();
  std::size_t first = 0;
  while (first + 3 < xs.size() && xs[first] < x_end - std::log(10.0)) ++first;

  const double n = static_cast<double>(xs.size() - first);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = first; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) return {0.0, 0.0, 1.0, false};
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = first; i < xs.size(); ++i) {
    const double r = ys[i] - my - slope * (xs[i] - mx);
    rss += r * r;
  }
  const double se = n > 2.0 ? std::sqrt(rss / (n - 2.0) / sxx) : std::abs(slope);
  if (!(slope < 0.0)) return {0.0, 0.0, 1.0, false};
  const double d = -1.0 / slope;
  const double half_width = 2.0 * se / (slope * slope);
  return {d, std::max(0.0, d - half_width), std::min(1.0, d + half_width), false};
}

Estimate<cplx> a_string_zeta(double a, cplx s, long J) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidSpec, "a-string needs a > 0");
  if (J < 64) throw Error(ErrorCode::InvalidParameters, "need at least 64 explicit terms");
  cplx head = 0.0;
  for (long j = J; j >= 1; --j) {
    const double x = static_cast<double>(j);
    const double len = -std::pow(x, -a) * std::expm1(-a * std::log1p(1.0 / x));
    head += numeric::real_pow(len, s);
  }
  const auto tail = a_string_tail(a, s, J);
  return {head + tail.value, tail.error};
}

}  // namespace fzeta::strings

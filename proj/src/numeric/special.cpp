#include "fzeta/numeric/special.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>

namespace fzeta::numeric {

namespace {

// B_{2k}/(2k)! for k = 1..12
constexpr std::array<double, 12> kBernoulliOverFactorial = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
    77683.0 / 14101100039391805440000.0,
    -236364091.0 / 1693824136731743669452800000.0,
};

template <typename T>
T pairwise_impl(std::span<const T> v) {
  if (v.size() <= 16) {
    T acc{};
    for (const auto& x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_impl(v.first(half)) + pairwise_impl(v.subspan(half));
}

}  // namespace

Estimate<cplx> hurwitz_zeta(cplx z, double q) {
  if (!(q > 0.0)) throw Error(ErrorCode::InvalidParameters, "hurwitz_zeta requires q > 0");
  if (std::abs(z - 1.0) < 1e-300) throw Error(ErrorCode::PoleProximity, "hurwitz_zeta at z = 1");

  const double shift_target = std::max(20.0, std::abs(z) + 10.0);
  cplx head = 0.0;
  double big_n = q;
  std::vector<cplx> terms;
  while (big_n < shift_target) {
    terms.push_back(real_pow(big_n, -z));
    big_n += 1.0;
  }
  head = pairwise_sum(std::span<const cplx>(terms));

  cplx result = head + real_pow(big_n, 1.0 - z) / (z - 1.0) + 0.5 * real_pow(big_n, -z);
  // rising factorial z (z+1) ... (z+2k-2) times N^{-z-2k+1}
  cplx rising = z;
  cplx power = real_pow(big_n, -z - 1.0);
  double last = 0.0;
  for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
    const cplx term = kBernoulliOverFactorial[k] * rising * power;
    result += term;
    last = std::abs(term);
    if (last < 1e-18 * std::abs(result)) break;
    const double two_k = 2.0 * static_cast<double>(k + 1);
    rising *= (z + two_k - 1.0) * (z + two_k);
    power /= big_n * big_n;
  }
  return {result, last};
}

std::vector<cplx> series_log1p(std::span<const cplx> e) {
  const std::size_t n = e.size();
  std::vector<cplx> g(n, 0.0);
  // f = 1 + e, g' f = f'
  for (std::size_t k = 1; k < n; ++k) {
    cplx acc = static_cast<double>(k) * e[k];
    for (std::size_t j = 1; j < k; ++j) acc -= static_cast<double>(j) * g[j] * e[k - j];
    g[k] = acc / static_cast<double>(k);
  }
  return g;
}

std::vector<cplx> series_exp(std::span<const cplx> g) {
  const std::size_t n = g.size();
  std::vector<cplx> h(n, 0.0);
  if (n == 0) return h;
  h[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * g[j] * h[k - j];
    h[k] = acc / static_cast<double>(k);
  }
  return h;
}

std::vector<cplx> series_pow1p(std::span<const cplx> e, cplx power) {
  auto g = series_log1p(e);
  for (auto& c : g) c *= power;
  return series_exp(g);
}

double binomial(double alpha, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (alpha - i) / (i + 1);
  return c;
}

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double pairwise_sum(std::span<const double> values) { return pairwise_impl(values); }
cplx pairwise_sum(std::span<const cplx> values) { return pairwise_impl(values); }

}  // namespace fzeta::numeric

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fzeta/geometry/zeta.hpp"

using namespace fzeta;
using namespace fzeta::geometry;

namespace {

const double kD = std::log(2.0) / std::log(3.0);

cplx pw(double base, cplx s) { return std::exp(s * std::log(base)); }

// measure of the t-neighbourhood of a union of closed intervals, by merging
double merged_tube(std::vector<Interval> iv, double t) {
  std::sort(iv.begin(), iv.end());
  double total = 0.0, lo = iv[0].first - t, hi = iv[0].second + t;
  for (const auto& [a, b] : iv) {
    if (a - t > hi) {
      total += hi - lo;
      lo = a - t;
    }
    hi = std::max(hi, b + t);
  }
  return total + hi - lo;
}

std::vector<Interval> cantor_intervals(int level) {
  std::vector<Interval> iv{{0.0, 1.0}};
  for (int n = 0; n < level; ++n) {
    std::vector<Interval> next;
    for (const auto& [a, b] : iv) {
      const double w = (b - a) / 3.0;
      next.push_back({a, a + w});
      next.push_back({b - w, b});
    }
    iv.swap(next);
  }
  return iv;
}

// The limit set and its level-n iterate have the same t-tube once t covers the
// level-(n+1) gaps, so a brute-force merge over the iterate is exact there.
double cantor_tube_oracle(double t) {
  int n = 0;
  while (std::pow(3.0, -(n + 1)) / 2.0 > t) ++n;
  return merged_tube(cantor_intervals(n), t);
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

strings::FractalString a_string() { return strings::build(*strings::make_spec(strings::AString{1.0})); }

}  // namespace

TEST_CASE("distances to sets") {
  CHECK(distance_to_set(0.5, cantor_set()) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(distance_to_set(0.15, cantor_set()) == doctest::Approx(0.15 - 1.0 / 9.0).epsilon(1e-14));
  CHECK(distance_to_set(0.25, cantor_set()) < 1e-15);  // 0.0202... in base 3
  CHECK(distance_to_set(1.0 / 3.0, cantor_set()) < 1e-15);
  CHECK(distance_to_set(-0.2, cantor_set()) == doctest::Approx(0.2));
  CHECK(distance_to_set(Point2{0.5, 0.5}, carpet()) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(distance_to_set(Point2{0.5, 0.5}, square_boundary()) == doctest::Approx(0.5));
  CHECK(distance_to_set(Point2{1.5, 0.5}, carpet()) == doctest::Approx(0.5));
  // a-string points 1, 1/2, 1/3, ...: 0.4 sits between 1/3 and 1/2
  CHECK(distance_to_set(0.4, string_set(a_string())) == doctest::Approx(0.4 - 1.0 / 3.0));
}

TEST_CASE("Cantor tube function") {
  CHECK(tube_volume(cantor_set(), 1.0 / 6.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(cantor_tube_exact(1.0 / 6.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  for (double t : {0.4, 0.1, 0.037, 1e-3, 2.5e-5, 1e-6}) {
    const double oracle = cantor_tube_oracle(t);
    CHECK(tube_volume(cantor_set(), t) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(cantor_tube_exact(t) == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK(tube_volume(cantor_set(12), 0.1) == doctest::Approx(merged_tube(cantor_intervals(12), 0.1)).epsilon(1e-13));
  CHECK(tube_volume(cantor_set(12), 0.1) == doctest::Approx(cantor_tube_exact(0.1)).epsilon(1e-13));
  CHECK(code_of([] { cantor_tube_exact(0.6); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { cantor_tube_exact(0.0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("simple tubes") {
  const auto P = make_point_set({0.0});
  for (double t : {1.0, 0.1, 1e-5}) CHECK(tube_volume(P, t) == doctest::Approx(2.0 * t));
  const auto I = make_interval_union({{0.0, 1.0}, {2.0, 2.5}});
  CHECK(tube_volume(I, 0.1) == doctest::Approx(1.5 + 0.4));
  CHECK(tube_volume(I, 0.6) == doctest::Approx(3.7));
  // inside: 1 - (1-2t)^2 until the square fills at t = 1/2; outside: four strips and four quarter discs
  for (double t : {0.05, 0.3, 0.5, 0.8}) {
    const double inside = t < 0.5 ? 4.0 * t * (1.0 - t) : 1.0;
    CHECK(tube_volume(square_boundary(), t) == doctest::Approx(inside + 4.0 * t + kPi * t * t).epsilon(1e-12));
  }
}

TEST_CASE("one-dimensional distance zeta") {
  const auto P = make_point_set({0.0});
  for (cplx s : {cplx{1.0}, cplx{0.5, 2.0}, cplx{2.5}}) {
    CHECK(std::abs(distance_zeta_1d(P, s, 1.0) - 2.0 / s) < 1e-14);
    CHECK(std::abs(distance_zeta_1d(P, s, 0.3) - 2.0 * pw(0.3, s) / s) < 1e-14);
  }
  for (double delta : {0.5, 0.1, 0.01})
    CHECK(std::abs(distance_zeta_1d(cantor_set(), 1.0, delta) - tube_volume(cantor_set(), delta)) < 1e-12);

  // Cantor: outer pieces plus each gap g, counted twice from its midpoint
  for (cplx s : {cplx{0.9, 0.5}, cplx{1.7, -2.0}}) {
    cplx direct = 2.0 * pw(0.5, s) / s;
    for (int n = 1; n < 120; ++n) direct += std::pow(2.0, n - 1) * 2.0 * pw(0.5 * std::pow(3.0, -n), s) / s;
    CHECK(std::abs(distance_zeta_1d(cantor_set(), s, 0.5) - direct) < 1e-12);
  }
  CHECK(code_of([] { distance_zeta_1d(cantor_set(), 0.5, 0.5); }) == ErrorCode::DivergentAt);
}

TEST_CASE("two-dimensional distance zeta") {
  Quadrature2d q;
  q.resolution = 512;
  q.interior_only = true;
  const auto sq = distance_zeta_2d(square_boundary(), 3.0, 1.0, q);
  // ∫ over the unit square of the distance to its boundary: four triangles
  const double interior = 8.0 * std::pow(2.0, -3.0) / (3.0 * 2.0);
  CHECK(sq.value.real() == doctest::Approx(interior).epsilon(1e-5));

  const double d = 1.0 / 3.0;
  Quadrature2d c;
  c.resolution = 512;
  for (double s : {3.0, 4.0}) {
    const auto r = distance_zeta_2d(carpet(), s, d, c);
    const double closed = 8.0 / (std::pow(2.0, s) * s * (s - 1.0) * (std::pow(3.0, s) - 8.0)) +
                          2.0 * kPi * std::pow(d, s) / s + 4.0 * std::pow(d, s - 1.0) / (s - 1.0);
    CHECK(std::abs(r.value.real() - closed) / closed < 0.01);
  }
  // at s = 2 the integrand is one: the area of the neighbourhood
  const double area = 1.0 + 4.0 * d + kPi * d * d;
  CHECK(distance_zeta_2d(carpet(), 2.0, d, c).value.real() == doctest::Approx(area).epsilon(1e-3));
  CHECK(tube_volume(carpet(), d) == doctest::Approx(area).epsilon(1e-12));
  q.resolution = 100;
  CHECK(code_of([&] { distance_zeta_2d(carpet(), 3.0, d, q); }) == ErrorCode::GridTooCoarse);
}

TEST_CASE("tube zeta from samples") {
  const double c = 0.7;
  const int per_decade = 200;
  const double h = std::log(10.0) / per_decade;
  // trapezoid rule in log t on e^{(s-1)τ}: relative error about h^2 |s-1|^2 / 12
  auto bound = [h](cplx w) { return 1.05 * h * h * std::norm(w) / 12.0 + 1e-12; };
  const auto tube = sample_tube([c](double) { return c; }, 1, 1e-8, 0.5, per_decade);
  for (cplx s : {cplx{1.5}, cplx{2.0, 1.0}}) {
    const auto z = tube_zeta_numeric(tube, s, 0.5);
    const cplx expected = c * pw(0.5, s - 1.0) / (s - 1.0);
    CHECK(std::abs(z.value - expected) / std::abs(expected) < bound(s - 1.0));
  }
  const auto linear = sample_tube([](double t) { return 3.0 * t; }, 1, 1e-8, 0.5, per_decade);
  const auto z = tube_zeta_numeric(linear, 0.5, 0.5);
  const double expected = 3.0 * std::pow(0.5, 0.5) / 0.5;
  CHECK(std::abs(z.value - expected) / expected < bound(0.5));
}

TEST_CASE("tube sampling") {
  const auto tube = sample_tube(cantor_set(), 1e-6, 0.1, 50);
  REQUIRE(tube.samples.size() >= 250);
  CHECK(tube.samples.front().t == doctest::Approx(0.1));
  CHECK(tube.samples.back().t == doctest::Approx(1e-6));
  for (std::size_t i = 1; i < tube.samples.size(); ++i) {
    CHECK(tube.samples[i].t < tube.samples[i - 1].t);
    CHECK(tube.samples[i].volume <= tube.samples[i - 1].volume);
  }
  for (const auto& smp : tube.samples) CHECK(smp.exact);
  CHECK_FALSE(sample_tube(cantor_set(6), 1e-3, 0.1, 10).samples.empty());

  std::stringstream io;
  write_csv(io, tube);
  const auto back = read_tube_csv(io, 1);
  REQUIRE(back.samples.size() == tube.samples.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i) CHECK(back.samples[i].volume == tube.samples[i].volume);
}

TEST_CASE("set descriptions round-trip through JSON") {
  for (const auto& A : {cantor_set(), generalized_cantor_set(3, 0.2, 4), carpet(3), square_boundary(2.0),
                        make_interval_union({{0.0, 1.0}, {3.0, 4.0}}), scaled(cantor_set(), 2.0)}) {
    const auto B = set_from_json(set_to_json(A));
    CHECK(B.describe() == A.describe());
    CHECK(tube_volume(B, 0.01) == tube_volume(A, 0.01));
  }
}

// ---- properties --------------------------------------------------------------

TEST_CASE("functional equation between distance and tube zeta functions") {
  std::mt19937_64 rng(5);
  struct Case {
    BoundedSet set;
    double lo;
  };
  for (const auto& [A, lo] : {Case{cantor_set(), kD + 0.05}, Case{string_set(a_string()), 0.55}}) {
    std::uniform_real_distribution<double> re(lo, 2.5), im(-10.0, 10.0);
    for (int i = 0; i < 20; ++i) {
      const cplx s{re(rng), im(rng)};
      const double delta = 0.5;
      const cplx lhs = distance_zeta_1d(A, s, delta);
      const cplx rhs = pw(delta, s - 1.0) * tube_volume(A, delta) + (1.0 - s) * tube_zeta_1d(A, s, delta).value;
      CHECK(std::abs(lhs - rhs) < 1e-8);
    }
    CHECK(std::abs(distance_zeta_1d(A, 1.0, 0.5) - tube_volume(A, 0.5)) < 1e-12);
  }
}

TEST_CASE("tube volume is monotone in t") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-7.0, 0.0);
  for (const auto& A : {cantor_set(), generalized_cantor_set(2, 0.25), string_set(a_string()), carpet()}) {
    std::vector<double> ts;
    for (int i = 0; i < 200; ++i) ts.push_back(std::pow(10.0, u(rng)) * 0.5);
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 1; i < ts.size(); ++i) CHECK(tube_volume(A, ts[i - 1]) <= tube_volume(A, ts[i]));
  }
}

TEST_CASE("scaling an interval union scales tubes and distance zeta exactly") {
  const auto A = make_interval_union({{0.0, 0.25}, {0.5, 0.5}, {0.7, 1.0}});
  for (double lambda : {0.125, 2.0, 8.0}) {
    const auto B = scaled(A, lambda);
    for (double t : {0.01, 0.1, 0.3}) CHECK(tube_volume(B, lambda * t) == doctest::Approx(lambda * tube_volume(A, t)).epsilon(1e-14));
    for (cplx s : {cplx{1.5, 1.0}, cplx{2.0}, cplx{3.2, -4.0}}) {
      const cplx a = distance_zeta_1d(A, s, 0.2), b = distance_zeta_1d(B, s, lambda * 0.2);
      CHECK(std::abs(b - pw(lambda, s) * a) < 1e-13 * std::abs(b));
    }
  }
}

TEST_CASE("carpet iterates follow the square-by-square partial sums") {
  const double d = 1.0 / 3.0, s = 3.0;
  const double outer = 2.0 * kPi * std::pow(d, s) / s + 4.0 * std::pow(d, s - 1.0) / (s - 1.0);
  const double per_square = 8.0 * std::pow(2.0, -s) / (s * (s - 1.0));  // unit square, scales as side^s
  Quadrature2d q;
  q.resolution = 512;
  q.use_square_formula = true;
  double partial = outer, previous = 0.0;
  for (int level = 1; level <= 5; ++level) {
    partial += std::pow(8.0, level - 1) * per_square * std::pow(3.0, -level * s);
    const double v = distance_zeta_2d(carpet(level), s, d, q).value.real();
    CHECK(v == doctest::Approx(partial).epsilon(1e-3));
    CHECK(v > previous);
    previous = v;
  }
}

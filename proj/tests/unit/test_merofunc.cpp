#include <doctest.h>

#include <cmath>
#include <random>

#include "fzeta/merofunc/contour.hpp"
#include "fzeta/merofunc/moran.hpp"
#include "fzeta/strings/fractal_string.hpp"

using namespace fzeta;
using namespace fzeta::merofunc;

namespace {

const double kLog3 = std::log(3.0);
const double kD = std::log(2.0) / kLog3;
const double kP = 2.0 * kPi / kLog3;

cplx pw(double base, cplx s) { return std::exp(s * std::log(base)); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidSpec;
}

}  // namespace

TEST_CASE("Cantor geometric zeta values") {
  const auto C = catalog_cantor_geometric();
  CHECK(eval(C, 1.0) == cplx{1.0});
  CHECK(std::abs(eval(C, 0.0) - (-1.0)) < 1e-15);
  const auto L = strings::build(*strings::make_spec(strings::CantorString{}));
  for (cplx s : {cplx{kD + 0.5}, cplx{kD + 0.5, 3.0}}) {
    const auto p = strings::geometric_zeta_partial(L, s, 1e-13);
    CHECK(std::abs(eval(C, s) - p.value) < 1e-10);
  }
  CHECK(C.meta.D_abs == doctest::Approx(kD));
  CHECK(*C.meta.D_mer == -kInf);
}

TEST_CASE("Cantor geometric residues by contour") {
  const auto C = catalog_cantor_geometric();
  for (int k = -2; k <= 2; ++k) {
    const auto r = residue_numeric(C, {kD, k * kP}, 0.1);
    CHECK(std::abs(r.value - 1.0 / (2.0 * kLog3)) < 1e-10);
  }
}

TEST_CASE("contour machinery on explicit functions") {
  const auto simple = [](cplx s) { return 1.0 / (s - 2.0); };
  CHECK(std::abs(residue_numeric(simple, 2.0, 0.1).value - 1.0) < 1e-14);
  CHECK(std::abs(laurent_coeff(simple, 2.0, 2, 0.1).value) < 1e-14);
  CHECK(std::abs(laurent_coeff(simple, 2.0, 1, 0.1).value - residue_numeric(simple, 2.0, 0.1).value) == 0.0);

  const cplx i{0.0, 1.0};
  const auto double_pole = [i](cplx s) { return 1.0 / ((s - i) * (s - i)); };
  const auto o = order_numeric(double_pole, i, 0.1);
  CHECK(o.order == 2);
  CHECK_FALSE(o.essential_suspect);

  // a zero sitting on the circle
  CHECK(code_of([] { order_numeric([](cplx s) { return (s - 0.1) / s; }, 0.0, 0.1); }) == ErrorCode::ZeroOnContour);
}

TEST_CASE("nth-order Cantor strings") {
  CHECK(code_of([] { catalog_nth_order_cantor(0); }) == ErrorCode::InvalidOrder);
  const auto one = catalog_nth_order_cantor(1);
  for (cplx s : {cplx{1.3, 2.0}, cplx{-0.5, 0.7}}) CHECK(rel(eval(one, s), eval(catalog_cantor_geometric(), s)) < 1e-14);

  for (int n = 1; n <= 4; ++n) {
    const auto Z = catalog_nth_order_cantor(n);
    for (int k = -1; k <= 1; ++k) CHECK(order_numeric(Z, {kD, k * kP}, 0.1).order == n);
  }
  // near ω: 3^s - 2 ≈ 2 log3 (s-ω), numerator 3^ω = 2, so c_{-2} = 2 / (2 log3)^2
  const auto c2 = laurent_coeff(catalog_nth_order_cantor(2), kD, 2, 0.1);
  CHECK(std::abs(c2.value - 2.0 / std::pow(2.0 * kLog3, 2)) < 1e-10);
}

TEST_CASE("extended self-similar strings") {
  const auto one = catalog_constant(1.0);
  const auto E = catalog_extended_self_similar(one, {1.0 / 3.0, 1.0 / 3.0});
  for (cplx s : {cplx{1.2, 0.4}, cplx{0.3, -2.0}})
    CHECK(rel(eval(E, s) * pw(3.0, -s), eval(catalog_cantor_geometric(), s)) < 1e-13);
  const auto poles = poles_in_window(E, -1.0, 1.0, -7.0, 7.0);
  REQUIRE(poles.size() == 3);
  for (const auto& p : poles) {
    CHECK(p.location.real() == doctest::Approx(kD));
    CHECK(std::remainder(p.location.imag(), kP) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.status == "ok");
  }

  const auto quarter = catalog_extended_self_similar(one, {0.25, 0.25});
  bool found_half = false;
  for (const auto& p : poles_in_window(quarter, -1.0, 1.0, -1.0, 1.0))
    found_half = found_half || std::abs(p.location - 0.5) < 1e-12;
  CHECK(found_half);

  const auto nested = catalog_extended_self_similar(catalog_cantor_geometric(), {1.0 / 3.0, 1.0 / 3.0});
  for (cplx s : {cplx{1.3}, cplx{0.9, 4.0}}) {
    const cplx x = pw(3.0, s);
    CHECK(rel(eval(nested, s), x / ((x - 2.0) * (x - 2.0))) < 1e-13);
  }
  for (const auto& p : poles_in_window(nested, -1.0, 1.0, -7.0, 7.0)) {
    CHECK(p.order == 2);
    CHECK(order_numeric(nested, p.location, 0.1).order == 2);
  }
  CHECK(code_of([] { catalog_extended_self_similar(catalog_constant(1.0), {0.7, 0.5}); }) == ErrorCode::InvalidRatios);
}

TEST_CASE("infinite-order Cantor series") {
  const auto L = catalog_cantor_infinite_order(160);
  CHECK(std::abs(eval(L, 1.0) - (std::exp(1.0) - 1.0) / 3.0) < 1e-14);
  // brute force (1/9) Σ 1/((n!)^2 7^n)
  double acc = 0.0, fact = 1.0;
  for (int n = 1; n < 30; ++n) {
    fact *= n;
    acc += 1.0 / (fact * fact * std::pow(7.0, n));
  }
  CHECK(std::abs(eval(L, 2.0) - acc / 9.0) < 1e-15);

  for (int n = 1; n <= 5; ++n) {
    const auto c = laurent_coeff(L, kD, n, 0.1);
    CHECK(std::abs(c.value) > 1e-12);
    CHECK(c.error < std::abs(c.value));
  }
  CHECK(order_numeric(L, kD, 0.1).essential_suspect);
  const auto poles = catalog_poles(L, -1.0, 1.0, -1.0, 1.0);
  REQUIRE(poles.size() == 1);
  CHECK(poles[0].essential);
  // too close to the lattice for a 3-term truncation
  CHECK(code_of([] { eval(catalog_cantor_infinite_order(3), cplx{kD + 1e-3, 0.0}); }) == ErrorCode::TruncationUnstable);
}

TEST_CASE("distance zeta of the Cantor string") {
  const auto A = catalog_distance_string(catalog_cantor_geometric(), 0.5);
  CHECK(std::abs(eval(A, 1.0) - 2.0) < 1e-14);  // |A_δ| = 1 + 2δ
  CHECK(code_of([] { catalog_distance_string(catalog_cantor_geometric(), 0.1); }) == ErrorCode::DeltaTooSmall);

  const auto poles = poles_in_window(A, -1.0, 1.0, -12.0, 12.0);
  CHECK(poles.size() == 5);  // s = 0 is removable here: 2ζ_L(0) + 2 = 0
  for (const auto& p : poles) {
    const cplx w = p.location;
    CHECK(w.real() == doctest::Approx(kD));
    CHECK(rel(p.residue, pw(2.0, -w) / (kLog3 * w)) < 1e-12);
  }
}

TEST_CASE("generalized Cantor distance zeta") {
  const double m = 2, a = 1.0 / 3.0;
  const auto G = catalog_generalized_cantor_distance(2, a, 0.5);
  const double D = std::log(m) / std::log(1.0 / a);
  CHECK(G.meta.D_abs == doctest::Approx(kD));
  const double g = (1.0 - m * a) / (2.0 * (m - 1.0));
  const double expected = (1.0 - m * a) / (D * std::log(1.0 / a)) * std::pow(g, D - 1.0);
  CHECK(std::abs(residue_numeric(G, D, 0.1).value - expected) < 1e-10);
  CHECK(catalog_generalized_cantor_distance(3, 0.2, 0.5).meta.D_abs == doctest::Approx(std::log(3.0) / std::log(5.0)));
  CHECK(code_of([] { catalog_generalized_cantor_distance(2, 0.6, 0.5); }) == ErrorCode::InvalidParameters);

  // C^(2,1/4): lattice 1/2 + (2π/log4)iℤ
  const auto Q = catalog_generalized_cantor_distance(2, 0.25, 0.5);
  const auto poles = poles_in_window(Q, -0.5, 1.0, -10.0, 10.0);
  REQUIRE(poles.size() == 5);
  for (const auto& p : poles) {
    CHECK(p.location.real() == doctest::Approx(0.5));
    CHECK(std::remainder(p.location.imag(), 2.0 * kPi / std::log(4.0)) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("Sierpinski carpet distance zeta") {
  const auto S = catalog_sierpinski_carpet(1.0 / 3.0);
  const double direct = 8.0 / (8.0 * 3.0 * 2.0 * 19.0) + 2.0 * kPi / 81.0 + 4.0 / 9.0 / 2.0;
  CHECK(std::abs(eval(S, 3.0) - direct) < 1e-15);
  const cplx v4 = eval(S, 4.0);
  CHECK(v4.real() > 0.0);
  CHECK(v4.imag() == 0.0);
  CHECK(code_of([] { catalog_sierpinski_carpet(0.1); }) == ErrorCode::DeltaTooSmall);

  const double D8 = std::log(8.0) / kLog3;
  const auto principal = poles_in_window(S, 1.5, 2.0, -10.0, 10.0);
  REQUIRE(principal.size() == 3);
  for (const auto& p : principal) {
    const cplx w = p.location;
    CHECK(w.real() == doctest::Approx(D8));
    const cplx expected = pw(2.0, -w) / (kLog3 * w * (w - 1.0));
    CHECK(rel(p.residue, expected) < 1e-12);
    CHECK(rel(residue_numeric(S, w, 0.1).value, expected) < 1e-8);
  }
  const auto all = poles_in_window(S, -1.0, 3.0, -10.0, 10.0);
  CHECK(all.size() == 5);

  // numeric search without the catalog
  const auto found = poles_in_window([&S](cplx s) { return eval(S, s); }, 1.5, 2.0, -10.0, 10.0);
  REQUIRE(found.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(found[i].location - principal[i].location) < 1e-8);
}

TEST_CASE("fractal grill shifts the poles") {
  const auto A = catalog_distance_string(catalog_cantor_geometric(), 0.5);
  const auto G = catalog_grill(A, 1);
  for (cplx s : {cplx{2.0, 0.5}, cplx{1.8, -3.0}}) CHECK(rel(eval(G, s), eval(A, s - 1.0) + eval(A, s)) < 1e-13);
  CHECK(catalog_grill(A, 2).meta.D_abs == doctest::Approx(2.0 + kD));
  const auto poles = poles_in_window(G, 1.5, 2.0, -7.0, 7.0);
  REQUIRE(poles.size() == 3);
  for (const auto& p : poles) {
    CHECK(p.location.real() == doctest::Approx(1.0 + kD));
    CHECK(order_numeric(G, p.location, 0.1).order == 1);
  }
}

TEST_CASE("evaluation guards") {
  CHECK(eval(catalog_constant({2.0, -1.0}), {5.0, 7.0}) == cplx{2.0, -1.0});
  CHECK(code_of([] { eval(catalog_cantor_geometric(), cplx{kD, 1e-10}); }) == ErrorCode::PoleProximity);
  CHECK(code_of([] { residue_numeric(catalog_cantor_geometric(), cplx{kD, 0.0}, 6.0); }) ==
        ErrorCode::ContourCrossesPole);
  CHECK_THROWS(catalog_by_name("not-a-catalog", 0.5));
}

TEST_CASE("expression trees round-trip through JSON") {
  for (const auto& Z : {catalog_sierpinski_carpet(0.4), catalog_cantor_infinite_order(20),
                        catalog_grill(catalog_distance_string(catalog_cantor_geometric(), 0.5), 2)}) {
    const auto back = expr_from_json(expr_to_json(*Z.expr));
    for (cplx s : {cplx{3.3, 0.2}, cplx{2.9, -4.0}}) CHECK(back->eval(s).value == Z.expr->eval(s).value);
  }
  CHECK_THROWS(expr_from_json(nlohmann::json{{"op", "sqrt"}}));
}

TEST_CASE("Moran roots") {
  const auto thirds = moran_roots({1.0 / 3.0, 1.0 / 3.0}, -12.0, 12.0);
  REQUIRE(thirds.size() == 5);
  for (std::size_t i = 0; i < thirds.size(); ++i) {
    const int k = static_cast<int>(i) - 2;
    CHECK(std::abs(thirds[i] - cplx{kD, k * kP}) < 1e-10);
  }
  const auto quarters = moran_roots({0.25, 0.25}, -1.0, 1.0);
  REQUIRE(quarters.size() == 1);
  CHECK(std::abs(quarters[0] - 0.5) < 1e-12);
  const auto half = moran_roots({0.5}, -10.0, 10.0);
  REQUIRE(half.size() == 3);
  CHECK(std::abs(half[1]) < 1e-12);
  CHECK(std::abs(half[2] - cplx{0.0, 2.0 * kPi / std::log(2.0)}) < 1e-10);
  for (cplx w : moran_roots({0.5, 0.25}, -20.0, 20.0)) CHECK(std::abs(moran_residual({0.5, 0.25}, w)) < 1e-10);
  CHECK(code_of([] { moran_roots({0.5, 0.6}, -1.0, 1.0); }) == ErrorCode::InvalidRatios);
}

// ---- properties --------------------------------------------------------------

TEST_CASE("catalog residues agree with contour residues") {
  const std::vector<ClosedZeta> families{
      catalog_cantor_geometric(),
      catalog_distance_string(catalog_cantor_geometric(), 0.5),
      catalog_generalized_cantor_distance(2, 0.25, 0.5),
      catalog_generalized_cantor_distance(3, 0.2, 0.5),
      catalog_sierpinski_carpet(1.0 / 3.0),
      catalog_extended_self_similar(catalog_constant(1.0), {0.5, 0.25}),
  };
  for (const auto& Z : families) {
    const double D = *Z.meta.D_abs;
    for (const auto& p : poles_in_window(Z, D - 0.01, D + 0.01, -30.0, 30.0)) {
      const double k = std::abs(p.location.imag());
      if (k > 0 && poles_in_window(Z, D - 0.01, D + 0.01, -30.0, p.location.imag()).size() > 6) continue;
      CHECK(rel(residue_numeric(Z, p.location, 0.1).value, p.residue) < 1e-8);
    }
  }
}

TEST_CASE("poles and residues are conjugate symmetric") {
  for (const auto& Z : {catalog_distance_string(catalog_cantor_geometric(), 0.5), catalog_sierpinski_carpet(0.5),
                        catalog_extended_self_similar(catalog_constant(1.0), {0.5, 0.25})}) {
    const auto poles = poles_in_window(Z, -2.0, 3.0, -15.0, 15.0);
    for (const auto& p : poles) {
      bool matched = false;
      for (const auto& q : poles)
        if (std::abs(q.location - std::conj(p.location)) < 1e-9 && std::abs(q.residue - std::conj(p.residue)) < 1e-12)
          matched = true;
      CHECK(matched);
    }
  }
}

TEST_CASE("scaling multiplies values by lambda^s and residues by lambda^omega") {
  const auto A = catalog_distance_string(catalog_cantor_geometric(), 0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(0.7, 3.0), im(-8.0, 8.0);
  for (double lambda : {1.0 / 3.0, 2.0}) {
    const auto B = scale(A, lambda);
    for (int i = 0; i < 10; ++i) {
      const cplx s{re(rng), im(rng)};
      CHECK(rel(eval(B, s), pw(lambda, s) * eval(A, s)) < 1e-12);
    }
    const auto pa = poles_in_window(A, -1.0, 1.0, -6.0, 6.0);
    const auto pb = poles_in_window(B, -1.0, 1.0, -6.0, 6.0);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(rel(pb[i].residue, pw(lambda, pa[i].location) * pa[i].residue) < 1e-12);
  }
}

TEST_CASE("abscissae are ordered for every catalog") {
  for (const char* name : {"cantor-geometric", "cantor-distance", "nth-order-cantor:3", "cantor-infinite-order:40",
                           "generalized-cantor-distance:3:0.2", "sierpinski-carpet", "cantor-grill:2"}) {
    const auto Z = catalog_by_name(name, 0.5);
    const auto& m = Z.meta;
    if (m.D_mer && m.D_hol) CHECK(*m.D_mer <= *m.D_hol);
    if (m.D_hol && m.D_abs) CHECK(*m.D_hol <= *m.D_abs);
  }
}

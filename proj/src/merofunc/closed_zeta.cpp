#include "fzeta/merofunc/closed_zeta.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fzeta/merofunc/moran.hpp"
#include "fzeta/numeric/special.hpp"
#include "fzeta/strings/fractal_string.hpp"

namespace fzeta::merofunc {

namespace {

using nlohmann::json;
using numeric::real_pow;

const double kLog3 = std::log(3.0);

PoleFamily lattice(double re, double period, int order, std::function<cplx(cplx)> residue) {
  PoleFamily f;
  f.re = re;
  f.period = period;
  f.order = order;
  f.residue = std::move(residue);
  return f;
}

/// Moves every pole by `shift` and multiplies its leading coefficient by factor(new location).
PoleCatalog transformed(const PoleCatalog& c, double shift, const std::function<cplx(cplx)>& factor) {
  PoleCatalog out;
  for (const auto& p : c.finite) {
    FinitePole q = p;
    q.location += shift;
    q.residue *= factor(q.location);
    out.finite.push_back(q);
  }
  for (const auto& f : c.families) {
    PoleFamily g = f;
    g.re += shift;
    if (f.residue) g.residue = [r = f.residue, factor, shift](cplx w) { return r(w - shift) * factor(w); };
    if (f.points)
      g.points = [p = f.points, shift](double lo, double hi) {
        auto pts = p(lo, hi);
        for (auto& z : pts) z += shift;
        return pts;
      };
    if (f.distance) g.distance = [d = f.distance, shift](cplx s) { return d(s - shift); };
    if (f.numerator) g.numerator = [n = f.numerator, shift](cplx w) { return n(w - shift); };
    out.families.push_back(std::move(g));
  }
  return out;
}

void append(PoleCatalog& into, const PoleCatalog& more) {
  into.finite.insert(into.finite.end(), more.finite.begin(), more.finite.end());
  into.families.insert(into.families.end(), more.families.begin(), more.families.end());
}

std::optional<double> shifted_meta(std::optional<double> v, double c) {
  if (!v) return v;
  return *v + c;
}

bool is_constant_one(const ClosedZeta& Z) {
  return Z.expr->op == Expr::Op::Const && Z.expr->value == cplx{1.0};
}

ExprPtr moran_denominator(const std::vector<double>& ratios) {
  std::vector<ExprPtr> terms{constant(1.0)};
  for (double r : ratios) terms.push_back(mul({constant(-1.0), real_pow(r, var())}));
  return add(std::move(terms));
}

// Moran roots as a pole family with leading coefficient lead(ω)/Σ r_j^ω log(1/r_j).
PoleFamily moran_family(const std::vector<double>& ratios, std::function<cplx(cplx)> lead) {
  const double D = strings::moran_dimension(ratios);
  auto residue = [ratios, lead = std::move(lead)](cplx w) { return lead(w) / -moran_derivative(ratios, w); };
  if (equal_ratios(ratios)) return lattice(D, 2.0 * kPi / -std::log(ratios.front()), 1, residue);
  PoleFamily f;
  f.re = D;
  f.residue = residue;
  f.points = [ratios](double lo, double hi) { return moran_roots(ratios, lo, hi); };
  f.distance = [ratios](cplx s) {
    const cplx d = moran_derivative(ratios, s);
    return d == cplx{0.0} ? kInf : std::abs(moran_residual(ratios, s) / d);
  };
  return f;
}

cplx eval_or_nan(const ClosedZeta& Z, cplx s) {
  try {
    return eval(Z, s);
  } catch (const Error&) {
    return {std::nan(""), 0.0};
  }
}

json optional_number(std::optional<double> v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return *v;
}

json complex_json(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return nullptr;
  return {z.real(), z.imag()};
}

}  // namespace

std::vector<cplx> PoleFamily::points_in(double im_lo, double im_hi) const {
  if (points) return points(im_lo, im_hi);
  std::vector<cplx> out;
  if (!(period > 0.0)) {
    if (im_lo <= 0.0 && 0.0 <= im_hi) out.push_back({re, 0.0});
    return out;
  }
  const double k_lo = std::ceil(im_lo / period - 1e-12), k_hi = std::floor(im_hi / period + 1e-12);
  if (k_hi - k_lo > 1e6) throw Error(ErrorCode::InvalidParameters, "window holds too many lattice points");
  for (double k = k_lo; k <= k_hi; ++k) out.push_back({re, k * period});
  return out;
}

double PoleFamily::distance_to(cplx s) const {
  if (distance) return distance(s);
  if (!(period > 0.0)) return std::abs(s - cplx{re, 0.0});
  const double k = std::round(s.imag() / period);
  return std::abs(s - cplx{re, k * period});
}

ClosedZeta catalog_constant(cplx c) {
  return {"constant", constant(c), {.D_abs = -kInf, .D_hol = -kInf, .D_mer = -kInf, .first_length = std::nullopt}, PoleCatalog{}};
}

ClosedZeta catalog_cantor_geometric() {
  const double D = std::log(2.0) / kLog3;
  PoleCatalog cat;
  cat.families.push_back(lattice(D, 2.0 * kPi / kLog3, 1, [](cplx) { return cplx{1.0 / (2.0 * kLog3)}; }));
  auto s = var();
  return {"cantor-geometric", constant(1.0) / (real_pow(3.0, s) - constant(2.0)),
          {.D_abs = D, .D_hol = D, .D_mer = -kInf, .first_length = 1.0 / 3.0}, cat};
}

ClosedZeta catalog_extended_self_similar(const ClosedZeta& zeta0, const std::vector<double>& ratios) {
  validate_ratios(ratios);
  const double D = strings::moran_dimension(ratios);
  PoleCatalog cat;
  const bool one = is_constant_one(zeta0);
  const bool lattice_case = equal_ratios(ratios);
  const double period = lattice_case ? 2.0 * kPi / -std::log(ratios.front()) : 0.0;

  // poles of ζ₀ are divided by 1 - Σ r^s, except a lattice that coincides with the Moran lattice,
  // where the orders add
  std::optional<PoleFamily> merged;
  if (zeta0.catalog) {
    PoleCatalog rest{zeta0.catalog->finite, {}};
    for (const auto& f : zeta0.catalog->families) {
      const bool same = lattice_case && !f.points && std::abs(f.re - D) < 1e-12 && std::abs(f.period - period) < 1e-12;
      if (same && !merged) {
        PoleFamily g = f;
        g.order = f.order + 1;
        if (f.residue) g.residue = [r = f.residue, ratios](cplx w) { return r(w) / -moran_derivative(ratios, w); };
        merged = std::move(g);
      } else {
        rest.families.push_back(f);
      }
    }
    append(cat, transformed(rest, 0.0, [ratios](cplx w) { return 1.0 / -moran_residual(ratios, w); }));
  }
  if (merged) {
    cat.families.push_back(*merged);
  } else {
    PoleFamily f = moran_family(ratios, [zeta0](cplx w) { return eval_or_nan(zeta0, w); });
    if (!one) {
      f.cancellation_unverified = true;
      f.numerator = [zeta0](cplx w) { return eval_or_nan(zeta0, w); };
    }
    cat.families.push_back(std::move(f));
  }

  Meta meta;
  meta.D_abs = zeta0.meta.D_abs ? std::max(*zeta0.meta.D_abs, D) : D;
  meta.D_hol = meta.D_abs;
  meta.D_mer = zeta0.meta.D_mer;
  std::optional<PoleCatalog> catalog;
  if (zeta0.catalog) catalog = cat;
  return {"extended-self-similar(" + zeta0.name + ")", zeta0.expr / moran_denominator(ratios), meta, catalog};
}

ClosedZeta catalog_nth_order_cantor(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidOrder, "order must be at least 1");
  const double D = std::log(2.0) / kLog3;
  PoleCatalog cat;
  cat.families.push_back(lattice(D, 2.0 * kPi / kLog3, n, [n](cplx w) {
    // 3^s - 2 ≈ 3^ω log 3 (s - ω) = 2 log 3 (s - ω)
    return real_pow(3.0, (n - 1.0) * w) / std::pow(2.0 * kLog3, n);
  }));
  auto s = var();
  auto num = real_pow(3.0, mul({constant(n - 1.0), s}));
  auto den = ipow(real_pow(3.0, s) - constant(2.0), n);
  return {"nth-order-cantor:" + std::to_string(n), num / den,
          {.D_abs = D, .D_hol = D, .D_mer = -kInf, .first_length = 1.0 / 3.0}, cat};
}

ClosedZeta catalog_infinite_order(const ClosedZeta& zeta0, const std::vector<double>& ratios, int n_max) {
  validate_ratios(ratios);
  if (n_max < 1) throw Error(ErrorCode::InvalidOrder, "series truncation must be at least 1");
  const double D = strings::moran_dimension(ratios);
  PoleCatalog cat;
  if (zeta0.catalog) cat.finite = zeta0.catalog->finite, cat.families = zeta0.catalog->families;
  PoleFamily f = moran_family(ratios, [](cplx) { return cplx{0.0}; });
  f.essential = true;
  f.residue = nullptr;
  cat.families.push_back(std::move(f));
  const double d = zeta0.meta.D_abs ? std::max(*zeta0.meta.D_abs, D) : D;
  std::optional<PoleCatalog> catalog;
  if (zeta0.catalog) catalog = cat;
  return {"infinite-order(" + zeta0.name + ")", zeta0.expr * factorial_series(moran_denominator(ratios), n_max),
          {.D_abs = d, .D_hol = d, .D_mer = d, .first_length = std::nullopt}, catalog};
}

ClosedZeta catalog_cantor_infinite_order(int n_max) {
  if (n_max < 1) throw Error(ErrorCode::InvalidOrder, "series truncation must be at least 1");
  const double D = std::log(2.0) / kLog3;
  PoleCatalog cat;
  PoleFamily f = lattice(D, 2.0 * kPi / kLog3, 1, nullptr);
  f.essential = true;
  cat.families.push_back(std::move(f));
  auto s = var();
  auto expr = real_pow(3.0, mul({constant(-1.0), s})) * factorial_series(real_pow(3.0, s) - constant(2.0), n_max);
  return {"cantor-infinite-order:" + std::to_string(n_max), expr,
          {.D_abs = D, .D_hol = D, .D_mer = D, .first_length = 1.0 / 9.0}, cat};
}

ClosedZeta catalog_distance_string(const ClosedZeta& zetaL, double delta) {
  if (!zetaL.meta.first_length) throw Error(ErrorCode::InvalidParameters, "string zeta lacks its first length");
  if (!(delta >= *zetaL.meta.first_length / 2.0))
    throw Error(ErrorCode::DeltaTooSmall, "delta must be at least half the first length");
  auto s = var();
  auto u = real_pow(2.0, constant(1.0) - s) / s;
  auto v = mul({constant(2.0), real_pow(delta, s)}) / s;

  std::optional<PoleCatalog> catalog;
  if (zetaL.catalog) {
    PoleCatalog cat = transformed(*zetaL.catalog, 0.0, [](cplx w) { return real_pow(2.0, 1.0 - w) / w; });
    // residue at 0 of u ζ_L + v is 2 ζ_L(0) + 2
    const cplx r0 = 2.0 * eval(zetaL, 0.0) + 2.0;
    cat.finite.push_back({0.0, 1, r0, std::abs(r0) < 1e-12});
    catalog = cat;
  }
  Meta meta;
  meta.D_abs = zetaL.meta.D_abs ? std::max(*zetaL.meta.D_abs, 0.0) : zetaL.meta.D_abs;
  meta.D_hol = meta.D_abs;
  meta.D_mer = zetaL.meta.D_mer;
  return {"distance(" + zetaL.name + ")", u * zetaL.expr + v, meta, catalog};
}

ClosedZeta catalog_generalized_cantor_distance(int m, double a, double delta) {
  if (m < 2 || !(a > 0.0) || !(m * a < 1.0))
    throw Error(ErrorCode::InvalidParameters, "generalized Cantor set requires m >= 2 and 0 < a < 1/m");
  const double g = (1.0 - m * a) / (2.0 * (m - 1));
  if (!(delta >= g)) throw Error(ErrorCode::DeltaTooSmall, "delta must be at least half the first gap");
  const double T = -std::log(a);
  const double D = std::log(static_cast<double>(m)) / T;
  auto s = var();
  auto first = mul({real_pow(g, s - constant(1.0)), constant(1.0 - m * a)}) /
               mul({s, constant(1.0) - mul({constant(m), real_pow(a, s)})});
  auto expr = first + mul({constant(2.0), real_pow(delta, s)}) / s;

  PoleCatalog cat;
  cat.families.push_back(lattice(D, 2.0 * kPi / T, 1, [g, m, a, T](cplx w) {
    return real_pow(g, w - 1.0) * (1.0 - m * a) / (w * T);
  }));
  const cplx r0 = (1.0 - m * a) / (g * (1.0 - m)) + 2.0;
  cat.finite.push_back({0.0, 1, r0, std::abs(r0) < 1e-12});
  std::ostringstream name;
  name << "generalized-cantor-distance:" << m << ":" << a;
  return {name.str(), expr, {.D_abs = D, .D_hol = D, .D_mer = -kInf, .first_length = std::nullopt}, cat};
}

ClosedZeta catalog_sierpinski_carpet(double delta) {
  if (!(delta > 1.0 / 6.0)) throw Error(ErrorCode::DeltaTooSmall, "carpet zeta needs delta > 1/6");
  const double D = std::log(8.0) / kLog3;
  auto s = var();
  auto one = constant(1.0);
  auto first = constant(8.0) / mul({real_pow(2.0, s), s, s - one, real_pow(3.0, s) - constant(8.0)});
  auto second = mul({constant(2.0 * kPi), real_pow(delta, s)}) / s;
  auto third = mul({constant(4.0), real_pow(delta, s - one)}) / (s - one);

  PoleCatalog cat;
  cat.families.push_back(lattice(D, 2.0 * kPi / kLog3, 1, [](cplx w) {
    return real_pow(2.0, -w) / (kLog3 * w * (w - 1.0));
  }));
  cat.finite.push_back({0.0, 1, cplx{8.0 / 7.0 + 2.0 * kPi}, false});
  cat.finite.push_back({1.0, 1, cplx{-0.8 + 4.0}, false});
  return {"sierpinski-carpet", first + second + third, {.D_abs = D, .D_hol = D, .D_mer = -kInf, .first_length = std::nullopt}, cat};
}

ClosedZeta catalog_grill(const ClosedZeta& zetaA, int m) {
  if (m < 1) throw Error(ErrorCode::InvalidParameters, "grill dimension must be at least 1");
  std::vector<ExprPtr> terms;
  PoleCatalog cat;
  for (int k = 0; k <= m; ++k) {
    const double c = numeric::binomial(m, k);
    const double shift = m - k;
    terms.push_back(mul({constant(c), shifted(zetaA.expr, shift)}));
    if (zetaA.catalog) append(cat, transformed(*zetaA.catalog, shift, [c](cplx) { return cplx{c}; }));
  }
  Meta meta{shifted_meta(zetaA.meta.D_abs, m), shifted_meta(zetaA.meta.D_hol, m), shifted_meta(zetaA.meta.D_mer, m),
            std::nullopt};
  std::optional<PoleCatalog> catalog;
  if (zetaA.catalog) catalog = cat;
  return {"grill:" + std::to_string(m) + "(" + zetaA.name + ")", add(std::move(terms)), meta, catalog};
}

ClosedZeta scale(const ClosedZeta& Z, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidParameters, "scale factor must be positive");
  ClosedZeta out = Z;
  std::ostringstream name;
  name << lambda << "*" << Z.name;
  out.name = name.str();
  out.expr = real_pow(lambda, var()) * Z.expr;
  if (Z.catalog) out.catalog = transformed(*Z.catalog, 0.0, [lambda](cplx w) { return real_pow(lambda, w); });
  if (Z.meta.first_length) out.meta.first_length = lambda * *Z.meta.first_length;
  return out;
}

std::vector<std::string> catalog_names() {
  return {"cantor-geometric",        "cantor-distance",       "nth-order-cantor:<n>",
          "cantor-infinite-order[:<n_max>]", "generalized-cantor-distance:<m>:<a>", "sierpinski-carpet",
          "cantor-grill:<m>"};
}

ClosedZeta catalog_by_name(const std::string& name, double delta) {
  std::vector<std::string> parts;
  std::stringstream in(name);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  if (parts.empty()) throw Error(ErrorCode::ConfigParse, "empty catalog name");
  auto number = [&](std::size_t i) {
    if (i >= parts.size()) throw Error(ErrorCode::ConfigParse, "catalog '" + name + "' needs more parameters");
    try {
      return std::stod(parts[i]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigParse, "bad catalog parameter '" + parts[i] + "'");
    }
  };
  const auto& kind = parts[0];
  if (kind == "cantor-geometric") return catalog_cantor_geometric();
  if (kind == "cantor-distance") return catalog_distance_string(catalog_cantor_geometric(), delta);
  if (kind == "nth-order-cantor") return catalog_nth_order_cantor(static_cast<int>(number(1)));
  if (kind == "cantor-infinite-order")
    return catalog_cantor_infinite_order(parts.size() > 1 ? static_cast<int>(number(1)) : 160);
  if (kind == "generalized-cantor-distance")
    return catalog_generalized_cantor_distance(static_cast<int>(number(1)), number(2), delta);
  if (kind == "sierpinski-carpet") return catalog_sierpinski_carpet(delta);
  if (kind == "cantor-grill")
    return catalog_grill(catalog_distance_string(catalog_cantor_geometric(), delta), static_cast<int>(number(1)));
  throw Error(ErrorCode::ConfigParse, "unknown catalog '" + name + "'");
}

double guard_radius(cplx s) { return 1e-8 * (1.0 + std::abs(s)); }

Estimate<cplx> eval_with_error(const ClosedZeta& Z, cplx s) {
  const double guard = guard_radius(s);
  if (Z.catalog) {
    for (const auto& p : Z.catalog->finite)
      if (std::abs(s - p.location) < guard) throw Error(ErrorCode::PoleProximity, "s is within the guard radius of a pole");
    for (const auto& f : Z.catalog->families)
      if (f.distance_to(s) < guard) throw Error(ErrorCode::PoleProximity, "s is within the guard radius of a pole");
  }
  const auto v = Z.expr->eval(s);
  if (!std::isfinite(v.value.real()) || !std::isfinite(v.value.imag()))
    throw Error(ErrorCode::PoleProximity, "zeta value is not finite at this s");
  if (!(v.error <= 1e-12 * std::abs(v.value)))
    throw Error(ErrorCode::TruncationUnstable, "series truncation is not accurate at this s");
  return v;
}

cplx eval(const ClosedZeta& Z, cplx s) { return eval_with_error(Z, s).value; }

std::vector<PoleRecord> catalog_poles(const ClosedZeta& Z, double re_lo, double re_hi, double im_lo, double im_hi) {
  if (!Z.catalog) throw Error(ErrorCode::CatalogMissingAndSearchFailed, "no analytic catalog for " + Z.name);
  auto inside = [&](cplx w) {
    return w.real() >= re_lo && w.real() <= re_hi && w.imag() >= im_lo && w.imag() <= im_hi;
  };
  std::vector<PoleRecord> raw;
  for (const auto& p : Z.catalog->finite)
    if (!p.removable && inside(p.location)) raw.push_back({p.location, p.order, false, p.residue});
  for (const auto& f : Z.catalog->families) {
    if (f.period > 0.0 && (f.re < re_lo || f.re > re_hi)) continue;
    for (cplx w : f.points_in(im_lo, im_hi)) {
      if (!inside(w)) continue;
      PoleRecord r{w, f.order, f.essential, f.residue ? f.residue(w) : cplx{std::nan(""), std::nan("")}};
      if (f.cancellation_unverified) {
        r.status = "unverified";
        if (f.numerator && std::abs(f.numerator(w)) < 1e-10) r.status = "cancelled";
      }
      if (r.status != "cancelled") raw.push_back(r);
    }
  }

  // coincident entries from different summands: the higher order wins, equal orders add
  std::vector<PoleRecord> out;
  for (const auto& r : raw) {
    auto same = std::find_if(out.begin(), out.end(), [&](const PoleRecord& o) {
      return std::abs(o.location - r.location) <= 1e-9 * (1.0 + std::abs(r.location));
    });
    if (same == out.end()) {
      out.push_back(r);
    } else if (r.essential || same->essential) {
      same->essential = true;
    } else if (r.order > same->order) {
      *same = r;
    } else if (r.order == same->order) {
      same->residue += r.residue;
    }
  }
  std::sort(out.begin(), out.end(), [](const PoleRecord& a, const PoleRecord& b) {
    return a.location.imag() != b.location.imag() ? a.location.imag() < b.location.imag()
                                                  : a.location.real() < b.location.real();
  });
  return out;
}

json zeta_to_json(const ClosedZeta& Z) {
  json j;
  j["name"] = Z.name;
  j["expr"] = expr_to_json(*Z.expr);
  j["meta"] = {{"D_abs", optional_number(Z.meta.D_abs)},
               {"D_hol", optional_number(Z.meta.D_hol)},
               {"D_mer", optional_number(Z.meta.D_mer)}};
  if (Z.meta.first_length) j["meta"]["first_length"] = *Z.meta.first_length;
  if (Z.catalog) {
    json finite = json::array(), families = json::array();
    for (const auto& p : Z.catalog->finite)
      finite.push_back({{"location", complex_json(p.location)},
                        {"order", p.order},
                        {"residue", complex_json(p.residue)},
                        {"removable", p.removable}});
    for (const auto& f : Z.catalog->families) {
      json g = {{"re", f.re}, {"essential", f.essential}, {"cancellation_unverified", f.cancellation_unverified}};
      if (f.period > 0.0 && !f.points) g["period"] = f.period;
      if (!f.essential) g["order"] = f.order;
      families.push_back(g);
    }
    j["catalog"] = {{"finite", finite}, {"families", families}};
  } else {
    j["catalog"] = nullptr;
  }
  return j;
}

std::string to_string(Provenance p) { return p == Provenance::Analytic ? "analytic" : "numeric-contour"; }

void write_pole_csv(std::ostream& out, const std::vector<PoleRecord>& poles) {
  out << "re,im,order,res_re,res_im,provenance\n";
  out << std::setprecision(17);
  for (const auto& p : poles) {
    // + 0.0 turns -0 into 0 so equal records print identically
    out << p.location.real() + 0.0 << ',' << p.location.imag() + 0.0 << ',';
    if (p.essential)
      out << "essential";
    else
      out << p.order;
    out << ',' << p.residue.real() + 0.0 << ',' << p.residue.imag() + 0.0 << ',' << to_string(p.provenance) << '\n';
  }
}

json poles_to_json(const std::vector<PoleRecord>& poles) {
  json arr = json::array();
  for (const auto& p : poles) {
    json r = {{"re", p.location.real()},
              {"im", p.location.imag()},
              {"order", p.essential ? json("essential") : json(p.order)},
              {"residue", complex_json(p.residue)},
              {"provenance", to_string(p.provenance)}};
    if (p.status != "ok") r["status"] = p.status;
    arr.push_back(r);
  }
  return arr;
}

std::vector<PoleRecord> poles_from_json(const json& j) {
  std::vector<PoleRecord> out;
  try {
    for (const auto& r : j) {
      PoleRecord p;
      p.location = {r.at("re").get<double>(), r.at("im").get<double>()};
      if (r.at("order").is_string()) {
        p.essential = true;
      } else {
        p.order = r["order"].get<int>();
      }
      if (r.contains("residue") && !r["residue"].is_null())
        p.residue = {r["residue"].at(0).get<double>(), r["residue"].at(1).get<double>()};
      else
        p.residue = {std::nan(""), std::nan("")};
      p.provenance = r.value("provenance", std::string("analytic")) == "analytic" ? Provenance::Analytic
                                                                                 : Provenance::NumericContour;
      p.status = r.value("status", std::string("ok"));
      out.push_back(p);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigParse, std::string("malformed pole list: ") + e.what());
  }
  return out;
}

}  // namespace fzeta::merofunc

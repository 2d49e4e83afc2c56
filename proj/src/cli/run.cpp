#include "fzeta/cli/run.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fzeta/analysis/checks.hpp"
#include "fzeta/analysis/minkowski.hpp"
#include "fzeta/geometry/tube.hpp"
#include "fzeta/geometry/zeta.hpp"
#include "fzeta/merofunc/contour.hpp"
#include "fzeta/merofunc/moran.hpp"
#include "fzeta/strings/fractal_string.hpp"

namespace fzeta::cli {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return format_number(z.real());
  const std::string im = format_number(std::abs(z.imag()));
  return format_number(z.real()) + (z.imag() < 0 ? "-" : "+") + im + "i";
}

namespace {

// The operation currently running, reported with any error.
thread_local std::string g_stage;

struct Stage {
  explicit Stage(std::string name) { g_stage = std::move(name); }
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigParse, msg); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string p;
  while (std::getline(in, p, sep)) parts.push_back(p);
  return parts;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) config_error("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    config_error("bad number '" + s + "'");
  }
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v)) config_error("expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

// JSON text, @file, or nothing (caller handles names).
std::optional<json> maybe_json(const std::string& text) {
  try {
    if (!text.empty() && text[0] == '@') {
      std::ifstream in(text.substr(1));
      if (!in) config_error("cannot open '" + text.substr(1) + "'");
      return json::parse(in);
    }
    if (!text.empty() && text[0] == '{') return json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  return std::nullopt;
}

// Portable uniform double in [0, 1) from a 64-bit engine.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

// ---- targets ---------------------------------------------------------------

strings::SpecPtr parse_spec(const std::string& text) {
  if (auto j = maybe_json(text)) return strings::spec_from_json(*j);
  const auto p = split(text, ':');
  if (p.empty()) config_error("empty string spec");
  const auto arg = [&p, &text](std::size_t i) {
    if (i >= p.size()) config_error("spec '" + text + "' needs more parameters");
    return p[i];
  };
  if (p[0] == "cantor") return strings::make_spec(strings::CantorString{});
  if (p[0] == "a-string") return strings::make_spec(strings::AString{p.size() > 1 ? to_double(p[1]) : 1.0});
  if (p[0] == "trivial") return strings::make_spec(strings::Trivial{p.size() > 1 ? to_double(p[1]) : 1.0});
  if (p[0] == "nth-order-cantor") return strings::make_spec(strings::NthOrderCantor{to_int(arg(1))});
  if (p[0] == "generalized-cantor")
    return strings::make_spec(strings::GeneralizedCantor{to_int(arg(1)), to_double(arg(2))});
  config_error("unknown string spec '" + text + "'");
}

// A bounded set plus whatever is known about it in closed form.
struct Target {
  std::string name;
  geometry::BoundedSet set;
  std::optional<double> dimension;
  std::optional<double> period;
  std::function<merofunc::ClosedZeta(double delta)> catalog;       // distance zeta catalog
  std::function<merofunc::Function(double delta)> distance_zeta;  // analytic continuation, when no catalog
};

Target parse_set(const std::string& text) {
  Target t;
  t.name = text;
  if (auto j = maybe_json(text)) {
    t.set = geometry::set_from_json(*j);
    return t;
  }
  const auto p = split(text, ':');
  if (p.empty()) config_error("empty set name");
  const auto arg = [&p, &text](std::size_t i) {
    if (i >= p.size()) config_error("set '" + text + "' needs more parameters");
    return p[i];
  };
  const std::string& kind = p[0];
  if (kind == "cantor") {
    const int level = p.size() > 1 ? to_int(p[1]) : -1;
    t.set = geometry::cantor_set(level);
    if (level < 0) {
      t.dimension = std::log(2.0) / std::log(3.0);
      t.period = std::log(3.0);
      t.catalog = [](double delta) { return merofunc::catalog_by_name("cantor-distance", delta); };
    }
  } else if (kind == "generalized-cantor") {
    const int m = to_int(arg(1));
    const double a = to_double(arg(2));
    const int level = p.size() > 3 ? to_int(p[3]) : -1;
    t.set = geometry::generalized_cantor_set(m, a, level);
    if (level < 0) {
      t.dimension = std::log(m) / std::log(1.0 / a);
      t.period = std::log(1.0 / a);
      t.catalog = [m, a](double delta) { return merofunc::catalog_generalized_cantor_distance(m, a, delta); };
    }
  } else if (kind == "carpet") {
    const int level = p.size() > 1 ? to_int(p[1]) : -1;
    t.set = geometry::carpet(level);
    if (level < 0) {
      t.dimension = std::log(8.0) / std::log(3.0);
      t.period = std::log(3.0);
      t.catalog = [](double delta) { return merofunc::catalog_sierpinski_carpet(delta); };
    }
  } else if (kind == "a-string") {
    const double a = p.size() > 1 ? to_double(p[1]) : 1.0;
    t.set = geometry::string_set(strings::build(*strings::make_spec(strings::AString{a})));
    t.dimension = 1.0 / (1.0 + a);
    t.distance_zeta = [a](double delta) -> merofunc::Function {
      const double first = 1.0 - std::pow(2.0, -a);
      if (delta < first / 2.0) throw Error(ErrorCode::DeltaTooSmall, "delta must be at least half the first length");
      return [a, delta](cplx s) {
        return std::exp((1.0 - s) * std::log(2.0)) / s * strings::a_string_zeta(a, s).value +
               2.0 * std::exp(s * std::log(delta)) / s;
      };
    };
  } else if (kind == "square") {
    t.set = geometry::square_boundary(p.size() > 1 ? to_double(p[1]) : 1.0);
    t.dimension = 1.0;
  } else if (kind == "point") {
    t.set = geometry::make_point_set({0.0});
    t.dimension = 0.0;
  } else if (kind == "interval") {
    t.set = geometry::make_interval_union({{to_double(arg(1)), to_double(arg(2))}});
    t.dimension = 1.0;
  } else {
    config_error("unknown set '" + text + "'");
  }
  return t;
}

// ---- output ----------------------------------------------------------------

struct Output {
  std::ostream* stream;
  std::ofstream file;
  std::string format;
};

void emit_json(Output& o, json j) {
  j["schema_version"] = kSchemaVersion;
  *o.stream << j.dump(2) << '\n';
}

// ---- shared pipeline steps -----------------------------------------------------

geometry::TubeSamples tube_for(const RunConfig& cfg, const Target& t) {
  Stage stage("geometry.sample_tube");
  return geometry::sample_tube(t.set, cfg.t_min, cfg.t_max, cfg.per_decade);
}

geometry::TubeSamples load_tube(const RunConfig& cfg, const Target* t) {
  if (!cfg.tube_csv.empty()) {
    Stage stage("geometry.read_tube_csv");
    std::ifstream in(cfg.tube_csv);
    if (!in) config_error("cannot open '" + cfg.tube_csv + "'");
    return geometry::read_tube_csv(in, t ? t->set.ambient_dim() : 1);
  }
  if (!t) config_error("need --set or --tube-csv");
  return tube_for(cfg, *t);
}

std::optional<double> period_for(const RunConfig& cfg, const Target* t) {
  if (cfg.period) return cfg.period;
  if (t) return t->period;
  return std::nullopt;
}

analysis::MinkowskiFit fit_for(const RunConfig& cfg, const geometry::TubeSamples& tube, const Target* t) {
  Stage stage("analysis.fit_minkowski");
  analysis::FitOptions opt;
  opt.period = period_for(cfg, t);
  return analysis::fit_minkowski(tube, opt);
}

struct TubeResidues {
  analysis::PeriodicProfile profile;
  std::vector<merofunc::PoleRecord> tube;
  std::vector<merofunc::PoleRecord> distance;
};

TubeResidues tube_residues(const RunConfig& cfg, const geometry::TubeSamples& tube, double D, double T) {
  TubeResidues r;
  {
    Stage stage("analysis.extract_G");
    r.profile = analysis::extract_G(tube, D, T, 4096, std::max(cfg.k_max, 64));
  }
  {
    Stage stage("analysis.fourier_residues");
    r.tube = analysis::fourier_residues(r.profile, D, cfg.k_max);
  }
  Stage stage("analysis.distance_residues_from_tube");
  r.distance = analysis::distance_residues_from_tube(r.tube, tube.N);
  return r;
}

// Real principal residue of the distance zeta at D by contour integration.
std::optional<merofunc::PoleRecord> principal_residue(const RunConfig& cfg, const Target& t) {
  if (!t.dimension) return std::nullopt;
  Stage stage("merofunc.residue_numeric");
  merofunc::PoleRecord rec;
  rec.location = *t.dimension;
  rec.provenance = merofunc::Provenance::NumericContour;
  if (t.catalog) {
    rec.residue = merofunc::residue_numeric(t.catalog(cfg.delta), *t.dimension, cfg.radius).value;
  } else if (t.distance_zeta) {
    rec.residue = merofunc::residue_numeric(t.distance_zeta(cfg.delta), *t.dimension, cfg.radius).value;
  } else {
    return std::nullopt;
  }
  return rec;
}

std::vector<cplx> sample_points(const RunConfig& cfg, double lo, double hi) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<cplx> pts;
  for (int i = 0; i < cfg.points; ++i) {
    const double re = lo + (hi - lo) * uniform(rng);
    const double im = -5.0 + 10.0 * uniform(rng);
    pts.emplace_back(re, im);
  }
  return pts;
}

analysis::Report check_functional_equation(const RunConfig& cfg, const Target& t) {
  const int N = t.set.ambient_dim();
  double D = t.dimension.value_or(-1.0);
  if (!t.dimension) D = fit_for(cfg, tube_for(cfg, t), &t).D;
  Stage stage("analysis.verify_functional_equation");
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;
  return analysis::verify_functional_equation(t.set, sample_points(cfg, D + 0.1, N + 1.0), cfg.delta, tol);
}

analysis::Report check_residue_content(const RunConfig& cfg, const Target& t, const geometry::TubeSamples& tube,
                                       const analysis::MinkowskiFit& fit) {
  std::vector<merofunc::PoleRecord> records;
  if (auto rec = principal_residue(cfg, t)) {
    records.push_back(*rec);
  } else if (auto T = period_for(cfg, &t)) {
    records = tube_residues(cfg, tube, fit.D, *T).distance;
  }
  Stage stage("analysis.verify_residue_content");
  const double tol = cfg.tol > 0.0 ? cfg.tol : 0.02;
  return analysis::verify_residue_content(fit, records, tube.N, tol);
}

// Tube-derived distance residues against contour residues of the closed form.
analysis::Report check_residue_catalog(const RunConfig& cfg, const Target& t, const TubeResidues& tr) {
  analysis::Report r;
  r.check = "residue-catalog";
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-3;
  r.inputs = {{"set", t.name}, {"delta", cfg.delta}, {"k_max", cfg.k_max}, {"tol", tol}};
  r.details = json::array();
  r.pass = true;
  const auto Z = t.catalog(cfg.delta);
  Stage stage("merofunc.residue_numeric");
  for (const auto& rec : tr.distance) {
    const auto ref = merofunc::residue_numeric(Z, rec.location, cfg.radius);
    // lattice residues do not depend on delta, so any admissible delta compares
    const double rel = std::abs(rec.residue - ref.value) / std::abs(ref.value);
    r.defects.push_back(rel);
    r.pass = r.pass && rel < tol;
    r.details.push_back({{"location", cjson(rec.location)}, {"tube", cjson(rec.residue)}, {"contour", cjson(ref.value)}});
  }
  return r;
}

json report_json(const analysis::Report& r) { return analysis::report_to_json(r); }

// ---- commands ----------------------------------------------------------------

int cmd_construct(const RunConfig& cfg, Output& o) {
  json j;
  if (!cfg.spec.empty()) {
    Stage stage("strings.build");
    const auto spec = parse_spec(cfg.spec);
    const auto L = strings::build(*spec);
    json groups = json::array();
    for (const auto& g : L.groups(10)) groups.push_back({{"length", g.length}, {"multiplicity", g.multiplicity}});
    const auto ab = strings::abscissa_estimate(L);
    j = {{"kind", "string"},
         {"description", strings::describe(*spec)},
         {"spec", strings::spec_to_json(*spec)},
         {"first_groups", groups},
         {"total_length", strings::total_length(L)},
         {"abscissa", {{"value", ab.value}, {"lo", ab.lo}, {"hi", ab.hi}, {"analytic", ab.analytic}}}};
  } else if (!cfg.catalog.empty()) {
    Stage stage("merofunc.catalog_by_name");
    j = {{"kind", "catalog"}, {"zeta", merofunc::zeta_to_json(merofunc::catalog_by_name(cfg.catalog, cfg.delta))}};
  } else if (!cfg.set.empty()) {
    Stage stage("geometry.set");
    const auto t = parse_set(cfg.set);
    j = {{"kind", "set"},
         {"set", geometry::set_to_json(t.set)},
         {"description", t.set.describe()},
         {"ambient_dim", t.set.ambient_dim()},
         {"exact", t.set.exact()}};
  } else {
    config_error("construct needs --spec, --catalog or --set");
  }
  emit_json(o, j);
  return kOk;
}

int cmd_eval(const RunConfig& cfg, Output& o) {
  if (!cfg.s) config_error("eval needs --s RE IM");
  const cplx s = *cfg.s;
  Estimate<cplx> v;
  if (!cfg.catalog.empty()) {
    Stage stage("merofunc.eval");
    v = merofunc::eval_with_error(merofunc::catalog_by_name(cfg.catalog, cfg.delta), s);
  } else if (!cfg.spec.empty()) {
    Stage stage("strings.geometric_zeta_partial");
    const auto p = strings::geometric_zeta_partial(strings::build(*parse_spec(cfg.spec)), s, cfg.eps);
    v = {p.value, p.error};
  } else if (!cfg.set.empty()) {
    const auto t = parse_set(cfg.set);
    if (t.set.ambient_dim() == 1) {
      Stage stage("geometry.distance_zeta_1d");
      v = {geometry::distance_zeta_1d(t.set, s, cfg.delta, cfg.eps), cfg.eps};
    } else {
      Stage stage("geometry.distance_zeta_2d");
      geometry::Quadrature2d q;
      q.resolution = cfg.resolution;
      v = geometry::distance_zeta_2d(t.set, s, cfg.delta, q);
    }
  } else {
    config_error("eval needs --catalog, --spec or --set");
  }
  const std::string fmt = cfg.format.empty() ? "text" : cfg.format;
  if (fmt == "text") {
    *o.stream << format_complex(v.value) << '\n';
  } else if (fmt == "csv") {
    *o.stream << "s_re,s_im,re,im,error\n"
              << format_number(s.real()) << ',' << format_number(s.imag()) << ',' << format_number(v.value.real())
              << ',' << format_number(v.value.imag()) << ',' << format_number(v.error) << '\n';
  } else {
    emit_json(o, {{"s", cjson(s)}, {"value", cjson(v.value)}, {"error", v.error}});
  }
  return kOk;
}

std::array<double, 2> re_window(const RunConfig& cfg, const merofunc::ClosedZeta& Z) {
  if (cfg.re_range) return *cfg.re_range;
  return {-2.0, Z.meta.D_abs.value_or(2.0) + 1.0};
}

void emit_poles(const RunConfig& cfg, Output& o, const std::vector<merofunc::PoleRecord>& poles, json extra) {
  if ((cfg.format.empty() ? "csv" : cfg.format) == "csv") {
    merofunc::write_pole_csv(*o.stream, poles);
    return;
  }
  extra["poles"] = merofunc::poles_to_json(poles);
  emit_json(o, extra);
}

int cmd_poles(const RunConfig& cfg, Output& o) {
  if (cfg.catalog.empty()) config_error("poles needs --catalog");
  const auto Z = merofunc::catalog_by_name(cfg.catalog, cfg.delta);
  const auto re = re_window(cfg, Z);
  std::vector<merofunc::PoleRecord> poles;
  if (cfg.numeric) {
    Stage stage("merofunc.poles_in_window(numeric)");
    poles = merofunc::poles_in_window([&Z](cplx s) { return merofunc::eval(Z, s); }, re[0], re[1], cfg.im_range[0],
                                      cfg.im_range[1]);
  } else {
    Stage stage("merofunc.poles_in_window");
    poles = merofunc::poles_in_window(Z, re[0], re[1], cfg.im_range[0], cfg.im_range[1]);
  }
  emit_poles(cfg, o, poles,
             {{"catalog", cfg.catalog}, {"re_range", re}, {"im_range", cfg.im_range}, {"numeric", cfg.numeric}});
  return kOk;
}

int cmd_residues(const RunConfig& cfg, Output& o) {
  if (!cfg.catalog.empty()) {
    const auto Z = merofunc::catalog_by_name(cfg.catalog, cfg.delta);
    const auto re = re_window(cfg, Z);
    std::vector<merofunc::PoleRecord> poles;
    {
      Stage stage("merofunc.poles_in_window");
      poles = merofunc::poles_in_window(Z, re[0], re[1], cfg.im_range[0], cfg.im_range[1]);
    }
    std::vector<merofunc::PoleRecord> out;
    json rows = json::array();
    Stage stage("merofunc.laurent_coeff");
    for (const auto& p : poles) {
      if (p.essential) continue;
      // stay clear of the neighbouring poles
      double r = cfg.radius;
      for (const auto& q : poles)
        if (&q != &p) r = std::min(r, 0.4 * std::abs(q.location - p.location));
      auto rec = p;
      const auto c = merofunc::laurent_coeff(Z, p.location, p.order, r);
      rec.residue = c.value;
      rec.provenance = merofunc::Provenance::NumericContour;
      out.push_back(rec);
      rows.push_back({{"location", cjson(p.location)},
                      {"order", p.order},
                      {"analytic", cjson(p.residue)},
                      {"contour", cjson(c.value)},
                      {"error", c.error},
                      {"difference", std::abs(c.value - p.residue)}});
    }
    emit_poles(cfg, o, out, {{"catalog", cfg.catalog}, {"comparison", rows}});
    return kOk;
  }
  std::optional<Target> t;
  if (!cfg.set.empty()) t = parse_set(cfg.set);
  const auto tube = load_tube(cfg, t ? &*t : nullptr);
  const auto T = period_for(cfg, t ? &*t : nullptr);
  if (!T) config_error("residues from a tube need --period for this target");
  const double D = t && t->dimension ? *t->dimension : fit_for(cfg, tube, t ? &*t : nullptr).D;
  const auto tr = tube_residues(cfg, tube, D, *T);
  emit_poles(cfg, o, cfg.tube_zeta ? tr.tube : tr.distance,
             {{"target", t ? t->name : cfg.tube_csv},
              {"zeta", cfg.tube_zeta ? "tube" : "distance"},
              {"profile", analysis::profile_to_json(tr.profile)}});
  return kOk;
}

int cmd_tube(const RunConfig& cfg, Output& o) {
  if (cfg.set.empty()) config_error("tube needs --set");
  const auto t = parse_set(cfg.set);
  const auto tube = tube_for(cfg, t);
  if ((cfg.format.empty() ? "csv" : cfg.format) == "csv") {
    geometry::write_csv(*o.stream, tube);
    return kOk;
  }
  json rows = json::array();
  for (const auto& s : tube.samples) rows.push_back({{"t", s.t}, {"volume", s.volume}, {"exact", s.exact}});
  emit_json(o, {{"set", t.name}, {"N", tube.N}, {"samples", rows}});
  return kOk;
}

int cmd_fit(const RunConfig& cfg, Output& o) {
  std::optional<Target> t;
  if (!cfg.set.empty()) t = parse_set(cfg.set);
  const auto tube = load_tube(cfg, t ? &*t : nullptr);
  const auto fit = fit_for(cfg, tube, t ? &*t : nullptr);
  emit_json(o, {{"target", t ? t->name : cfg.tube_csv}, {"fit", analysis::fit_to_json(fit)}});
  return kOk;
}

int cmd_verify(const RunConfig& cfg, Output& o) {
  std::vector<analysis::Report> reports;
  const auto want = [&cfg](const char* name) { return cfg.check == name || cfg.check == "all"; };
  if (cfg.check.empty()) config_error("verify needs --check");
  if (want("functional-equation") || want("residue-content")) {
    if (cfg.set.empty()) config_error("this check needs --set");
    const auto t = parse_set(cfg.set);
    if (want("functional-equation")) reports.push_back(check_functional_equation(cfg, t));
    if (want("residue-content")) {
      const auto tube = tube_for(cfg, t);
      reports.push_back(check_residue_content(cfg, t, tube, fit_for(cfg, tube, &t)));
    }
  }
  if (want("moran") && (cfg.check == "moran" || !cfg.ratios.empty())) {
    Stage stage("analysis.moran_roots");
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-10;
    const auto roots = analysis::moran_roots(cfg.ratios, cfg.im_range[0], cfg.im_range[1], tol);
    analysis::Report r;
    r.check = "moran";
    r.inputs = {{"ratios", cfg.ratios}, {"im_range", cfg.im_range}, {"tol", tol}};
    r.details = json::array();
    r.pass = !roots.empty();
    for (cplx w : roots) {
      const double d = std::abs(merofunc::moran_residual(cfg.ratios, w));
      r.defects.push_back(d);
      r.pass = r.pass && d < std::sqrt(tol);
      r.details.push_back(cjson(w));
    }
    reports.push_back(r);
  }
  if (want("hyperfractal")) {
    Stage stage("analysis.hyperfractal_density");
    std::vector<long> m;
    for (int k = 0; k < cfg.K; ++k) m.push_back(cfg.m_start + k);
    analysis::Report r;
    r.check = "hyperfractal";
    r.inputs = {{"D", cfg.dimension}, {"m_start", cfg.m_start}, {"K", cfg.K}, {"window", cfg.window},
                {"gap_target", cfg.gap_target}};
    bool monotone = true;
    double prev = kInf;
    json gaps = json::array();
    for (int K = 1; K <= cfg.K; ++K) {
      const double g = analysis::hyperfractal_density(cfg.dimension, m, K, cfg.window);
      monotone = monotone && g <= prev;
      prev = g;
      gaps.push_back(g);
    }
    r.defects = {prev};
    r.pass = monotone && prev < cfg.gap_target;
    r.details = {{"gaps", gaps}, {"nonincreasing", monotone}};
    reports.push_back(r);
  }
  if (reports.empty()) config_error("unknown or inapplicable check '" + cfg.check + "'");

  json list = json::array();
  bool pass = true;
  for (const auto& r : reports) {
    list.push_back(report_json(r));
    pass = pass && r.pass;
  }
  emit_json(o, {{"checks", list}, {"pass", pass}});
  return pass ? kOk : kVerificationFailed;
}

json load_artifact(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::MissingArtifacts, "missing artifact " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MissingArtifacts, "unreadable artifact " + p.string() + ": " + e.what());
  }
}

int cmd_report(const RunConfig& cfg, Output& o) {
  json doc;
  if (!cfg.spec.empty()) {
    Stage stage("strings.build");
    const auto spec = parse_spec(cfg.spec);
    const auto L = strings::build(*spec);
    const auto ab = strings::abscissa_estimate(L);
    json table = json::array();
    Stage eval_stage("strings.geometric_zeta_partial");
    for (cplx s : {cplx{0.5}, cplx{1.0}, cplx{2.0}, cplx{1.0, 1.0}}) {
      if (s.real() <= ab.value) continue;
      const auto p = strings::geometric_zeta_partial(L, s, cfg.eps);
      table.push_back({{"s", cjson(s)}, {"value", cjson(p.value)}, {"error", p.error}});
    }
    doc = {{"target", {{"kind", "string"}, {"description", strings::describe(*spec)}}},
           {"D", ab.value},
           {"zeta_values", table}};
    emit_json(o, doc);
    return kOk;
  }

  if (!cfg.catalog.empty()) {
    // closed form against the numeric distance zeta of the matching set
    const auto Z = merofunc::catalog_by_name(cfg.catalog, cfg.delta);
    const std::string base = split(cfg.catalog, ':')[0];
    std::optional<Target> t;
    if (base == "sierpinski-carpet") t = parse_set("carpet");
    if (base == "cantor-distance") t = parse_set("cantor");
    if (base == "generalized-cantor-distance") {
      const auto p = split(cfg.catalog, ':');
      if (p.size() < 3) config_error("catalog '" + cfg.catalog + "' needs m and a");
      t = parse_set("generalized-cantor:" + p[1] + ":" + p[2]);
    }
    json table = json::array();
    if (t) {
      const int N = t->set.ambient_dim();
      const std::vector<double> points = N == 2 ? std::vector<double>{3.0, 4.0} : std::vector<double>{1.5, 2.0, 3.0};
      for (double s : points) {
        Stage stage(N == 2 ? "geometry.distance_zeta_2d" : "geometry.distance_zeta_1d");
        Estimate<cplx> num;
        if (N == 2) {
          geometry::Quadrature2d q;
          q.resolution = cfg.resolution;
          num = geometry::distance_zeta_2d(t->set, s, cfg.delta, q);
        } else {
          num = {geometry::distance_zeta_1d(t->set, s, cfg.delta, cfg.eps), cfg.eps};
        }
        const cplx closed = merofunc::eval(Z, s);
        table.push_back({{"s", s},
                         {"closed_form", closed.real()},
                         {"numeric", num.value.real()},
                         {"numeric_error", num.error},
                         {"relative_difference", std::abs(num.value - closed) / std::abs(closed)}});
      }
    }
    const auto re = re_window(cfg, Z);
    Stage stage("merofunc.poles_in_window");
    doc = {{"target", {{"kind", "catalog"}, {"name", cfg.catalog}}},
           {"D", Z.meta.D_abs ? json(*Z.meta.D_abs) : json(nullptr)},
           {"poles", merofunc::poles_to_json(merofunc::poles_in_window(Z, re[0], re[1], cfg.im_range[0], cfg.im_range[1]))},
           {"comparison", table}};
    emit_json(o, doc);
    return kOk;
  }

  if (cfg.set.empty()) config_error("report needs --set, --spec or --catalog");
  const auto t = parse_set(cfg.set);
  const auto tube = tube_for(cfg, t);
  json fit_json, residue_json;
  std::optional<analysis::MinkowskiFit> fit;
  std::optional<TubeResidues> tr;
  if (!cfg.artifacts.empty()) {
    Stage stage("report.load_artifacts");
    const std::filesystem::path dir(cfg.artifacts);
    fit_json = load_artifact(dir / "fit.json");
    residue_json = load_artifact(dir / "residues.json");
  }
  fit = fit_for(cfg, tube, &t);
  if (fit_json.is_null()) fit_json = analysis::fit_to_json(*fit);
  if (auto T = period_for(cfg, &t)) {
    tr = tube_residues(cfg, tube, t.dimension.value_or(fit->D), *T);
    if (residue_json.is_null())
      residue_json = {{"tube", merofunc::poles_to_json(tr->tube)}, {"distance", merofunc::poles_to_json(tr->distance)}};
  }

  json checks = json::array();
  bool pass = true;
  auto add = [&](const analysis::Report& r) {
    checks.push_back(report_json(r));
    pass = pass && r.pass;
  };
  add(check_functional_equation(cfg, t));
  add(check_residue_content(cfg, t, tube, *fit));
  if (tr && t.catalog) add(check_residue_catalog(cfg, t, *tr));

  doc = {{"target", {{"kind", "set"}, {"name", t.name}, {"description", t.set.describe()}}},
         {"D", fit->D},
         {"M_lower", fit->M_lower},
         {"M_upper", fit->M_upper},
         {"fit", fit_json},
         {"residues", residue_json},
         {"checks", checks},
         {"pass", pass}};
  if (tr) doc["profile"] = analysis::profile_to_json(tr->profile);
  emit_json(o, doc);
  return kOk;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigParse:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidParameters:
    case ErrorCode::InvalidRatios:
    case ErrorCode::InvalidOrder:
    case ErrorCode::DeltaTooSmall:
    case ErrorCode::MissingArtifacts:
      return kConfigError;
    default:
      return kNumericError;
  }
}

}  // namespace

void validate(const RunConfig& cfg) {
  static const std::vector<std::string> commands{"construct", "eval", "poles", "residues",
                                                 "tube",      "fit",  "verify", "report"};
  if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
    config_error("unknown command '" + cfg.command + "'");
  if (!(cfg.delta > 0.0)) config_error("--delta must be positive");
  if (!(cfg.eps > 0.0)) config_error("--eps must be positive");
  if (cfg.resolution < 2 || (cfg.resolution & (cfg.resolution - 1)) != 0)
    config_error("--resolution must be a power of two");
  if (cfg.k_max < 0) config_error("--k-max must be nonnegative");
  if (!(cfg.radius > 0.0)) config_error("--radius must be positive");
  if (!(cfg.im_range[0] <= cfg.im_range[1])) config_error("--im-range must be ordered");
  if (cfg.re_range && !((*cfg.re_range)[0] <= (*cfg.re_range)[1])) config_error("--re-range must be ordered");
  if (!(cfg.t_min > 0.0) || !(cfg.t_min < cfg.t_max)) config_error("need 0 < --t-min < --t-max");
  if (cfg.points < 1) config_error("--points must be positive");
  if (!cfg.format.empty() && cfg.format != "csv" && cfg.format != "json" && cfg.format != "text")
    config_error("--format must be csv, json or text");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  g_stage = "cli.validate";
  try {
    validate(cfg);
    Output o;
    o.stream = &out;
    if (!cfg.out.empty()) {
      o.file.open(cfg.out);
      if (!o.file) config_error("cannot write '" + cfg.out + "'");
      o.stream = &o.file;
    }
    o.stream->precision(17);
    static const std::map<std::string, int (*)(const RunConfig&, Output&)> table{
        {"construct", cmd_construct}, {"eval", cmd_eval}, {"poles", cmd_poles},   {"residues", cmd_residues},
        {"tube", cmd_tube},           {"fit", cmd_fit},   {"verify", cmd_verify}, {"report", cmd_report}};
    return table.at(cfg.command)(cfg, o);
  } catch (const Error& e) {
    err << "fzeta " << cfg.command << ": " << g_stage << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "fzeta " << cfg.command << ": " << g_stage << ": " << e.what() << '\n';
    return kNumericError;
  }
}

}  // namespace fzeta::cli

#include "fzeta/geometry/bounded_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fzeta::geometry {

namespace {

using nlohmann::json;
using strings::FractalString;
using strings::LengthGroup;

FractalString finite_gaps(std::vector<LengthGroup> groups, std::string name) {
  double total = 0.0;
  for (const auto& g : groups) total += g.length * g.multiplicity;
  return {strings::finite_lengths(std::move(groups)), total, 0.0, std::move(name), true};
}

// Gap groups of the C^(m,a) construction: level j ≥ 1 has (m-1) m^{j-1} gaps of length g a^{j-1}.
std::vector<LengthGroup> generalized_cantor_gap_levels(int m, double a, int levels) {
  const double g = (1.0 - m * a) / (m - 1);
  std::vector<LengthGroup> out;
  for (int j = 0; j < levels; ++j)
    out.push_back({g * std::pow(a, j), (m - 1) * std::pow(static_cast<double>(m), j)});
  return out;
}

GapView interval_gap_view(std::vector<Interval> intervals) {
  if (intervals.empty()) throw Error(ErrorCode::InvalidParameters, "empty set has no gap structure");
  std::sort(intervals.begin(), intervals.end());
  std::vector<Interval> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  GapView view{merged.front().first, merged.back().second, 0.0, finite_gaps({}, "none"), 0.0};
  std::vector<LengthGroup> gaps;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    view.measure += merged[i].second - merged[i].first;
    if (i > 0) gaps.push_back({merged[i].first - merged[i - 1].second, 1.0});
  }
  view.gaps = finite_gaps(std::move(gaps), "interval gaps");
  return view;
}

}  // namespace

int BoundedSet::ambient_dim() const {
  return std::holds_alternative<CarpetComplement>(rep) || std::holds_alternative<SquareBoundary>(rep) ? 2 : 1;
}

bool BoundedSet::exact() const {
  return std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return !r.residual.has_value();
        } else if constexpr (std::is_same_v<T, CantorIterate> || std::is_same_v<T, GeneralizedCantorIterate> ||
                             std::is_same_v<T, CarpetComplement>) {
          return r.level < 0;
        } else {
          return true;
        }
      },
      rep);
}

std::string BoundedSet::describe() const {
  std::ostringstream out;
  if (scale != 1.0) out << scale << "*";
  std::visit(
      [&out](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          out << "intervals(" << r.intervals.size() << ")";
        } else if constexpr (std::is_same_v<T, PointSet>) {
          out << "points(" << r.points.size() << (r.residual ? ",residual" : "") << ")";
        } else if constexpr (std::is_same_v<T, CantorIterate>) {
          out << "cantor(level=" << (r.level < 0 ? std::string("inf") : std::to_string(r.level)) << ")";
        } else if constexpr (std::is_same_v<T, GeneralizedCantorIterate>) {
          out << "generalized-cantor(m=" << r.m << ",a=" << r.a
              << ",level=" << (r.level < 0 ? std::string("inf") : std::to_string(r.level)) << ")";
        } else if constexpr (std::is_same_v<T, CarpetComplement>) {
          out << "carpet(level=" << (r.level < 0 ? std::string("inf") : std::to_string(r.level)) << ")";
        } else if constexpr (std::is_same_v<T, SquareBoundary>) {
          out << "square-boundary(" << r.side << ")";
        } else {
          out << "string-set(" << r.gaps.description() << ")";
        }
      },
      rep);
  return out.str();
}

BoundedSet make_interval_union(std::vector<Interval> intervals) {
  for (const auto& iv : intervals)
    if (!(iv.first <= iv.second)) throw Error(ErrorCode::InvalidParameters, "interval with lo > hi");
  std::sort(intervals.begin(), intervals.end());
  for (std::size_t i = 1; i < intervals.size(); ++i)
    if (intervals[i].first <= intervals[i - 1].second)
      throw Error(ErrorCode::InvalidParameters, "intervals must be disjoint");
  return {IntervalUnion{std::move(intervals)}};
}

BoundedSet make_point_set(std::vector<double> points, std::optional<Interval> residual) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return {PointSet{std::move(points), residual}};
}

BoundedSet cantor_set(int level) { return {CantorIterate{level}}; }

BoundedSet generalized_cantor_set(int m, double a, int level) {
  if (m < 2 || !(a > 0.0) || !(m * a < 1.0))
    throw Error(ErrorCode::InvalidParameters, "generalized Cantor set requires m >= 2 and 0 < m*a < 1");
  return {GeneralizedCantorIterate{m, a, level}};
}

BoundedSet carpet(int level) { return {CarpetComplement{level}}; }

BoundedSet square_boundary(double side) {
  if (!(side > 0.0)) throw Error(ErrorCode::InvalidParameters, "square side must be positive");
  return {SquareBoundary{side}};
}

BoundedSet string_set(const FractalString& L) {
  const double total = L.total_length_hint() ? *L.total_length_hint() : strings::total_length(L);
  return {GapRealization{L, total}};
}

BoundedSet string_to_set(const FractalString& L, int depth) {
  if (depth < 1) throw Error(ErrorCode::InvalidParameters, "depth must be at least 1");
  double a = L.total_length_hint() ? *L.total_length_hint() : strings::total_length(L);
  std::vector<double> points{a};
  auto e = L.enumerate();
  while (static_cast<int>(points.size()) < depth) {
    auto g = e->next();
    if (!g) break;
    for (double k = 0; k < g->multiplicity && static_cast<int>(points.size()) < depth; ++k) {
      a -= g->length;
      points.push_back(std::max(a, 0.0));
    }
  }
  const double last = points.back();
  if (L.finite() && static_cast<int>(points.size()) < depth) return make_point_set(std::move(points));
  return make_point_set(std::move(points), Interval{0.0, last});
}

BoundedSet scaled(const BoundedSet& A, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidParameters, "scale factor must be positive");
  BoundedSet out = A;
  out.scale *= lambda;
  return out;
}

GapView gap_view(const BoundedSet& A) {
  if (A.ambient_dim() != 1) throw Error(ErrorCode::InvalidParameters, "gap view needs a subset of the line");
  GapView view = std::visit(
      [](const auto& r) -> GapView {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          return interval_gap_view(r.intervals);
        } else if constexpr (std::is_same_v<T, PointSet>) {
          std::vector<Interval> ivs;
          for (double p : r.points) ivs.push_back({p, p});
          if (r.residual) ivs.push_back(*r.residual);
          GapView v = interval_gap_view(std::move(ivs));
          if (r.residual) v.unresolved_gap = r.residual->second - r.residual->first;
          return v;
        } else if constexpr (std::is_same_v<T, CantorIterate> || std::is_same_v<T, GeneralizedCantorIterate>) {
          int m = 2;
          double a = 1.0 / 3.0;
          if constexpr (std::is_same_v<T, GeneralizedCantorIterate>) {
            m = r.m;
            a = r.a;
          }
          const double g = (1.0 - m * a) / (m - 1);
          const double dim = std::log(static_cast<double>(m)) / std::log(1.0 / a);
          if (r.level < 0) {
            const double log_m1 = std::log(m - 1.0), log_m = std::log(static_cast<double>(m));
            FractalString gaps(strings::lattice_lengths(g, a, [=](long k) { return log_m1 + k * log_m; }), 1.0, dim,
                               "generalized-cantor gaps");
            return {0.0, 1.0, 0.0, std::move(gaps), 0.0};
          }
          return {0.0, 1.0, std::pow(m * a, r.level),
                  finite_gaps(generalized_cantor_gap_levels(m, a, r.level), "generalized-cantor gaps"),
                  g * std::pow(a, r.level)};
        } else if constexpr (std::is_same_v<T, GapRealization>) {
          return {0.0, r.total, 0.0, r.gaps, 0.0};
        } else {
          throw Error(ErrorCode::InvalidParameters, "gap view needs a subset of the line");
        }
      },
      A.rep);
  if (A.scale != 1.0) {
    const double c = A.scale;
    view.lo *= c;
    view.hi *= c;
    view.measure *= c;
    view.unresolved_gap *= c;
    const auto& g = view.gaps;
    view.gaps = FractalString(strings::scaled_lengths(c, g.factory()),
                              g.total_length_hint() ? std::optional<double>(c * *g.total_length_hint()) : std::nullopt,
                              g.analytic_abscissa(), g.description(), g.finite());
  }
  return view;
}

json set_to_json(const BoundedSet& A) {
  json j = std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          json ivs = json::array();
          for (const auto& iv : r.intervals) ivs.push_back({iv.first, iv.second});
          return {{"kind", "interval_union"}, {"intervals", ivs}};
        } else if constexpr (std::is_same_v<T, PointSet>) {
          json j = {{"kind", "point_set"}, {"points", r.points}};
          if (r.residual) j["residual"] = {r.residual->first, r.residual->second};
          return j;
        } else if constexpr (std::is_same_v<T, CantorIterate>) {
          return {{"kind", "cantor"}, {"level", r.level}};
        } else if constexpr (std::is_same_v<T, GeneralizedCantorIterate>) {
          return {{"kind", "generalized_cantor"}, {"m", r.m}, {"a", r.a}, {"level", r.level}};
        } else if constexpr (std::is_same_v<T, CarpetComplement>) {
          return {{"kind", "carpet"}, {"level", r.level}};
        } else if constexpr (std::is_same_v<T, SquareBoundary>) {
          return {{"kind", "square_boundary"}, {"side", r.side}};
        } else {
          return {{"kind", "string_set"}, {"string", r.gaps.description()}, {"total", r.total}};
        }
      },
      A.rep);
  if (A.scale != 1.0) j["scale"] = A.scale;
  return j;
}

BoundedSet set_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    BoundedSet out;
    if (kind == "interval_union") {
      std::vector<Interval> ivs;
      for (const auto& iv : j.at("intervals")) ivs.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
      out = make_interval_union(std::move(ivs));
    } else if (kind == "point_set") {
      std::optional<Interval> residual;
      if (j.contains("residual")) residual = Interval{j["residual"].at(0).get<double>(), j["residual"].at(1).get<double>()};
      out = make_point_set(j.at("points").get<std::vector<double>>(), residual);
    } else if (kind == "cantor") {
      out = cantor_set(j.value("level", -1));
    } else if (kind == "generalized_cantor") {
      out = generalized_cantor_set(j.at("m").get<int>(), j.at("a").get<double>(), j.value("level", -1));
    } else if (kind == "carpet") {
      out = carpet(j.value("level", -1));
    } else if (kind == "square_boundary") {
      out = square_boundary(j.value("side", 1.0));
    } else if (kind == "string_set") {
      out = string_set(strings::build(*strings::spec_from_json(j.at("string"))));
    } else {
      throw Error(ErrorCode::InvalidSpec, "unknown set kind '" + kind + "'");
    }
    if (j.contains("scale")) out = scaled(out, j.at("scale").get<double>());
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed set spec: ") + e.what());
  }
}

}  // namespace fzeta::geometry

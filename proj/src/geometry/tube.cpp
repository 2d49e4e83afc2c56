#include "fzeta/geometry/tube.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace fzeta::geometry {

namespace {

double distance_to_intervals(double x, const std::vector<Interval>& ivs) {
  // first interval with lo > x
  auto it = std::upper_bound(ivs.begin(), ivs.end(), x, [](double v, const Interval& iv) { return v < iv.first; });
  double best = kInf;
  if (it != ivs.end()) best = it->first - x;
  if (it != ivs.begin()) {
    const auto& prev = *std::prev(it);
    best = std::min(best, x <= prev.second ? 0.0 : x - prev.second);
  }
  return best;
}

double distance_generalized_cantor(double x, int m, double a, int level) {
  if (x <= 0.0) return -x;
  if (x >= 1.0) return x - 1.0;
  const double g = (1.0 - m * a) / (m - 1);
  const double step = a + g;
  double u = 0.0, w = 1.0;
  const int depth = level < 0 ? 2000 : level;
  for (int k = 0; k < depth && w > 1e-300; ++k) {
    const double y = (x - u) / w;
    int i = static_cast<int>(std::floor(y / step));
    i = std::clamp(i, 0, m - 1);
    const double offset = y - i * step;
    if (offset < 0.0) return -offset * w;  // rounding just left of a subinterval
    if (offset <= a) {
      u += i * step * w;
      w *= a;
      continue;
    }
    return std::min(offset - a, step - offset) * w;
  }
  return 0.0;
}

double distance_string_set(double x, const GapRealization& r) {
  if (x >= r.total) return x - r.total;
  if (x <= 0.0) return -x;
  // walk down the points a_1 = total > a_2 > ...
  auto e = r.gaps.enumerate();
  double a = r.total;
  while (auto g = e->next()) {
    const double span = g->length * g->multiplicity;
    if (a - span <= x) {
      const double steps = std::floor((a - x) / g->length);
      const double upper = a - steps * g->length;
      const double lower = upper - g->length;
      return std::max(0.0, std::min(upper - x, x - lower));
    }
    a -= span;
    if (a <= 0.0) break;
  }
  return 0.0;
}

double distance_to_box(Point2 p, double side) {
  const double dx = std::max({0.0, -p.x, p.x - side});
  const double dy = std::max({0.0, -p.y, p.y - side});
  return std::hypot(dx, dy);
}

double distance_carpet(Point2 p, int level) {
  if (p.x <= 0.0 || p.y <= 0.0 || p.x >= 1.0 || p.y >= 1.0) return distance_to_box(p, 1.0);
  double ox = 0.0, oy = 0.0, w = 1.0;
  const int depth = level < 0 ? 30 : level;
  for (int k = 0; k < depth; ++k) {
    const double third = w / 3.0;
    const int ix = std::clamp(static_cast<int>((p.x - ox) / third), 0, 2);
    const int iy = std::clamp(static_cast<int>((p.y - oy) / third), 0, 2);
    if (ix == 1 && iy == 1) {
      const double x0 = ox + third, y0 = oy + third;
      return std::max(0.0, std::min({p.x - x0, x0 + third - p.x, p.y - y0, y0 + third - p.y}));
    }
    ox += ix * third;
    oy += iy * third;
    w = third;
  }
  return 0.0;
}

double carpet_tube(double t, int level) {
  double inner = 0.0;
  const int depth = level < 0 ? 200 : level;
  double side = 1.0 / 3.0, count = 1.0;
  for (int k = 1; k <= depth && side > 2.0 * t; ++k) {
    inner += count * (side - 2.0 * t) * (side - 2.0 * t);
    side /= 3.0;
    count *= 8.0;
  }
  return 1.0 + 4.0 * t + kPi * t * t - inner;
}

std::vector<double> log_grid(double t_min, double t_max, int n_per_decade) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw Error(ErrorCode::InvalidParameters, "need 0 < t_min < t_max");
  if (n_per_decade < 1) throw Error(ErrorCode::InvalidParameters, "n_per_decade must be positive");
  const double decades = std::log10(t_max / t_min);
  const auto n = static_cast<std::size_t>(std::ceil(decades * n_per_decade - 1e-9));
  std::vector<double> ts;
  for (std::size_t i = 0; i <= n; ++i) ts.push_back(t_max * std::pow(10.0, -static_cast<double>(i) / n_per_decade));
  ts.back() = std::max(ts.back(), t_min);
  return ts;
}

}  // namespace

double distance_to_set(double x, const BoundedSet& A) {
  if (A.ambient_dim() != 1) throw Error(ErrorCode::InvalidParameters, "point and set dimensions differ");
  const double c = A.scale;
  const double y = x / c;
  const double d = std::visit(
      [y](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          return distance_to_intervals(y, r.intervals);
        } else if constexpr (std::is_same_v<T, PointSet>) {
          std::vector<Interval> ivs;
          for (double p : r.points) ivs.push_back({p, p});
          if (r.residual) ivs.push_back(*r.residual);
          std::sort(ivs.begin(), ivs.end());
          return distance_to_intervals(y, ivs);
        } else if constexpr (std::is_same_v<T, CantorIterate>) {
          return distance_generalized_cantor(y, 2, 1.0 / 3.0, r.level);
        } else if constexpr (std::is_same_v<T, GeneralizedCantorIterate>) {
          return distance_generalized_cantor(y, r.m, r.a, r.level);
        } else if constexpr (std::is_same_v<T, GapRealization>) {
          return distance_string_set(y, r);
        } else {
          return kInf;
        }
      },
      A.rep);
  return c * d;
}

double distance_to_set(Point2 p, const BoundedSet& A) {
  if (A.ambient_dim() != 2) throw Error(ErrorCode::InvalidParameters, "point and set dimensions differ");
  const double c = A.scale;
  const Point2 q{p.x / c, p.y / c};
  if (const auto* cc = std::get_if<CarpetComplement>(&A.rep)) return c * distance_carpet(q, cc->level);
  const auto& sq = std::get<SquareBoundary>(A.rep);
  if (q.x <= 0.0 || q.y <= 0.0 || q.x >= sq.side || q.y >= sq.side) return c * distance_to_box(q, sq.side);
  return c * std::min({q.x, sq.side - q.x, q.y, sq.side - q.y});
}

double tube_volume(const BoundedSet& A, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidParameters, "tube radius must be positive");
  if (A.ambient_dim() == 2) {
    const double c = A.scale;
    const double u = t / c;
    double v;
    if (const auto* cc = std::get_if<CarpetComplement>(&A.rep)) {
      v = carpet_tube(u, cc->level);
    } else {
      const double side = std::get<SquareBoundary>(A.rep).side;
      const double hole = std::max(0.0, side - 2.0 * u);
      v = 4.0 * side * u + kPi * u * u + side * side - hole * hole;
    }
    return c * c * v;
  }
  const GapView view = gap_view(A);
  double covered = 0.0;
  auto e = view.gaps.enumerate();
  while (auto g = e->next()) {
    if (g->length <= 2.0 * t) break;
    covered += (g->length - 2.0 * t) * g->multiplicity;
  }
  return (view.hi - view.lo) + 2.0 * t - covered;
}

double cantor_tube_exact(double t) {
  if (!(t > 0.0) || t > 0.5) throw Error(ErrorCode::OutOfRange, "closed-form Cantor tube needs 0 < t <= 1/2");
  const double D = std::log(2.0) / std::log(3.0);
  const double x = std::log(1.0 / (2.0 * t)) / std::log(3.0);
  double frac = x - std::floor(x);
  // snap exact triadic radii so that t = 3^{-k}/2 lands on frac = 0
  if (frac > 1.0 - 1e-13) frac = 0.0;
  return std::pow(t, 1.0 - D) * std::pow(2.0, 1.0 - D) * (std::pow(2.0, -frac) + std::pow(1.5, frac));
}

TubeSamples sample_tube(const std::function<double(double)>& volume, int N, double t_min, double t_max,
                        int n_per_decade, bool exact) {
  if (n_per_decade < 8) throw Error(ErrorCode::InvalidParameters, "need at least 8 samples per decade");
  TubeSamples out;
  out.N = N;
  for (double t : log_grid(t_min, t_max, n_per_decade)) out.samples.push_back({t, volume(t), exact});
  return out;
}

TubeSamples sample_tube(const BoundedSet& A, double t_min, double t_max, int n_per_decade) {
  if (n_per_decade < 8) throw Error(ErrorCode::InvalidParameters, "need at least 8 samples per decade");
  const auto ts = log_grid(t_min, t_max, n_per_decade);
  TubeSamples out;
  out.N = A.ambient_dim();

  if (out.N == 2) {
    const auto* cc = std::get_if<CarpetComplement>(&A.rep);
    // the iterate agrees with the limit carpet while the next generation's squares are covered
    const double resolved = cc && cc->level >= 0 ? A.scale * std::pow(3.0, -(cc->level + 1)) / 2.0 : 0.0;
    for (double t : ts) out.samples.push_back({t, tube_volume(A, t), t >= resolved});
    return out;
  }

  // Materialize every gap wider than 2 t_min once, then answer each t by binary search.
  const GapView view = gap_view(A);
  std::vector<double> lengths;
  std::vector<long double> mass{0.0L}, count{0.0L};
  auto e = view.gaps.enumerate();
  while (auto g = e->next()) {
    if (g->length <= 2.0 * ts.back()) break;
    lengths.push_back(g->length);
    mass.push_back(mass.back() + static_cast<long double>(g->length) * g->multiplicity);
    count.push_back(count.back() + g->multiplicity);
  }
  const long double hull = static_cast<long double>(view.hi) - view.lo;
  for (double t : ts) {
    const auto j = static_cast<std::size_t>(
        std::upper_bound(lengths.begin(), lengths.end(), 2.0 * t, std::greater<double>()) - lengths.begin());
    const long double v = hull - mass[j] + 2.0L * t * (1.0L + count[j]);
    out.samples.push_back({t, static_cast<double>(v), 2.0 * t >= view.unresolved_gap});
  }
  return out;
}

void write_csv(std::ostream& out, const TubeSamples& tube) {
  out << "t,volume,exact\n";
  out << std::setprecision(17);
  for (const auto& s : tube.samples) out << s.t << ',' << s.volume << ',' << (s.exact ? 1 : 0) << '\n';
}

TubeSamples read_tube_csv(std::istream& in, int N) {
  TubeSamples out;
  out.N = N;
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,volume", 0) != 0)
    throw Error(ErrorCode::ConfigParse, "tube CSV must start with the header t,volume,exact");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    try {
      out.samples.push_back({std::stod(a), std::stod(b), c.empty() || c == "1" || c == "true"});
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigParse, "bad tube CSV row: " + line);
    }
  }
  return out;
}

}  // namespace fzeta::geometry

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fzeta/strings/fractal_string.hpp"

namespace fzeta::geometry {

using Interval = std::pair<double, double>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Sorted, disjoint closed intervals (degenerate intervals are points).
struct IntervalUnion {
  std::vector<Interval> intervals;
};

/// Sorted points plus an optional solid interval standing in for everything
/// that was not enumerated.
struct PointSet {
  std::vector<double> points;
  std::optional<Interval> residual;
};

/// Ternary Cantor iterate: 2^level intervals of length 3^{-level}; level < 0 is the limit set.
struct CantorIterate {
  int level = -1;
};

/// Iterate of C^(m,a) in [0,1]; level < 0 is the limit set.
struct GeneralizedCantorIterate {
  int m = 2;
  double a = 1.0 / 3.0;
  int level = -1;
};

/// Sierpinski carpet iterate: [0,1]^2 minus the open squares deleted in
/// generations 1..level (8^{k-1} squares of side 3^{-k}); level < 0 is the carpet.
struct CarpetComplement {
  int level = -1;
};

/// Boundary of the square [0, side]^2.
struct SquareBoundary {
  double side = 1.0;
};

/// A_L = {Σ_{j≥k} ℓ_j : k ≥ 1} ∪ {0} for a fractal string L.
struct GapRealization {
  strings::FractalString gaps;
  double total = 0.0;
};

struct BoundedSet {
  std::variant<IntervalUnion, PointSet, CantorIterate, GeneralizedCantorIterate, CarpetComplement, SquareBoundary,
               GapRealization>
      rep;
  double scale = 1.0;  // the set is scale·rep

  int ambient_dim() const;
  /// True when the representation is the limit object itself rather than a finite refinement.
  bool exact() const;
  std::string describe() const;
};

BoundedSet make_interval_union(std::vector<Interval> intervals);
BoundedSet make_point_set(std::vector<double> points, std::optional<Interval> residual = std::nullopt);
BoundedSet cantor_set(int level = -1);
BoundedSet generalized_cantor_set(int m, double a, int level = -1);
BoundedSet carpet(int level = -1);
BoundedSet square_boundary(double side = 1.0);
BoundedSet string_set(const strings::FractalString& L);
/// The first `depth` points a_1 > … > a_depth of A_L plus the residual interval
/// [0, a_depth] standing in for the rest; exact() reports the truncation.
BoundedSet string_to_set(const strings::FractalString& L, int depth);
BoundedSet scaled(const BoundedSet& A, double lambda);

/// One-dimensional sets seen as their convex hull minus a family of open gaps.
struct GapView {
  double lo = 0.0;
  double hi = 0.0;
  double measure = 0.0;        // Lebesgue measure of the set
  strings::FractalString gaps;  // gap lengths, nonincreasing
  double unresolved_gap = 0.0;  // largest gap missing from a finite refinement (0 when exact)
};

GapView gap_view(const BoundedSet& A);

nlohmann::json set_to_json(const BoundedSet& A);
BoundedSet set_from_json(const nlohmann::json& j);

}  // namespace fzeta::geometry

#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "fzeta/geometry/bounded_set.hpp"

namespace fzeta::geometry {

double distance_to_set(double x, const BoundedSet& A);
double distance_to_set(Point2 p, const BoundedSet& A);

/// |A_t|, the N-dimensional volume of the open t-neighborhood.
double tube_volume(const BoundedSet& A, double t);

/// Closed-form tube function of the ternary Cantor set, 0 < t ≤ 1/2.
double cantor_tube_exact(double t);

struct TubeSample {
  double t = 0.0;
  double volume = 0.0;
  bool exact = true;
};

/// Samples ordered by strictly decreasing t, log-spaced.
struct TubeSamples {
  int N = 1;
  std::vector<TubeSample> samples;
};

TubeSamples sample_tube(const BoundedSet& A, double t_min, double t_max, int n_per_decade);
TubeSamples sample_tube(const std::function<double(double)>& volume, int N, double t_min, double t_max,
                        int n_per_decade, bool exact = true);

void write_csv(std::ostream& out, const TubeSamples& tube);
TubeSamples read_tube_csv(std::istream& in, int N);

}  // namespace fzeta::geometry

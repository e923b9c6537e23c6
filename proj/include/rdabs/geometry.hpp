#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "rdabs/rng.hpp"

namespace rdabs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Closed scalar interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo, double hi);  // validates lo <= hi
  static Interval point(double x) { return Interval(x, x); }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval operator*(double k, const Interval& a);
Interval operator+(const Interval& a, double k);
// Throws EvalError when b contains zero.
Interval operator/(const Interval& a, const Interval& b);

Interval hull(const Interval& a, const Interval& b);
std::optional<Interval> intersection(const Interval& a, const Interval& b);

// Axis-aligned box: one interval per dimension.
class BoxRegion {
 public:
  BoxRegion() = default;
  explicit BoxRegion(std::vector<Interval> axes);
  static BoxRegion cube(double lo, double hi, int dim);

  int dim() const { return static_cast<int>(axes_.size()); }
  const Interval& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
  const std::vector<Interval>& axes() const { return axes_; }

  double volume() const;
  double log_volume() const;  // sum of log widths; -inf for degenerate boxes
  Vec midpoint() const;
  bool contains(const Vec& p, double tol = 0.0) const;
  bool intersects(const BoxRegion& o) const;
  Vec clamp(const Vec& p) const;

 private:
  std::vector<Interval> axes_;
};

// Smallest enclosing ball data: for a box, the midpoint and half-diagonal.
struct ChebyshevData {
  Vec center;
  double radius = 0.0;
};

// Volume of the unit ball in R^n, evaluated through exact half-integer Gamma
// values (factorials, double factorials and sqrt(pi); no quadrature).
double unit_ball_volume(int n);

// Gamma(1 + n/2) for integer n >= 0, exact up to rounding.
double gamma_one_plus_half(int n);

ChebyshevData chebyshev_of_box(const BoxRegion& b);

// sup over the box of the squared Euclidean distance to p; equals the squared
// distance to the farthest vertex. Throws on dimension mismatch.
double sup_sq_dist(const Vec& p, const BoxRegion& b);

// Exact minimum enclosing ball of a finite point set (Welzl's algorithm).
ChebyshevData min_enclosing_ball(std::span<const Vec> points);

// Chebyshev data of a finite union of boxes = minimum enclosing ball of all
// box vertices. Intended for small unions (vertex count grows as 2^dim).
ChebyshevData chebyshev_of_box_union(std::span<const BoxRegion> boxes);

Vec sample_uniform(const BoxRegion& box, SampleRng& rng);

}  // namespace rdabs

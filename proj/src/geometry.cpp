#include "rdabs/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rdabs/errors.hpp"

namespace rdabs {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("Interval: lo > hi (" + std::to_string(lo_) + ", " +
                                std::to_string(hi_) + ")");
  }
}

Interval operator+(const Interval& a, const Interval& b) {
  return Interval(a.lo + b.lo, a.hi + b.hi);
}

Interval operator-(const Interval& a, const Interval& b) {
  return Interval(a.lo - b.hi, a.hi - b.lo);
}

Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }

Interval operator*(const Interval& a, const Interval& b) {
  const double p1 = a.lo * b.lo;
  const double p2 = a.lo * b.hi;
  const double p3 = a.hi * b.lo;
  const double p4 = a.hi * b.hi;
  return Interval(std::min(std::min(p1, p2), std::min(p3, p4)),
                  std::max(std::max(p1, p2), std::max(p3, p4)));
}

Interval operator*(double k, const Interval& a) {
  return k >= 0 ? Interval(k * a.lo, k * a.hi) : Interval(k * a.hi, k * a.lo);
}

Interval operator+(const Interval& a, double k) { return Interval(a.lo + k, a.hi + k); }

Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo <= 0.0 && 0.0 <= b.hi) {
    throw EvalError("division by an interval containing zero");
  }
  return a * Interval(1.0 / b.hi, 1.0 / b.lo);
}

Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

std::optional<Interval> intersection(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  if (lo > hi) return std::nullopt;
  return Interval(lo, hi);
}

BoxRegion::BoxRegion(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("BoxRegion: dimension must be >= 1");
}

BoxRegion BoxRegion::cube(double lo, double hi, int dim) {
  if (dim < 1) throw std::invalid_argument("BoxRegion::cube: dimension must be >= 1");
  return BoxRegion(std::vector<Interval>(static_cast<std::size_t>(dim), Interval(lo, hi)));
}

double BoxRegion::volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.width();
  return v;
}

double BoxRegion::log_volume() const {
  double s = 0.0;
  for (const auto& ax : axes_) s += std::log(ax.width());
  return s;
}

Vec BoxRegion::midpoint() const {
  Vec m(dim());
  for (int i = 0; i < dim(); ++i) m[i] = axes_[static_cast<std::size_t>(i)].mid();
  return m;
}

bool BoxRegion::contains(const Vec& p, double tol) const {
  if (p.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const auto& ax = axes_[static_cast<std::size_t>(i)];
    if (p[i] < ax.lo - tol || p[i] > ax.hi + tol) return false;
  }
  return true;
}

bool BoxRegion::intersects(const BoxRegion& o) const {
  if (o.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!axes_[static_cast<std::size_t>(i)].intersects(o.axis(i))) return false;
  }
  return true;
}

Vec BoxRegion::clamp(const Vec& p) const {
  Vec q = p;
  for (int i = 0; i < dim(); ++i) {
    const auto& ax = axes_[static_cast<std::size_t>(i)];
    q[i] = std::min(std::max(q[i], ax.lo), ax.hi);
  }
  return q;
}

double gamma_one_plus_half(int n) {
  if (n < 0) throw std::invalid_argument("gamma_one_plus_half: n must be >= 0");
  if (n % 2 == 0) {
    // Gamma(1 + m) = m!
    const int m = n / 2;
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  }
  // Gamma(1 + m + 1/2) = sqrt(pi) * (2m+1)!! / 2^(m+1)
  const int m = (n - 1) / 2;
  double dfac = 1.0;
  for (int i = 3; i <= 2 * m + 1; i += 2) dfac *= i;
  return std::sqrt(std::numbers::pi) * dfac / std::ldexp(1.0, m + 1);
}

double unit_ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("unit_ball_volume: n must be >= 1");
  return std::pow(std::numbers::pi, 0.5 * n) / gamma_one_plus_half(n);
}

ChebyshevData chebyshev_of_box(const BoxRegion& b) {
  ChebyshevData out;
  out.center = b.midpoint();
  double r2 = 0.0;
  for (int i = 0; i < b.dim(); ++i) {
    const double half = 0.5 * b.axis(i).width();
    r2 += half * half;
  }
  out.radius = std::sqrt(r2);
  return out;
}

double sup_sq_dist(const Vec& p, const BoxRegion& b) {
  if (p.size() != b.dim()) {
    throw std::invalid_argument("sup_sq_dist: point dimension " + std::to_string(p.size()) +
                                " != box dimension " + std::to_string(b.dim()));
  }
  double s = 0.0;
  for (int i = 0; i < b.dim(); ++i) {
    const auto& ax = b.axis(i);
    const double d = std::max(std::abs(p[i] - ax.lo), std::abs(p[i] - ax.hi));
    s += d * d;
  }
  return s;
}

namespace {

// Ball through up to d+1 support points: center is the least-squares solution
// of 2(p_i - p_0)^T c = |p_i|^2 - |p_0|^2 restricted to the support's affine
// hull, which is the circumsphere of the support set.
ChebyshevData ball_from_support(const std::vector<Vec>& support) {
  ChebyshevData out;
  if (support.empty()) {
    out.radius = -1.0;  // empty ball: contains nothing
    return out;
  }
  if (support.size() == 1) {
    out.center = support[0];
    out.radius = 0.0;
    return out;
  }
  const Vec& p0 = support[0];
  const int m = static_cast<int>(support.size()) - 1;
  Mat a(m, p0.size());
  Vec rhs(m);
  for (int i = 0; i < m; ++i) {
    const Vec d = support[static_cast<std::size_t>(i) + 1] - p0;
    a.row(i) = 2.0 * d.transpose();
    rhs[i] = support[static_cast<std::size_t>(i) + 1].squaredNorm() - p0.squaredNorm();
  }
  // Least-norm shift from p0 keeps the center in the affine hull of the support.
  const Vec shifted_rhs = rhs - a * p0;
  const Vec c = p0 + a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(shifted_rhs);
  out.center = c;
  double r2 = 0.0;
  for (const auto& p : support) r2 = std::max(r2, (p - c).squaredNorm());
  out.radius = std::sqrt(r2);
  return out;
}

ChebyshevData welzl(std::vector<const Vec*>& pts, std::size_t limit, std::vector<Vec>& support,
                    std::size_t max_support) {
  if (limit == 0 || support.size() == max_support) return ball_from_support(support);
  const Vec& p = *pts[limit - 1];
  ChebyshevData ball = welzl(pts, limit - 1, support, max_support);
  const double slack = 1e-12 * (1.0 + ball.radius);
  if (ball.radius >= 0.0 && (p - ball.center).norm() <= ball.radius + slack) return ball;
  support.push_back(p);
  ball = welzl(pts, limit - 1, support, max_support);
  support.pop_back();
  return ball;
}

}  // namespace

ChebyshevData min_enclosing_ball(std::span<const Vec> points) {
  if (points.empty()) throw std::invalid_argument("min_enclosing_ball: empty point set");
  const int d = static_cast<int>(points[0].size());
  std::vector<const Vec*> pts;
  pts.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() != d) throw std::invalid_argument("min_enclosing_ball: mixed dimensions");
    pts.push_back(&p);
  }
  // Deterministic shuffle; Welzl expects random order for its complexity bound.
  SampleRng rng(0x5EB1u, points.size());
  for (std::size_t i = pts.size(); i > 1; --i) {
    std::swap(pts[i - 1], pts[rng.next_u64() % i]);
  }
  std::vector<Vec> support;
  support.reserve(static_cast<std::size_t>(d) + 1);
  ChebyshevData ball = welzl(pts, pts.size(), support, static_cast<std::size_t>(d) + 1);
  // Final tightening: the support solve is exact, but guard against rounding.
  double r2 = 0.0;
  for (const auto& p : points) r2 = std::max(r2, (p - ball.center).squaredNorm());
  ball.radius = std::sqrt(r2);
  return ball;
}

namespace {

void collect_vertices(const BoxRegion& b, std::vector<Vec>& out) {
  const int d = b.dim();
  const std::size_t count = std::size_t{1} << d;
  for (std::size_t mask = 0; mask < count; ++mask) {
    Vec v(d);
    for (int i = 0; i < d; ++i) {
      v[i] = (mask >> i) & 1 ? b.axis(i).hi : b.axis(i).lo;
    }
    out.push_back(std::move(v));
  }
}

}  // namespace

ChebyshevData chebyshev_of_box_union(std::span<const BoxRegion> boxes) {
  if (boxes.empty()) throw std::invalid_argument("chebyshev_of_box_union: empty union");
  if (boxes.size() == 1) return chebyshev_of_box(boxes[0]);
  std::vector<Vec> vertices;
  vertices.reserve(boxes.size() << boxes[0].dim());
  for (const auto& b : boxes) {
    if (b.dim() != boxes[0].dim()) {
      throw std::invalid_argument("chebyshev_of_box_union: mixed dimensions");
    }
    collect_vertices(b, vertices);
  }
  return min_enclosing_ball(vertices);
}

Vec sample_uniform(const BoxRegion& box, SampleRng& rng) {
  Vec x(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    x[i] = rng.next_in(box.axis(i).lo, box.axis(i).hi);
  }
  return x;
}

}  // namespace rdabs

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "rdabs/errors.hpp"
#include "rdabs/geometry.hpp"
#include "rdabs/rng.hpp"

using namespace rdabs;

namespace {

Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Oracle: squared distance to the farthest of the 2^d vertices.
double corner_sup_sq(const Vec& p, const BoxRegion& b) {
  const int d = b.dim();
  double best = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double corner = (mask >> i) & 1 ? b.axis(i).hi : b.axis(i).lo;
      s += (p[i] - corner) * (p[i] - corner);
    }
    best = std::max(best, s);
  }
  return best;
}

BoxRegion random_box(SampleRng& rng, int d, double lo = -3.0, double hi = 3.0) {
  std::vector<Interval> axes;
  for (int i = 0; i < d; ++i) {
    double a = rng.next_in(lo, hi);
    double b = rng.next_in(lo, hi);
    if (a > b) std::swap(a, b);
    axes.emplace_back(a, b);
  }
  return BoxRegion(std::move(axes));
}

// Oracle for the minimum enclosing ball: the optimum is the circumsphere of
// some support subset of size <= d+1, so enumerate all of them.
ChebyshevData meb_by_enumeration(const std::vector<Vec>& points) {
  const int d = static_cast<int>(points[0].size());
  const std::size_t n = points.size();
  ChebyshevData best;
  best.radius = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> subset;
  auto try_ball = [&](const ChebyshevData& ball) {
    for (const auto& p : points) {
      if ((p - ball.center).norm() > ball.radius * (1.0 + 1e-9) + 1e-12) return;
    }
    if (ball.radius < best.radius) best = ball;
  };
  auto circumsphere = [&](const std::vector<std::size_t>& idx) {
    std::vector<Vec> support;
    for (auto i : idx) support.push_back(points[i]);
    if (support.size() == 1) return ChebyshevData{support[0], 0.0};
    const Vec& p0 = support[0];
    Mat a(static_cast<Eigen::Index>(support.size()) - 1, d);
    Vec rhs(static_cast<Eigen::Index>(support.size()) - 1);
    for (std::size_t i = 1; i < support.size(); ++i) {
      a.row(static_cast<Eigen::Index>(i - 1)) = 2.0 * (support[i] - p0).transpose();
      rhs[static_cast<Eigen::Index>(i - 1)] = support[i].squaredNorm() - p0.squaredNorm();
    }
    const Vec c = p0 + a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs - a * p0);
    double r = 0.0;
    for (const auto& p : support) r = std::max(r, (p - c).norm());
    return ChebyshevData{c, r};
  };
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (!subset.empty() && subset.size() <= static_cast<std::size_t>(d) + 1) {
      try_ball(circumsphere(subset));
    }
    if (subset.size() == static_cast<std::size_t>(d) + 1) return;
    for (std::size_t i = start; i < n; ++i) {
      subset.push_back(i);
      self(self, i + 1);
      subset.pop_back();
    }
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace

TEST_CASE("unit ball volumes from exact half-integer gamma") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
  CHECK(unit_ball_volume(4) ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / 2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(5) ==
        doctest::Approx(8.0 * std::numbers::pi * std::numbers::pi / 15.0).epsilon(1e-15));
  for (int n = 1; n <= 12; ++n) {
    CHECK(gamma_one_plus_half(n) == doctest::Approx(std::tgamma(1.0 + 0.5 * n)).epsilon(1e-13));
  }
  CHECK_THROWS(unit_ball_volume(0));
}

TEST_CASE("chebyshev data of boxes") {
  SUBCASE("2d box, against the corner oracle") {
    const BoxRegion b({Interval(0.6, 0.8), Interval(0.4, 1.0)});
    const ChebyshevData cd = chebyshev_of_box(b);
    CHECK(cd.center[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(cd.center[1] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(cd.radius == doctest::Approx(std::sqrt(0.10)).epsilon(1e-13));
    CHECK(cd.radius * cd.radius == doctest::Approx(corner_sup_sq(cd.center, b)).epsilon(1e-13));
  }
  SUBCASE("degenerate point box") {
    const BoxRegion b({Interval(0.0, 0.0), Interval(0.0, 0.0)});
    const ChebyshevData cd = chebyshev_of_box(b);
    CHECK(cd.radius == 0.0);
    CHECK(cd.center.norm() == 0.0);
  }
  SUBCASE("unit segment") {
    const ChebyshevData cd = chebyshev_of_box(BoxRegion({Interval(0.0, 1.0)}));
    CHECK(cd.center[0] == 0.5);
    CHECK(cd.radius == 0.5);
  }
}

TEST_CASE("sup_sq_dist equals the farthest-vertex distance") {
  SUBCASE("worked 2d example") {
    const BoxRegion b({Interval(0.6, 0.8), Interval(0.4, 1.0)});
    const Vec p = make_vec({0.7, 0.49});
    CHECK(sup_sq_dist(p, b) == doctest::Approx(0.2701).epsilon(1e-14));
    CHECK(sup_sq_dist(p, b) == doctest::Approx(corner_sup_sq(p, b)).epsilon(1e-14));
  }
  SUBCASE("center of a cube of side 2s gives d s^2") {
    for (int d = 1; d <= 4; ++d) {
      const double s = 0.35;
      const BoxRegion b = BoxRegion::cube(-s, s, d);
      CHECK(sup_sq_dist(Vec::Zero(d), b) == doctest::Approx(d * s * s).epsilon(1e-14));
    }
  }
  SUBCASE("degenerate box at the point itself") {
    const BoxRegion b({Interval(0.0, 0.0), Interval(0.0, 0.0)});
    CHECK(sup_sq_dist(Vec::Zero(2), b) == 0.0);
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS(sup_sq_dist(Vec::Zero(3), BoxRegion::cube(0, 1, 2)));
  }
  SUBCASE("randomized corner-oracle equivalence up to d = 12") {
    SampleRng rng(2024, 0);
    for (int d : {1, 2, 3, 5, 8, 12}) {
      for (int rep = 0; rep < 40; ++rep) {
        const BoxRegion b = random_box(rng, d);
        Vec p(d);
        for (int i = 0; i < d; ++i) p[i] = rng.next_in(-4.0, 4.0);
        CHECK(sup_sq_dist(p, b) == doctest::Approx(corner_sup_sq(p, b)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("chebyshev radius is the sup distance from the center") {
    SampleRng rng(99, 1);
    for (int rep = 0; rep < 200; ++rep) {
      const BoxRegion b = random_box(rng, 1 + static_cast<int>(rng.next_u64() % 4));
      const ChebyshevData cd = chebyshev_of_box(b);
      CHECK(sup_sq_dist(cd.center, b) == doctest::Approx(cd.radius * cd.radius).epsilon(1e-12));
    }
  }
}

TEST_CASE("interval arithmetic stays ordered") {
  CHECK_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);
  SampleRng rng(7, 7);
  for (int rep = 0; rep < 500; ++rep) {
    const Interval a(rng.next_in(-5, 2), rng.next_in(2, 5));
    const Interval b(rng.next_in(-5, 0), rng.next_in(0, 5));
    for (const Interval& r : {a + b, a - b, a * b, hull(a, b), -a}) {
      CHECK(r.lo <= r.hi);
    }
    const Interval denom(1.0 + rng.next_unit(), 3.0 + rng.next_unit());
    const Interval q = a / denom;
    CHECK(q.lo <= q.hi);
  }
  CHECK_THROWS_AS(Interval(1, 2) / Interval(-1, 1), EvalError);
}

TEST_CASE("minimum enclosing ball: exact on small point sets") {
  SUBCASE("two points") {
    std::vector<Vec> pts = {make_vec({0.0, 0.0}), make_vec({2.0, 0.0})};
    const ChebyshevData ball = min_enclosing_ball(pts);
    CHECK(ball.center[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ball.center[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ball.radius == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("equilateral triangle: circumcenter") {
    std::vector<Vec> pts = {make_vec({0.0, 0.0}), make_vec({1.0, 0.0}),
                            make_vec({0.5, std::sqrt(3.0) / 2.0})};
    const ChebyshevData ball = min_enclosing_ball(pts);
    CHECK(ball.radius == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  }
  SUBCASE("interior points do not matter") {
    std::vector<Vec> pts = {make_vec({-1.0, 0.0}), make_vec({1.0, 0.0}), make_vec({0.1, 0.1}),
                            make_vec({-0.3, 0.2})};
    const ChebyshevData ball = min_enclosing_ball(pts);
    CHECK(ball.radius == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("randomized, against subset-circumsphere enumeration") {
    SampleRng rng(31, 0);
    for (int d : {1, 2, 3}) {
      for (int rep = 0; rep < 25; ++rep) {
        std::vector<Vec> pts;
        const int n = 3 + static_cast<int>(rng.next_u64() % 5);
        for (int i = 0; i < n; ++i) {
          Vec p(d);
          for (int j = 0; j < d; ++j) p[j] = rng.next_in(-2, 2);
          pts.push_back(std::move(p));
        }
        const ChebyshevData fast = min_enclosing_ball(pts);
        const ChebyshevData slow = meb_by_enumeration(pts);
        CHECK(fast.radius == doctest::Approx(slow.radius).epsilon(1e-8));
        for (const auto& p : pts) {
          CHECK((p - fast.center).norm() <= fast.radius * (1 + 1e-9) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("chebyshev of a union of boxes") {
  SUBCASE("single box reduces to the box formula") {
    const BoxRegion b({Interval(0.0, 1.0), Interval(0.0, 2.0)});
    const auto direct = chebyshev_of_box(b);
    const auto via_union = chebyshev_of_box_union(std::vector<BoxRegion>{b});
    CHECK(via_union.radius == doctest::Approx(direct.radius).epsilon(1e-12));
  }
  SUBCASE("two stacked boxes enclose both") {
    const BoxRegion a({Interval(0.0, 1.0), Interval(0.0, 1.0)});
    const BoxRegion b({Interval(1.0, 2.0), Interval(1.0, 2.0)});
    const auto ball = chebyshev_of_box_union(std::vector<BoxRegion>{a, b});
    // Opposite corners (0,0) and (2,2) force radius sqrt(2).
    CHECK(ball.radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    SampleRng rng(5, 5);
    for (int rep = 0; rep < 200; ++rep) {
      SampleRng local(5, static_cast<std::uint64_t>(rep));
      const Vec p = sample_uniform(rep % 2 ? a : b, local);
      CHECK((p - ball.center).norm() <= ball.radius * (1 + 1e-9));
    }
  }
}

#include "rdabs/dynamics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "rdabs/errors.hpp"

namespace rdabs {

std::string to_string(SmoothnessClass c) {
  switch (c) {
    case SmoothnessClass::Affine: return "affine";
    case SmoothnessClass::PiecewiseAffine: return "piecewise-affine";
    case SmoothnessClass::Lipschitz: return "lipschitz";
  }
  return "?";
}

namespace {

// Half-open membership: [lo, hi) per axis, closed where the piece boundary
// coincides with the domain's upper face.
bool piece_contains(const BoxRegion& region, const BoxRegion& domain, const Vec& x) {
  for (int i = 0; i < region.dim(); ++i) {
    const auto& ax = region.axis(i);
    if (x[i] < ax.lo) return false;
    if (x[i] > ax.hi) return false;
    if (x[i] == ax.hi && ax.hi != domain.axis(i).hi) return false;
  }
  return true;
}

Interval affine_axis_image(const Mat& a, const Vec& b, const BoxRegion& box, int row) {
  double lo = b[row];
  double hi = b[row];
  for (int j = 0; j < box.dim(); ++j) {
    const double c = a(row, j);
    if (c >= 0) {
      lo += c * box.axis(j).lo;
      hi += c * box.axis(j).hi;
    } else {
      lo += c * box.axis(j).hi;
      hi += c * box.axis(j).lo;
    }
  }
  return Interval(lo, hi);
}

BoxRegion affine_image(const Mat& a, const Vec& b, const BoxRegion& box) {
  std::vector<Interval> axes;
  axes.reserve(static_cast<std::size_t>(a.rows()));
  for (int i = 0; i < a.rows(); ++i) axes.push_back(affine_axis_image(a, b, box, i));
  return BoxRegion(std::move(axes));
}

}  // namespace

std::size_t SystemDef::piece_index(const Vec& x) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (piece_contains(pieces_[i].region, domain_, x)) return i;
  }
  // Rounding can push a point a hair outside every half-open piece; fall back
  // to the nearest piece by clamped membership.
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].region.contains(x, 1e-9)) return i;
  }
  throw NumericError("piecewise-affine system: point outside every piece");
}

SystemDef SystemDef::doubling() {
  SystemDef s;
  s.kind_ = Kind::Doubling;
  s.n_ = 1;
  s.domain_ = BoxRegion::cube(0.0, 1.0, 1);
  s.smoothness_ = SmoothnessClass::PiecewiseAffine;
  s.lipschitz_ = 2.0;
  s.modes_ = 2;
  s.name_ = "doubling";
  Mat a(1, 1);
  a << 2.0;
  Vec b0(1), b1(1);
  b0 << 0.0;
  b1 << -1.0;
  s.pieces_.push_back({BoxRegion({Interval(0.0, 0.5)}), a, b0});
  s.pieces_.push_back({BoxRegion({Interval(0.5, 1.0)}), a, b1});
  return s;
}

SystemDef SystemDef::square() {
  SystemDef s;
  s.kind_ = Kind::Square;
  s.n_ = 1;
  s.domain_ = BoxRegion::cube(0.0, 1.0, 1);
  s.smoothness_ = SmoothnessClass::Lipschitz;
  s.name_ = "square";
  return s;
}

SystemDef SystemDef::identity(int n, BoxRegion domain) {
  if (domain.dim() != n) throw ConfigError("identity: domain dimension != n");
  SystemDef s;
  s.kind_ = Kind::Identity;
  s.n_ = n;
  s.domain_ = std::move(domain);
  s.smoothness_ = SmoothnessClass::Affine;
  s.lipschitz_ = 1.0;
  s.name_ = "identity";
  return s;
}

SystemDef SystemDef::lti(Mat a, BoxRegion domain) {
  if (a.rows() != a.cols()) throw ConfigError("lti: matrix must be square");
  if (domain.dim() != a.rows()) throw ConfigError("lti: domain dimension != matrix size");
  SystemDef s;
  s.kind_ = Kind::Lti;
  s.n_ = static_cast<int>(a.rows());
  s.domain_ = std::move(domain);
  s.smoothness_ = SmoothnessClass::Affine;
  s.lipschitz_ = spectral_norm(a);
  s.name_ = "lti";
  s.a_ = std::move(a);
  return s;
}

SystemDef SystemDef::nonlinear3d() {
  SystemDef s;
  s.kind_ = Kind::Nonlinear3d;
  s.n_ = 3;
  s.domain_ = BoxRegion::cube(-1.0, 1.0, 3);
  s.smoothness_ = SmoothnessClass::Lipschitz;
  s.name_ = "nonlinear3d";
  s.expr_texts_ = {"0.9*x1 + 0.1*sin(x2)", "2*x2^3 - x2", "0.9*x3 + 0.1*x1*x2"};
  for (const auto& t : s.expr_texts_) s.exprs_.push_back(parse_expression(t, 3));
  return s;
}

SystemDef SystemDef::piecewise_affine(std::vector<PwaPiece> pieces, BoxRegion domain) {
  if (pieces.empty()) throw ConfigError("piecewise_affine: at least one piece required");
  const int n = domain.dim();
  double lip = 0.0;
  for (const auto& p : pieces) {
    if (p.region.dim() != n || p.A.rows() != n || p.A.cols() != n || p.b.size() != n) {
      throw ConfigError("piecewise_affine: piece dimensions inconsistent with domain");
    }
    lip = std::max(lip, spectral_norm(p.A));
  }
  SystemDef s;
  s.kind_ = Kind::PiecewiseAffine;
  s.n_ = n;
  s.domain_ = std::move(domain);
  s.smoothness_ = SmoothnessClass::PiecewiseAffine;
  s.lipschitz_ = lip;  // Jacobian is piecewise constant, so the max is exact
  s.modes_ = static_cast<int>(pieces.size());
  s.name_ = "piecewise-affine";
  s.pieces_ = std::move(pieces);
  return s;
}

SystemDef SystemDef::from_expressions(std::vector<std::string> exprs, BoxRegion domain,
                                      SmoothnessClass cls, std::optional<double> lipschitz,
                                      std::optional<int> modes) {
  const int n = domain.dim();
  if (static_cast<int>(exprs.size()) != n) {
    throw ConfigError("from_expressions: expected " + std::to_string(n) + " expressions, got " +
                      std::to_string(exprs.size()));
  }
  SystemDef s;
  s.kind_ = Kind::Dsl;
  s.n_ = n;
  s.domain_ = std::move(domain);
  s.smoothness_ = cls;
  s.lipschitz_ = lipschitz;
  s.modes_ = modes;
  s.name_ = "dsl";
  s.expr_texts_ = std::move(exprs);
  for (const auto& t : s.expr_texts_) s.exprs_.push_back(parse_expression(t, n));
  return s;
}

std::string SystemDef::fingerprint() const {
  std::ostringstream os;
  os << name_ << ";n=" << n_ << ";domain=";
  for (int i = 0; i < domain_.dim(); ++i) {
    os << "[" << domain_.axis(i).lo << "," << domain_.axis(i).hi << "]";
  }
  if (kind_ == Kind::Lti) os << ";A=" << a_.reshaped().transpose();
  if (kind_ == Kind::PiecewiseAffine) os << ";pieces=" << pieces_.size();
  for (const auto& t : expr_texts_) os << ";f=" << t;
  return os.str();
}

Vec SystemDef::apply(const Vec& x) const {
  switch (kind_) {
    case Kind::Doubling:
    case Kind::PiecewiseAffine: {
      const auto& p = pieces_[piece_index(x)];
      return p.A * x + p.b;
    }
    case Kind::Square: {
      Vec y(1);
      y[0] = x[0] * x[0];
      return y;
    }
    case Kind::Identity:
      return x;
    case Kind::Lti:
      return a_ * x;
    case Kind::Nonlinear3d: {
      Vec y(3);
      y[0] = 0.9 * x[0] + 0.1 * std::sin(x[1]);
      y[1] = 2.0 * x[1] * x[1] * x[1] - x[1];
      y[2] = 0.9 * x[2] + 0.1 * x[0] * x[1];
      return y;
    }
    case Kind::Dsl: {
      Vec y(n_);
      for (int i = 0; i < n_; ++i) y[i] = eval_scalar(*exprs_[static_cast<std::size_t>(i)], x);
      return y;
    }
  }
  throw NumericError("SystemDef::apply: unreachable");
}

Mat SystemDef::jacobian(const Vec& x) const {
  switch (kind_) {
    case Kind::Doubling:
    case Kind::PiecewiseAffine:
      return pieces_[piece_index(x)].A;
    case Kind::Square: {
      Mat j(1, 1);
      j << 2.0 * x[0];
      return j;
    }
    case Kind::Identity:
      return Mat::Identity(n_, n_);
    case Kind::Lti:
      return a_;
    case Kind::Nonlinear3d: {
      Mat j = Mat::Zero(3, 3);
      j(0, 0) = 0.9;
      j(0, 1) = 0.1 * std::cos(x[1]);
      j(1, 1) = 6.0 * x[1] * x[1] - 1.0;
      j(2, 0) = 0.1 * x[1];
      j(2, 1) = 0.1 * x[0];
      j(2, 2) = 0.9;
      return j;
    }
    case Kind::Dsl: {
      std::vector<Dual> env;
      env.reserve(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) env.push_back(dual_variable(x[i], i, n_));
      Mat j(n_, n_);
      for (int i = 0; i < n_; ++i) {
        j.row(i) = eval_dual(*exprs_[static_cast<std::size_t>(i)], env).g.transpose();
      }
      return j;
    }
  }
  throw NumericError("SystemDef::jacobian: unreachable");
}

std::vector<BoxRegion> SystemDef::interval_image(const BoxRegion& cell) const {
  switch (kind_) {
    case Kind::Doubling:
    case Kind::PiecewiseAffine: {
      std::vector<BoxRegion> out;
      for (const auto& p : pieces_) {
        std::vector<Interval> clipped;
        bool empty = false;
        for (int i = 0; i < n_ && !empty; ++i) {
          auto sect = intersection(cell.axis(i), p.region.axis(i));
          if (!sect) {
            empty = true;
          } else {
            clipped.push_back(*sect);
          }
        }
        if (!empty) out.push_back(affine_image(p.A, p.b, BoxRegion(std::move(clipped))));
      }
      return out;
    }
    case Kind::Square: {
      // x^2 is monotone on [0, 1], so endpoint images are exact.
      const auto& ax = cell.axis(0);
      return {BoxRegion({Interval(ax.lo * ax.lo, ax.hi * ax.hi)})};
    }
    case Kind::Identity:
      return {cell};
    case Kind::Lti: {
      return {affine_image(a_, Vec::Zero(n_), cell)};
    }
    case Kind::Nonlinear3d:
    case Kind::Dsl: {
      std::vector<Interval> env(cell.axes().begin(), cell.axes().end());
      std::vector<Interval> axes;
      axes.reserve(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) {
        axes.push_back(eval_interval(*exprs_[static_cast<std::size_t>(i)], env));
      }
      return {BoxRegion(std::move(axes))};
    }
  }
  throw NumericError("SystemDef::interval_image: unreachable");
}

bool SystemDef::supports_exact_image() const {
  switch (kind_) {
    case Kind::Identity:
      return true;
    case Kind::Doubling:
    case Kind::PiecewiseAffine:
      for (const auto& p : pieces_) {
        if (!p.A.isDiagonal(0.0)) return false;
        for (int i = 0; i < n_; ++i) {
          if (p.A(i, i) <= 0.0) return false;
        }
      }
      return true;
    case Kind::Lti:
      if (!a_.isDiagonal(0.0)) return false;
      for (int i = 0; i < n_; ++i) {
        if (a_(i, i) <= 0.0) return false;
      }
      return true;
    default:
      return false;
  }
}

std::vector<SystemDef::DiagonalPiece> SystemDef::diagonal_pieces() const {
  if (!supports_exact_image()) {
    throw std::invalid_argument(
        "exact transition mode requires a positive diagonal (piecewise-)affine system");
  }
  std::vector<DiagonalPiece> out;
  if (kind_ == Kind::Identity || kind_ == Kind::Lti) {
    DiagonalPiece p;
    p.region = domain_;
    p.scale = kind_ == Kind::Identity ? Vec::Ones(n_) : Vec(a_.diagonal());
    p.offset = Vec::Zero(n_);
    out.push_back(std::move(p));
    return out;
  }
  for (const auto& piece : pieces_) {
    DiagonalPiece p;
    p.region = piece.region;
    p.scale = piece.A.diagonal();
    p.offset = piece.b;
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

double domain_tolerance(const Interval& ax) { return 1e-12 * (1.0 + ax.width()); }

Vec clamp_marginal(const SystemDef& sys, const Vec& x) {
  Vec y = x;
  for (int i = 0; i < sys.dim(); ++i) {
    const auto& ax = sys.domain().axis(i);
    const double tol = domain_tolerance(ax);
    if (y[i] < ax.lo - tol || y[i] > ax.hi + tol) {
      throw NumericError("step: point outside the system domain");
    }
    y[i] = std::min(std::max(y[i], ax.lo), ax.hi);
  }
  return y;
}

}  // namespace

Vec step(const SystemDef& sys, const Vec& x) {
  if (x.size() != sys.dim()) throw std::invalid_argument("step: dimension mismatch");
  const Vec y = sys.apply(clamp_marginal(sys, x));
  if (!y.allFinite()) throw NumericError("step: non-finite dynamics output");
  return y;
}

TrajectoryMatrix behavior(const SystemDef& sys, const Vec& xi0, int l) {
  if (l < 1) throw std::invalid_argument("behavior: horizon must be >= 1");
  TrajectoryMatrix out;
  out.n = sys.dim();
  out.l = l;
  out.states.reserve(static_cast<std::size_t>(l));
  Vec x = clamp_marginal(sys, xi0);
  out.states.push_back(x);
  for (int t = 1; t < l; ++t) {
    Vec y = step(sys, x);
    if (!sys.domain().contains(y)) {
      y = sys.domain().clamp(y);
      ++out.escapes;
    }
    out.states.push_back(y);
    x = std::move(y);
  }
  return out;
}

TrajectoryMatrix jacobian_chain(const SystemDef& sys, const Vec& xi0, int l) {
  TrajectoryMatrix out = behavior(sys, xi0, l);
  const int n = sys.dim();
  out.jac = Mat(static_cast<Eigen::Index>(n) * l, n);
  Mat p = Mat::Identity(n, n);
  out.jac.topRows(n) = p;
  for (int t = 1; t < l; ++t) {
    p = sys.jacobian(out.state(t - 1)) * p;
    out.jac.middleRows(static_cast<Eigen::Index>(n) * t, n) = p;
  }
  return out;
}

double log_det_gram(const Mat& jac) {
  const Mat gram = jac.transpose() * jac;
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericError("log_det_gram: Cholesky factorization failed (rank deficiency?)");
  }
  double s = 0.0;
  const Mat l = llt.matrixL();
  for (int i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

double spectral_norm(const Mat& a, double tol) {
  if (a.size() == 0) return 0.0;
  const Mat gram = a.transpose() * a;
  Vec v = Vec::Ones(gram.rows());
  for (int i = 0; i < gram.rows(); ++i) v[i] += 1e-3 * (i + 1);  // avoid unlucky orthogonal start
  v.normalize();
  double lambda = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    const Vec w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double lipschitz_estimate(const SystemDef& sys, long samples, std::uint64_t seed) {
  if (const auto exact = sys.exact_lipschitz()) return *exact;
  if (samples < 1) throw std::invalid_argument("lipschitz_estimate: samples must be >= 1");
  double best = 0.0;
  for (long i = 0; i < samples; ++i) {
    SampleRng rng(seed, static_cast<std::uint64_t>(i));
    const Vec x = sample_uniform(sys.domain(), rng);
    best = std::max(best, spectral_norm(sys.jacobian(x)));
  }
  return best;
}

}  // namespace rdabs

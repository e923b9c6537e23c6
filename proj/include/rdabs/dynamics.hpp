#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdabs/expr.hpp"
#include "rdabs/geometry.hpp"

namespace rdabs {

enum class SmoothnessClass { Affine, PiecewiseAffine, Lipschitz };

std::string to_string(SmoothnessClass c);

// One mode of a piecewise-affine map: f(x) = A x + b on `region`. Regions are
// half-open per axis except at the domain's upper face, mirroring the grid
// cell convention, so every domain point belongs to exactly one piece.
struct PwaPiece {
  BoxRegion region;
  Mat A;
  Vec b;
};

// A discrete-time system x+ = f(x) on a compact box domain, with a declared
// smoothness class. Immutable after construction; safe to share across workers.
class SystemDef {
 public:
  enum class Kind { Doubling, Square, Identity, Lti, Nonlinear3d, PiecewiseAffine, Dsl };

  // Built-ins.
  static SystemDef doubling();
  static SystemDef square();
  static SystemDef identity(int n, BoxRegion domain);
  static SystemDef lti(Mat a, BoxRegion domain);
  static SystemDef nonlinear3d();
  static SystemDef piecewise_affine(std::vector<PwaPiece> pieces, BoxRegion domain);

  // Dynamics declared as one expression per state component.
  static SystemDef from_expressions(std::vector<std::string> exprs, BoxRegion domain,
                                    SmoothnessClass cls, std::optional<double> lipschitz = {},
                                    std::optional<int> modes = {});

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  const BoxRegion& domain() const { return domain_; }
  SmoothnessClass smoothness() const { return smoothness_; }
  std::optional<double> exact_lipschitz() const { return lipschitz_; }
  std::optional<int> modes() const { return modes_; }
  const std::string& name() const { return name_; }
  std::string fingerprint() const;

  const Mat& lti_matrix() const { return a_; }
  const std::vector<PwaPiece>& pieces() const { return pieces_; }
  const std::vector<ExprPtr>& expressions() const { return exprs_; }

  // Raw map evaluation (no domain clamping).
  Vec apply(const Vec& x) const;

  // Jacobian of f at x; closed form for built-ins, dual numbers for DSL systems.
  Mat jacobian(const Vec& x) const;

  // Sound enclosure of f(cell): one box per piece for (piecewise-)affine
  // built-ins, otherwise a single natural-extension hull.
  std::vector<BoxRegion> interval_image(const BoxRegion& cell) const;

  // True when exact half-open images are available (pieces with a positive
  // diagonal linear part).
  bool supports_exact_image() const;

  // Pieces as (region, diagonal scale, offset) for the exact transition
  // builder. Only valid when supports_exact_image().
  struct DiagonalPiece {
    BoxRegion region;
    Vec scale;   // positive diagonal of A
    Vec offset;  // b
  };
  std::vector<DiagonalPiece> diagonal_pieces() const;

 private:
  SystemDef() = default;

  Kind kind_ = Kind::Identity;
  int n_ = 1;
  BoxRegion domain_;
  SmoothnessClass smoothness_ = SmoothnessClass::Affine;
  std::optional<double> lipschitz_;
  std::optional<int> modes_;
  std::string name_;
  Mat a_;                         // Lti
  std::vector<PwaPiece> pieces_;  // Doubling, PiecewiseAffine
  std::vector<ExprPtr> exprs_;    // Dsl; Nonlinear3d keeps them for interval images
  std::vector<std::string> expr_texts_;

  std::size_t piece_index(const Vec& x) const;
};

// An l-step trajectory (row t = f^(t)(xi0)) with an optional stacked Jacobian
// of the initial-state-to-trajectory map.
struct TrajectoryMatrix {
  int n = 0;
  int l = 0;
  std::vector<Vec> states;
  Mat jac;          // (n*l) x n when requested, empty otherwise
  int escapes = 0;  // steps clamped back into the domain

  const Vec& state(int t) const { return states[static_cast<std::size_t>(t)]; }
  bool has_jacobian() const { return jac.size() > 0; }
};

// One application of f. Marginally-outside inputs (within 1e-12, scaled) are
// clamped; non-finite outputs raise NumericError.
Vec step(const SystemDef& sys, const Vec& x);

// Iterates step l-1 times. Outputs that escape the domain are clamped back and
// counted in TrajectoryMatrix::escapes.
TrajectoryMatrix behavior(const SystemDef& sys, const Vec& xi0, int l);

// behavior() plus the stacked Jacobian [I; P1; ...; P_{l-1}] with
// P_{t+1} = J_f(x_t) P_t.
TrajectoryMatrix jacobian_chain(const SystemDef& sys, const Vec& xi0, int l);

// log det(J^T J) via Cholesky; >= 0 because the top block of J is the identity.
double log_det_gram(const Mat& jac);

// Largest singular value by power iteration on A^T A.
double spectral_norm(const Mat& a, double tol = 1e-10);

// Max over uniformly sampled domain points of ||J_f(x)||_2. A user-provided
// exact constant takes precedence.
double lipschitz_estimate(const SystemDef& sys, long samples, std::uint64_t seed);

}  // namespace rdabs

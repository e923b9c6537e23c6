#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdabs/dynamics.hpp"
#include "rdabs/entropy.hpp"

namespace rdabs {

// Upper bound on the ball-measure growth constant of the l-step trajectory
// set, with the case that produced it.
struct CConstant {
  double value = 0.0;
  std::string case_tag;
};

// Minimum over all cases applicable to the system's smoothness class:
//   affine                ->  v_n
//   piecewise affine      ->  M^l v_n            (plus the Lipschitz case when L is known)
//   Lipschitz constant L  ->  v_n (sum_{i<l} L^{2i})^{n/2}
// With high_rate set, returns v_n regardless (valid asymptotically as the
// partition grows; not a theorem at low rates).
CConstant c_constant(const SystemDef& sys, int l, bool high_rate = false,
                     std::optional<double> lipschitz = {});

// One point of the Renyi-entropy grid used by the bounds; s may be infinity.
struct SGridPoint {
  double s = 2.0;
  double h_s = 0.0;
};

struct DistortionBound {
  double d_lower = 0.0;
  double term1 = 0.0;    // encoder (Shannon) term
  double term2 = 0.0;    // cover-radius term at the maximizing s
  double s_argmax = 0.0; // may be infinity
  std::vector<SGridPoint> per_s;  // full cover-radius term per grid order
};

// Two-term distortion lower bound at rate R (nats):
//   (n/2l) (e^{-R+h-n/2} / (c Gamma(1+n/2)))^{2/n}
//   + (1/l) c^{-2/n} max_s e^{(2/n)(-(s/(s-1)) R + h_s)},
// the s = infinity entry using exponent (2/n)(-R + h_inf).
DistortionBound distortion_lower_bound(double rate, int n, int l, double h,
                                       std::span<const SGridPoint> renyi, double c);

struct RateBound {
  double r_lower = 0.0;
  bool vacuous = false;  // bound was negative and clamped to zero
};

// Analytic inverse of the distortion bound at s = infinity: the minimum rate
// for a distortion threshold d.
RateBound rate_lower_bound(double d, int n, int l, double h, double h_inf, double c);

struct RelaxedBound {
  double d_lower = 0.0;
  double k_factor = 0.0;
  std::string case_tag;
  bool k_vanishes = false;   // the L = 1 case: the printed factor 1 - L^2 is zero
  bool vacuous = false;      // nonpositive factor, bound carries no information
  std::optional<double> r_lower;  // rate form for the target distortion, when requested
};

// Entropy-free relaxed bound: K(l) times the initial-condition bracket, with
//   K = (1-L^2)/(l v_n^{2/n})        L < 1
//   K = (1-L^2)/(l^2 v_n^{2/n})      L = 1   (vanishes as printed; flagged)
//   K = (1-L^2)/(l L^{2l} v_n^{2/n}) L > 1   (negative as printed; flagged vacuous)
//   K = 1/(l M^{2l/n} v_n^{2/n})     piecewise affine with M pieces
// `l_or_m` is L for the Lipschitz class and M for the piecewise-affine class
// (affine behaves as M = 1). The rate form keeps K on the first summand only.
RelaxedBound relaxed_bound(SmoothnessClass cls, double l_or_m, int n, int l, double rate,
                           double h0, std::span<const SGridPoint> renyi0,
                           std::optional<double> target_d = {});

// Renyi grid for the bound: finite orders from the report plus s = infinity.
std::vector<SGridPoint> bound_s_grid(const EntropyReport& report);

struct RdPoint {
  double rate = 0.0;
  double cells = 0.0;  // e^R
  double d_lower = 0.0;
  double d_lower_highrate = 0.0;
  double term1 = 0.0;
  double term2 = 0.0;
  double s_argmax = 0.0;
  double h = 0.0;
  double h_inf = 0.0;
  double c = 0.0;
  std::string c_case;
  std::vector<SGridPoint> per_s;
};

// Bound sweep over a rate grid, with the valid-case c and the high-rate c
// side by side. Ingredients (entropies, constants) are precomputed by the
// caller so their provenance is explicit.
std::vector<RdPoint> rd_curve(std::span<const double> rates, int n, int l,
                              const EntropyReport& ingredients, const CConstant& c_valid,
                              const CConstant& c_highrate);

// Default maximization grid for the Renyi order.
std::vector<double> default_s_grid();

}  // namespace rdabs

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdabs/abstraction.hpp"
#include "rdabs/bounds.hpp"

namespace rdabs {

// --- doubling map study -----------------------------------------------------
//
// The trajectory set of the doubling map is 2^(l-1) congruent line segments;
// the optimal cover cuts each into k pieces, and the uniform grid with
// k 2^(l-1) cells realizes the same distortion.

struct DoublingClosedForm {
  int l = 1;
  long k = 1;
  long cells = 1;      // k 2^(l-1)
  double rate = 0.0;   // log(cells)
  double d_formula = 0.0;      // 7 (1 - 4^-l) / (9 l k^2); matches the Monte Carlo check
  double d_formula_alt = 0.0;  // (7/l) 4^(l-2) (4^l - 1) e^{-2R}; alternative scaling,
                               // reported for comparison only
};

DoublingClosedForm doubling_optimal_distortion(int l, long k);

struct DoublingAchievability {
  DoublingClosedForm closed_form;
  long transitions = 0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  bool within_3_se = false;
};

// Builds the k 2^(l-1)-cell grid with exact piecewise-affine transitions and
// checks the Monte Carlo distortion against the closed form.
DoublingAchievability doubling_optimal_abstraction(int l, long k, long samples, std::uint64_t seed,
                                                   int workers = 1);

struct DoublingRatioRow {
  int l = 1;
  long k = 1;
  double rate = 0.0;
  double d_lower = 0.0;    // s = infinity, high-rate c = v_1
  double d_formula = 0.0;
  double ratio = 0.0;      // analytically 3/7 + 6/(7 pi e) for every l, k
};

std::vector<DoublingRatioRow> doubling_ratio_check(int l, std::span<const long> ks);

// The closed-form value of the ratio above.
double doubling_ratio_constant();

// Exact E[r_c(Omega_A)^2] over the cover of the l-step doubling trajectory set
// induced by the grid with k cells per trajectory segment (k 2^(l-1) cells in
// total): sum over initial cells of P(cell) times the squared enclosing-ball
// radius of the union of path boxes.
double doubling_cover_mean_sq_radius(int l, long k);

// --- 3d nonlinear study -----------------------------------------------------

struct Nonlinear3dRow {
  int grid_n = 0;  // cells per axis
  int l = 0;
  double rate = 0.0;          // log(grid_n^3)
  double d_empirical = 0.0;
  double d_empirical_se = 0.0;
  long inclusion_violations = 0;
  long escapes = 0;
  double bound = 0.0;           // valid-case c
  double bound_highrate = 0.0;  // c = v_3
  double h = 0.0;
  double h_inf = 0.0;
  double c = 0.0;
  double lipschitz = 0.0;
  long transitions = 0;
  bool bound_holds = false;           // d_empirical >= bound
  bool bound_highrate_holds = false;  // d_empirical >= bound_highrate
};

struct Nonlinear3dConfig {
  std::vector<int> grid_sizes = {5, 10, 20};
  std::vector<int> horizons = {2, 3, 4, 5};
  long samples = 2000;
  long entropy_samples = 10000;
  long lipschitz_samples = 4096;
  std::uint64_t seed = 0;
  int workers = 1;
  std::int64_t cell_guard = 100000;  // refuse larger grids unless raised
};

// Uniform-grid abstractions of the 3d system with interval-arithmetic
// transitions, empirical distortion against the entropy bound per (N, l).
std::vector<Nonlinear3dRow> nonlinear3d_experiment(const Nonlinear3dConfig& config);

}  // namespace rdabs

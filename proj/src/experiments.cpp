#include "rdabs/experiments.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rdabs/errors.hpp"

namespace rdabs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long doubling_cells(int l, long k) {
  if (l < 1 || k < 1) throw std::invalid_argument("doubling study: l, k must be >= 1");
  return k << (l - 1);
}

}  // namespace

DoublingClosedForm doubling_optimal_distortion(int l, long k) {
  DoublingClosedForm out;
  out.l = l;
  out.k = k;
  out.cells = doubling_cells(l, k);
  out.rate = std::log(static_cast<double>(out.cells));
  const double kk = static_cast<double>(k) * static_cast<double>(k);
  out.d_formula = 7.0 * (1.0 - std::pow(4.0, -l)) / (9.0 * l * kk);
  out.d_formula_alt = 7.0 / l * std::pow(4.0, l - 2) * (std::pow(4.0, l) - 1.0) *
                      std::exp(-2.0 * out.rate);
  return out;
}

DoublingAchievability doubling_optimal_abstraction(int l, long k, long samples, std::uint64_t seed,
                                                   int workers) {
  DoublingAchievability out;
  out.closed_form = doubling_optimal_distortion(l, k);
  const SystemDef sys = SystemDef::doubling();
  const UniformGrid grid = build_partition(sys.domain(), {static_cast<int>(out.closed_form.cells)});
  TransitionOptions options;
  options.exact = true;
  options.workers = workers;
  const TransitionRelation rel = build_transitions(sys, grid, options);
  out.transitions = rel.transition_count();
  const McDistortion mc = expected_distortion(sys, grid, rel, l, samples, seed, workers);
  out.mc_mean = mc.mean;
  out.mc_se = mc.se;
  out.within_3_se = std::abs(mc.mean - out.closed_form.d_formula) <= 3.0 * mc.se;
  return out;
}

double doubling_ratio_constant() {
  // ((1/(6 pi e) + 1/12) / (7/36)
  return 3.0 / 7.0 + 6.0 / (7.0 * std::numbers::pi * std::numbers::e);
}

std::vector<DoublingRatioRow> doubling_ratio_check(int l, std::span<const long> ks) {
  // Closed-form ingredients: h = h_inf = (log(4^l - 1) - log 3) / 2, c = v_1.
  const double h = 0.5 * (std::log(std::pow(4.0, l) - 1.0) - std::log(3.0));
  const SGridPoint inf_point{kInf, h};
  std::vector<DoublingRatioRow> out;
  out.reserve(ks.size());
  for (const long k : ks) {
    const DoublingClosedForm cf = doubling_optimal_distortion(l, k);
    if (!(cf.rate > 0.0)) continue;  // single-cell abstraction: the bound needs R > 0
    DoublingRatioRow row;
    row.l = l;
    row.k = k;
    row.rate = cf.rate;
    row.d_formula = cf.d_formula;
    row.d_lower =
        distortion_lower_bound(row.rate, 1, l, h, std::span(&inf_point, 1), unit_ball_volume(1))
            .d_lower;
    row.ratio = row.d_lower / row.d_formula;
    out.push_back(row);
  }
  return out;
}

double doubling_cover_mean_sq_radius(int l, long k) {
  const SystemDef sys = SystemDef::doubling();
  const long cells = doubling_cells(l, k);
  const UniformGrid grid = build_partition(sys.domain(), {static_cast<int>(cells)});
  TransitionOptions options;
  options.exact = true;
  const TransitionRelation rel = build_transitions(sys, grid, options);

  double total = 0.0;
  std::vector<BoxRegion> path_boxes;
  std::vector<Interval> prefix(static_cast<std::size_t>(l));
  // Depth-first enumeration of all l-step cell paths from each initial cell;
  // each path contributes the box (cell_0 x ... x cell_{l-1}) in R^l.
  auto extend = [&](auto&& self, std::int64_t cell, int depth) -> void {
    prefix[static_cast<std::size_t>(depth)] = grid.cell(cell).axis(0);
    if (depth + 1 == l) {
      path_boxes.emplace_back(std::vector<Interval>(prefix.begin(), prefix.end()));
      return;
    }
    for (const std::int64_t succ : rel.successors(cell)) self(self, succ, depth + 1);
  };
  for (std::int64_t c = 0; c < cells; ++c) {
    path_boxes.clear();
    extend(extend, c, 0);
    const ChebyshevData ball = chebyshev_of_box_union(path_boxes);
    const double probability = grid.cell(c).axis(0).width();  // uniform initial condition
    total += probability * ball.radius * ball.radius;
  }
  return total;
}

std::vector<Nonlinear3dRow> nonlinear3d_experiment(const Nonlinear3dConfig& config) {
  const SystemDef sys = SystemDef::nonlinear3d();
  const double lipschitz = lipschitz_estimate(sys, config.lipschitz_samples, config.seed);
  const auto s_grid = default_s_grid();

  // Entropy ingredients depend on the horizon only; compute them once per l.
  std::vector<EntropyReport> reports;
  reports.reserve(config.horizons.size());
  for (const int l : config.horizons) {
    reports.push_back(entropy_report(sys, l, s_grid, config.entropy_samples, config.seed,
                                     config.workers, /*prefer_closed_form=*/false));
  }

  std::vector<Nonlinear3dRow> out;
  for (const int grid_n : config.grid_sizes) {
    const std::int64_t cells = static_cast<std::int64_t>(grid_n) * grid_n * grid_n;
    if (cells > config.cell_guard) {
      throw ResourceGuardError("nonlinear3d: " + std::to_string(cells) + " cells exceed the guard of " +
                               std::to_string(config.cell_guard) +
                               " (raise cell_guard to override)");
    }
    const UniformGrid grid = build_partition(sys.domain(), {grid_n, grid_n, grid_n});
    TransitionOptions options;
    options.workers = config.workers;
    const TransitionRelation rel = build_transitions(sys, grid, options);

    for (std::size_t li = 0; li < config.horizons.size(); ++li) {
      const int l = config.horizons[li];
      const EntropyReport& ing = reports[li];
      Nonlinear3dRow row;
      row.grid_n = grid_n;
      row.l = l;
      row.rate = std::log(static_cast<double>(cells));
      row.transitions = rel.transition_count();
      row.lipschitz = lipschitz;

      const McDistortion mc = expected_distortion(sys, grid, rel, l, config.samples, config.seed,
                                                  config.workers);
      row.d_empirical = mc.mean;
      row.d_empirical_se = mc.se;
      row.escapes = mc.escapes;
      row.inclusion_violations =
          check_inclusion(sys, grid, rel, l, config.samples, config.seed, config.workers);

      const CConstant c_valid = c_constant(sys, l, false, lipschitz);
      const CConstant c_high = c_constant(sys, l, true);
      const auto grid_points = bound_s_grid(ing);
      row.bound = distortion_lower_bound(row.rate, 3, l, ing.h, grid_points, c_valid.value).d_lower;
      row.bound_highrate =
          distortion_lower_bound(row.rate, 3, l, ing.h, grid_points, c_high.value).d_lower;
      row.h = ing.h;
      row.h_inf = ing.h_inf;
      row.c = c_valid.value;
      row.bound_holds = row.d_empirical >= row.bound;
      row.bound_highrate_holds = row.d_empirical >= row.bound_highrate;
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace rdabs

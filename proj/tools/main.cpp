#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rdabs/config.hpp"
#include "rdabs/errors.hpp"
#include "rdabs/experiments.hpp"
#include "rdabs/serialize.hpp"

namespace fs = std::filesystem;
using rdabs::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitResourceGuard = 4;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<long> samples;
  std::optional<int> workers;
  bool high_rate_c = false;
  bool to_stdout = false;
};

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

rdabs::RunConfig load_config(const GlobalOptions& opt, bool required = true) {
  rdabs::RunConfig config;
  if (!opt.config_path.empty()) {
    Json j;
    try {
      j = Json::parse(rdabs::read_text_file(opt.config_path));
    } catch (const Json::parse_error& e) {
      throw rdabs::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    config = rdabs::parse_run_config(j);
  } else if (required) {
    throw rdabs::ConfigError("--config PATH is required for this command");
  } else {
    config.system = Json{{"builtin", "doubling"}};
  }
  if (opt.seed) config.seed = *opt.seed;
  if (opt.samples) config.samples = *opt.samples;
  if (opt.workers) config.workers = *opt.workers;
  if (opt.high_rate_c) config.c_mode = "high-rate";
  return config;
}

Json with_meta(Json payload, const rdabs::RunConfig& config) {
  const Json resolved = rdabs::resolved_config_json(config);
  payload["config"] = resolved;
  payload["config_hash"] = hash_hex(rdabs::config_hash(resolved));
  payload["seed"] = config.seed;
  payload["version"] = rdabs::tool_version();
  return payload;
}

void emit(const GlobalOptions& opt, const fs::path& name, const std::string& content) {
  fs::create_directories(opt.out_dir);
  const fs::path path = fs::path(opt.out_dir) / name;
  rdabs::write_text_file(path, content);
  std::cerr << "wrote " << path.string() << "\n";
}

void emit_json(const GlobalOptions& opt, const fs::path& name, const Json& j) {
  emit(opt, name, j.dump(2) + "\n");
  if (opt.to_stdout) std::cout << j.dump(2) << "\n";
}

std::optional<double> estimated_lipschitz(const rdabs::SystemDef& sys,
                                          const rdabs::RunConfig& config) {
  if (sys.smoothness() == rdabs::SmoothnessClass::Affine) return std::nullopt;
  if (sys.exact_lipschitz()) return sys.exact_lipschitz();
  return rdabs::lipschitz_estimate(sys, config.lipschitz_samples, config.seed);
}

double class_constant(const rdabs::SystemDef& sys, std::optional<double> lipschitz) {
  switch (sys.smoothness()) {
    case rdabs::SmoothnessClass::PiecewiseAffine:
      return sys.modes() ? static_cast<double>(*sys.modes()) : 1.0;
    case rdabs::SmoothnessClass::Lipschitz:
      return lipschitz.value_or(0.0);
    case rdabs::SmoothnessClass::Affine:
      return 1.0;
  }
  return 1.0;
}

// ---------------------------------------------------------------------------

int cmd_bound(const GlobalOptions& opt) {
  const rdabs::RunConfig config = load_config(opt);
  const rdabs::SystemDef sys = rdabs::make_system(config.system);
  const int l = config.horizon;
  if (config.rates.empty()) {
    throw rdabs::ConfigError("config error at /rates: required for the bound command");
  }

  std::cerr << "computing entropy ingredients (" << sys.name() << ", l=" << l << ")\n";
  const rdabs::EntropyReport ingredients =
      rdabs::entropy_report(sys, l, config.s_grid, config.entropy_samples, config.seed,
                            config.workers, config.entropy_method == "auto");
  const std::optional<double> lipschitz = estimated_lipschitz(sys, config);
  const rdabs::CConstant c_tight = rdabs::c_constant(sys, l, false, lipschitz);
  const rdabs::CConstant c_high = rdabs::c_constant(sys, l, true);
  const auto points = rdabs::rd_curve(config.rates, sys.dim(), l, ingredients, c_tight, c_high);

  const bool primary_high_rate = config.c_mode == "high-rate";
  const rdabs::CConstant& c_primary = primary_high_rate ? c_high : c_tight;

  Json point_list = Json::array();
  rdabs::CsvWriter csv({"R_nats", "cells", "D_lower", "D_lower_highrate", "s_argmax", "term1",
                        "term2", "h", "h_inf", "c", "c_case"});
  for (const auto& p : points) {
    Json pj = rdabs::rd_point_to_json(p);
    // Entropy-free relaxed variant alongside the full bound.
    const std::vector<rdabs::SGridPoint> renyi0 = {
        {2.0, rdabs::initial_entropy_uniform(sys)},
        {std::numeric_limits<double>::infinity(), rdabs::initial_entropy_uniform(sys)}};
    const rdabs::RelaxedBound relaxed =
        rdabs::relaxed_bound(sys.smoothness(), class_constant(sys, lipschitz), sys.dim(), l,
                             p.rate, rdabs::initial_entropy_uniform(sys), renyi0);
    pj["relaxed"] = Json{{"D_lower", relaxed.d_lower},
                         {"K", relaxed.k_factor},
                         {"case", relaxed.case_tag},
                         {"K_vanishes", relaxed.k_vanishes},
                         {"vacuous", relaxed.vacuous}};
    point_list.push_back(std::move(pj));
    csv.add_row({rdabs::format_double(p.rate), rdabs::format_double(p.cells),
                 rdabs::format_double(p.d_lower), rdabs::format_double(p.d_lower_highrate),
                 rdabs::format_double(p.s_argmax), rdabs::format_double(p.term1),
                 rdabs::format_double(p.term2), rdabs::format_double(p.h),
                 rdabs::format_double(p.h_inf), rdabs::format_double(p.c), p.c_case});
  }

  Json report{{"n", sys.dim()},
              {"l", l},
              {"system", sys.fingerprint()},
              {"ingredients", rdabs::entropy_report_to_json(ingredients)},
              {"c", Json{{"value", c_tight.value}, {"case", c_tight.case_tag}}},
              {"c_highrate", Json{{"value", c_high.value}, {"case", c_high.case_tag}}},
              {"c_mode", config.c_mode},
              {"points", point_list}};
  if (lipschitz) report["lipschitz"] = *lipschitz;

  // Analytic rate-form inverse for a target distortion, when configured.
  if (config.target_distortion) {
    const rdabs::RateBound rate = rdabs::rate_lower_bound(
        *config.target_distortion, sys.dim(), l, ingredients.h, ingredients.h_inf,
        c_primary.value);
    report["R_lower"] = Json{{"target_distortion", *config.target_distortion},
                             {"value", rate.r_lower},
                             {"vacuous", rate.vacuous},
                             {"c_case", c_primary.case_tag}};
  }

  emit_json(opt, "bound_report.json", with_meta(std::move(report), config));
  emit(opt, "rd_curve.csv", csv.str());
  return kExitOk;
}

int cmd_abstract(const GlobalOptions& opt) {
  const rdabs::RunConfig config = load_config(opt);
  const rdabs::SystemDef sys = rdabs::make_system(config.system);
  if (config.grid_counts.empty()) {
    throw rdabs::ConfigError("config error at /grid/counts: required for the abstract command");
  }
  std::int64_t cells = 1;
  for (int c : config.grid_counts) cells *= c;
  if (cells > config.cell_guard) {
    throw rdabs::ResourceGuardError(std::to_string(cells) + " cells exceed the guard of " +
                                    std::to_string(config.cell_guard) +
                                    " (raise /cell_guard to override)");
  }
  const rdabs::UniformGrid grid = rdabs::build_partition(sys.domain(), config.grid_counts);
  rdabs::TransitionOptions options;
  options.exact = config.exact_transitions;
  options.workers = config.workers;

  const auto start = std::chrono::steady_clock::now();
  const rdabs::TransitionRelation rel = rdabs::build_transitions(sys, grid, options);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  Json artifact = rdabs::abstraction_to_json(grid, rel, sys.fingerprint(),
                                             options.exact ? "exact-halfopen" : "interval-hull");
  artifact = with_meta(std::move(artifact), config);
  emit(opt, "abstraction.json", artifact.dump(2) + "\n");

  // Build time goes to stderr only; the artifact stays byte-reproducible.
  std::cerr << "cells: " << grid.cell_count() << ", transitions: " << rel.transition_count()
            << ", build time: " << elapsed.count() << " s\n";
  if (opt.to_stdout) {
    std::cout << Json{{"cells", grid.cell_count()}, {"transitions", rel.transition_count()}}.dump(2)
              << "\n";
  }
  return kExitOk;
}

int cmd_distortion(const GlobalOptions& opt, const std::string& abstraction_path) {
  const rdabs::RunConfig config = load_config(opt);
  const rdabs::SystemDef sys = rdabs::make_system(config.system);
  if (abstraction_path.empty()) {
    throw rdabs::ConfigError("--abstraction PATH is required for the distortion command");
  }
  Json artifact_json;
  try {
    artifact_json = Json::parse(rdabs::read_text_file(abstraction_path));
  } catch (const Json::parse_error& e) {
    throw rdabs::ConfigError(std::string("abstraction artifact is not valid JSON: ") + e.what());
  }
  const rdabs::AbstractionArtifact artifact = rdabs::abstraction_from_json(artifact_json);
  if (artifact.system_fingerprint != sys.fingerprint()) {
    throw rdabs::ConfigError("abstraction artifact was built for a different system: " +
                             artifact.system_fingerprint);
  }

  const rdabs::McDistortion mc = rdabs::expected_distortion(
      sys, artifact.grid, artifact.relation, config.horizon, config.samples, config.seed,
      config.workers);
  const long violations = rdabs::check_inclusion(sys, artifact.grid, artifact.relation,
                                                 config.horizon, config.samples, config.seed,
                                                 config.workers);
  Json report{{"mean", mc.mean},
              {"stderr", mc.se},
              {"samples", mc.samples},
              {"escapes", mc.escapes},
              {"inclusion_violations", violations},
              {"system", sys.fingerprint()},
              {"l", config.horizon}};
  emit_json(opt, "distortion.json", with_meta(std::move(report), config));
  return kExitOk;
}

int cmd_entropy(const GlobalOptions& opt) {
  const rdabs::RunConfig config = load_config(opt);
  const rdabs::SystemDef sys = rdabs::make_system(config.system);
  const rdabs::EntropyReport report =
      rdabs::entropy_report(sys, config.horizon, config.s_grid, config.entropy_samples,
                            config.seed, config.workers, config.entropy_method == "auto");
  Json j = rdabs::entropy_report_to_json(report);
  j["system"] = sys.fingerprint();
  j["l"] = config.horizon;
  // Display-only conversion; everything is computed and stored in nats.
  j["h_bits"] = report.h / std::log(2.0);
  emit_json(opt, "entropy.json", with_meta(std::move(j), config));
  return kExitOk;
}

struct AssertionLog {
  bool ok = true;
  void check(bool condition, const std::string& label) {
    std::cerr << (condition ? "[PASS] " : "[FAIL] ") << label << "\n";
    if (!condition) ok = false;
  }
};

int cmd_reproduce_doubling(const GlobalOptions& opt, std::optional<int> l_override) {
  rdabs::RunConfig config = load_config(opt, /*required=*/false);
  const long samples = opt.samples.value_or(10000);
  AssertionLog log;

  std::vector<int> achievability_ls = {1, 2, 3, 4, 5};
  std::vector<int> ratio_ls = {2, 3, 4, 5};
  if (l_override) {
    achievability_ls = {*l_override};
    ratio_ls = {*l_override};
  }

  rdabs::CsvWriter achievability_csv({"l", "k", "cells", "R_nats", "D_formula", "D_formula_alt",
                                      "D_empirical", "D_empirical_stderr", "within_3se"});
  for (const int l : achievability_ls) {
    for (const long k : {1L, 2L, 4L}) {
      const rdabs::DoublingAchievability a =
          rdabs::doubling_optimal_abstraction(l, k, samples, config.seed, config.workers);
      achievability_csv.add_row(
          {std::to_string(l), std::to_string(k), std::to_string(a.closed_form.cells),
           rdabs::format_double(a.closed_form.rate), rdabs::format_double(a.closed_form.d_formula),
           rdabs::format_double(a.closed_form.d_formula_alt), rdabs::format_double(a.mc_mean),
           rdabs::format_double(a.mc_se), a.within_3_se ? "1" : "0"});
      log.check(a.within_3_se, "optimal abstraction l=" + std::to_string(l) +
                                   " k=" + std::to_string(k) + ": |" +
                                   rdabs::format_double(a.mc_mean) + " - " +
                                   rdabs::format_double(a.closed_form.d_formula) + "| <= 3 se");
    }
  }
  emit(opt, "doubling_achievability.csv", achievability_csv.str());

  std::vector<long> ks;
  for (long k = 1; k <= 64; ++k) ks.push_back(k);
  rdabs::CsvWriter ratio_csv({"l", "k", "R_nats", "D_lower", "D_formula", "ratio"});
  bool ratios_ok = true;
  for (const int l : ratio_ls) {
    for (const auto& row : rdabs::doubling_ratio_check(l, ks)) {
      ratio_csv.add_row({std::to_string(row.l), std::to_string(row.k),
                         rdabs::format_double(row.rate), rdabs::format_double(row.d_lower),
                         rdabs::format_double(row.d_formula), rdabs::format_double(row.ratio)});
      ratios_ok = ratios_ok && row.ratio >= 0.51 && row.ratio <= 0.55;
    }
  }
  emit(opt, "doubling_ratio.csv", ratio_csv.str());
  log.check(ratios_ok, "bound/optimal ratio within [0.51, 0.55] (analytic " +
                           rdabs::format_double(rdabs::doubling_ratio_constant()) + ")");

  return log.ok ? kExitOk : kExitAssertion;
}

int cmd_reproduce_nonlinear3d(const GlobalOptions& opt, const std::vector<int>& grid_sizes,
                              std::int64_t cell_guard) {
  rdabs::RunConfig config = load_config(opt, /*required=*/false);
  rdabs::Nonlinear3dConfig experiment;
  if (!grid_sizes.empty()) experiment.grid_sizes = grid_sizes;
  experiment.samples = opt.samples.value_or(2000);
  experiment.seed = config.seed;
  experiment.workers = config.workers;
  if (cell_guard > 0) experiment.cell_guard = cell_guard;

  std::cerr << "running 3d experiment; grids:";
  for (int n : experiment.grid_sizes) std::cerr << " " << n;
  std::cerr << "\n";
  const auto rows = rdabs::nonlinear3d_experiment(experiment);

  rdabs::CsvWriter csv({"N", "l", "R_nats", "cells", "transitions", "D_empirical",
                        "D_empirical_stderr", "inclusion_violations", "escapes", "D_lower",
                        "D_lower_highrate", "h", "h_inf", "c", "lipschitz"});
  AssertionLog log;
  for (const auto& row : rows) {
    csv.add_row({std::to_string(row.grid_n), std::to_string(row.l),
                 rdabs::format_double(row.rate),
                 std::to_string(static_cast<long>(row.grid_n) * row.grid_n * row.grid_n),
                 std::to_string(row.transitions), rdabs::format_double(row.d_empirical),
                 rdabs::format_double(row.d_empirical_se),
                 std::to_string(row.inclusion_violations), std::to_string(row.escapes),
                 rdabs::format_double(row.bound), rdabs::format_double(row.bound_highrate),
                 rdabs::format_double(row.h), rdabs::format_double(row.h_inf),
                 rdabs::format_double(row.c), rdabs::format_double(row.lipschitz)});
    const std::string tag = "N=" + std::to_string(row.grid_n) + " l=" + std::to_string(row.l);
    log.check(row.inclusion_violations == 0, tag + ": zero inclusion violations");
    log.check(row.bound_holds, tag + ": empirical distortion >= lower bound");
  }
  // Refinement: for each horizon, distortion must not grow with N (3 se slack).
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[i].l == rows[j].l && rows[j].grid_n > rows[i].grid_n) {
        const double slack =
            3.0 * std::sqrt(rows[i].d_empirical_se * rows[i].d_empirical_se +
                            rows[j].d_empirical_se * rows[j].d_empirical_se);
        log.check(rows[j].d_empirical <= rows[i].d_empirical + slack,
                  "l=" + std::to_string(rows[i].l) + ": distortion non-increasing N=" +
                      std::to_string(rows[i].grid_n) + " -> " + std::to_string(rows[j].grid_n));
      }
    }
  }
  emit(opt, "nonlinear3d.csv", csv.str());
  return log.ok ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite abstractions of dynamical systems: distortion, entropy and "
               "rate-distortion lower bounds"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--config", opt.config_path, "JSON run configuration")->expected(1);
  app.add_option("--out", opt.out_dir, "output directory (default: .)");
  app.add_option("--seed", opt.seed, "override the RNG seed");
  app.add_option("--samples", opt.samples, "override the Monte Carlo sample count");
  app.add_option("--workers", opt.workers, "worker threads (results are worker-count invariant)");
  app.add_flag("--high-rate-c", opt.high_rate_c, "report the high-rate c = v_n bound as primary");
  app.add_flag("--stdout", opt.to_stdout, "also print the main JSON result to standard output");

  auto* bound = app.add_subcommand("bound", "rate-distortion lower bound report and curve");
  bound->fallthrough();
  auto* abstract_cmd = app.add_subcommand("abstract", "build a grid abstraction artifact");
  abstract_cmd->fallthrough();
  auto* distortion_cmd =
      app.add_subcommand("distortion", "Monte Carlo distortion of an abstraction artifact");
  distortion_cmd->fallthrough();
  std::string abstraction_path;
  distortion_cmd->add_option("--abstraction", abstraction_path, "abstraction artifact JSON");
  auto* entropy_cmd = app.add_subcommand("entropy", "trajectory entropy report");
  entropy_cmd->fallthrough();
  auto* reproduce = app.add_subcommand("reproduce", "run a built-in experiment");
  reproduce->fallthrough();
  std::string experiment;
  reproduce->add_option("experiment", experiment, "doubling | nonlinear3d")->required();
  int l_override = 0;
  reproduce->add_option("--l", l_override, "restrict the doubling study to one horizon");
  std::vector<int> grid_sizes;
  reproduce->add_option("--N", grid_sizes, "grid sizes for the 3d study (default 5 10 20)");
  std::int64_t cell_guard = 0;
  reproduce->add_option("--cell-guard", cell_guard, "raise the cell-count resource guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (bound->parsed()) return cmd_bound(opt);
    if (abstract_cmd->parsed()) return cmd_abstract(opt);
    if (distortion_cmd->parsed()) return cmd_distortion(opt, abstraction_path);
    if (entropy_cmd->parsed()) return cmd_entropy(opt);
    if (reproduce->parsed()) {
      if (experiment == "doubling") {
        return cmd_reproduce_doubling(
            opt, l_override > 0 ? std::optional<int>(l_override) : std::nullopt);
      }
      if (experiment == "nonlinear3d") {
        return cmd_reproduce_nonlinear3d(opt, grid_sizes, cell_guard);
      }
      throw rdabs::ConfigError("unknown experiment '" + experiment +
                               "' (expected 'doubling' or 'nonlinear3d')");
    }
  } catch (const rdabs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rdabs::ResourceGuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceGuard;
  } catch (const rdabs::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

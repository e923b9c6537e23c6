// Acceptance suite: end-to-end checks of the library's headline guarantees,
// one [PASS]/[FAIL] line per criterion. The CLI binary path is argv[1]
// (needed for the byte-determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rdabs/abstraction.hpp"
#include "rdabs/bounds.hpp"
#include "rdabs/entropy.hpp"
#include "rdabs/experiments.hpp"
#include "rdabs/serialize.hpp"

using namespace rdabs;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string title)
      : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      ok_ = false;
      if (!detail.empty()) details_.push_back(detail);
    }
  }

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void budget(double limit_seconds) {
    elapsed_ = seconds();
    if (elapsed_ > limit_seconds) {
      ok_ = false;
      details_.push_back("runtime " + std::to_string(elapsed_) + " s exceeds " +
                         std::to_string(limit_seconds) + " s");
    }
  }

  ~Criterion() {
    if (elapsed_ < 0) elapsed_ = seconds();
    std::ostringstream line;
    line << (ok_ ? "[PASS]" : "[FAIL]") << " criterion " << number_ << ": " << title_ << " ("
         << elapsed_ << " s)";
    for (const auto& d : details_) line << "\n       - " << d;
    std::cout << line.str() << std::endl;
    if (!ok_) ++failures;
  }

 private:
  int number_;
  std::string title_;
  std::chrono::steady_clock::time_point start_;
  bool ok_ = true;
  double elapsed_ = -1.0;
  std::vector<std::string> details_;
};

Vec scalar_vec(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

double brute_force_distortion(const TrajectoryMatrix& traj, std::int64_t omega0,
                              const TransitionRelation& rel, const UniformGrid& grid) {
  double best = -kInf;
  auto recurse = [&](auto&& self, std::int64_t cell, int t, double acc) -> void {
    const double here = acc + sup_sq_dist(traj.state(t), grid.cell(cell));
    if (t + 1 == traj.l) {
      best = std::max(best, here);
      return;
    }
    for (const std::int64_t succ : rel.successors(cell)) self(self, succ, t + 1, here);
  };
  recurse(recurse, omega0, 0, 0.0);
  return best / traj.l;
}

void criterion_1_doubling_entropy() {
  Criterion c(1, "Monte Carlo doubling entropy at l=3 within 0.01 of log sqrt(21)");
  const McValue h = entropy_mc(SystemDef::doubling(), 3, 100000, 42, 4);
  const double target = std::log(std::sqrt(21.0));
  c.expect(std::abs(h.value - target) < 0.01,
           "h=" + format_double(h.value) + " target=" + format_double(target));
  c.budget(5.0);
}

void criterion_2_square_transitions() {
  Criterion c(2, "square map on five cells yields exactly the nine expected transitions");
  const SystemDef sys = SystemDef::square();
  const UniformGrid grid = build_partition(sys.domain(), {5});
  const TransitionRelation rel = build_transitions(sys, grid);
  std::set<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::int64_t i = 0; i < rel.source_count(); ++i) {
    for (const std::int64_t s : rel.successors(i)) pairs.emplace(i, s);
  }
  const std::set<std::pair<std::int64_t, std::int64_t>> expected = {
      {0, 0}, {1, 0}, {2, 0}, {2, 1}, {3, 1}, {3, 2}, {3, 3}, {4, 3}, {4, 4}};
  c.expect(pairs == expected,
           "got " + std::to_string(pairs.size()) + " transitions, expected exactly 9");
}

void criterion_3_dp_equals_brute_force() {
  Criterion c(3, "dynamic-programming distortion equals brute-force path enumeration");
  const SystemDef systems[] = {SystemDef::doubling(), SystemDef::square(),
                               SystemDef::identity(1, BoxRegion::cube(0, 1, 1))};
  long trajectories = 0;
  double worst = 0.0;
  for (const auto& sys : systems) {
    long per_system = 0;
    for (const int cells : {3, 5, 7, 10}) {
      const UniformGrid grid = build_partition(sys.domain(), {cells});
      const TransitionRelation rel = build_transitions(sys, grid);
      DistortionSolver solver(rel, grid);
      for (const int l : {1, 2, 3, 4}) {
        for (int rep = 0; rep < 65; ++rep) {
          SampleRng rng(90210, static_cast<std::uint64_t>(per_system) * 977 + rep);
          const Vec x0 = sample_uniform(sys.domain(), rng);
          const TrajectoryMatrix traj = behavior(sys, x0, l);
          const std::int64_t omega0 = encode(grid, x0);
          const double dp = solver(traj, omega0);
          const double bf = brute_force_distortion(traj, omega0, rel, grid);
          worst = std::max(worst, std::abs(dp - bf) / std::max(1.0, std::abs(bf)));
          ++per_system;
        }
      }
    }
    trajectories += per_system;
  }
  c.expect(trajectories >= 3000, "only " + std::to_string(trajectories) + " trajectories");
  c.expect(worst <= 1e-12, "worst relative deviation " + format_double(worst));
  c.budget(60.0);
}

void criterion_4_doubling_achievability() {
  Criterion c(4, "constructed optimal doubling abstractions match the derived closed form");
  for (int l = 1; l <= 5; ++l) {
    for (const long k : {1L, 2L, 4L}) {
      const DoublingAchievability a = doubling_optimal_abstraction(l, k, 10000, 1234, 4);
      c.expect(a.within_3_se, "l=" + std::to_string(l) + " k=" + std::to_string(k) + ": mean " +
                                  format_double(a.mc_mean) + " vs " +
                                  format_double(a.closed_form.d_formula) + " (se " +
                                  format_double(a.mc_se) + ")");
    }
  }
}

void criterion_5_consistently_half() {
  Criterion c(5, "bound-to-optimal-distortion ratio stays in [0.51, 0.55]");
  std::vector<long> ks;
  for (long k = 1; k <= 64; ++k) ks.push_back(k);
  for (int l = 2; l <= 5; ++l) {
    for (const auto& row : doubling_ratio_check(l, ks)) {
      c.expect(row.ratio >= 0.51 && row.ratio <= 0.55,
               "l=" + std::to_string(l) + " k=" + std::to_string(row.k) + ": ratio " +
                   format_double(row.ratio));
    }
  }
  c.budget(1.0);
}

void criterion_6_rate_inverse() {
  Criterion c(6, "rate bound analytically inverts the distortion bound at s=inf");
  const int l = 5;
  const double h = 0.5 * (std::log(1023.0) - std::log(3.0));
  const std::vector<SGridPoint> grid = {{kInf, h}};
  for (const double cv : {unit_ball_volume(1), c_constant(SystemDef::doubling(), l).value}) {
    for (int i = 1; i <= 20; ++i) {
      const double rate = std::log(4.0) + 0.3 * i;
      const double d = distortion_lower_bound(rate, 1, l, h, grid, cv).d_lower;
      const RateBound inv = rate_lower_bound(d, 1, l, h, h, cv);
      c.expect(std::abs(inv.r_lower - rate) <= 1e-10,
               "R=" + format_double(rate) + " round-trips to " + format_double(inv.r_lower));
    }
  }
}

void criterion_7_nonlinear3d() {
  Criterion c(7, "3d experiment: bound validity, inclusion, refinement monotonicity");
  Nonlinear3dConfig config;
  config.grid_sizes = {5, 10, 20};
  config.horizons = {2, 3, 4, 5};
  config.samples = 2000;
  config.entropy_samples = 10000;
  config.seed = 271828;
  config.workers = 4;
  const auto rows = nonlinear3d_experiment(config);
  for (const auto& row : rows) {
    const std::string tag = "N=" + std::to_string(row.grid_n) + " l=" + std::to_string(row.l);
    c.expect(row.inclusion_violations == 0,
             tag + ": " + std::to_string(row.inclusion_violations) + " inclusion violations");
    c.expect(row.bound_holds, tag + ": empirical " + format_double(row.d_empirical) +
                                  " < bound " + format_double(row.bound));
  }
  for (const auto& coarse : rows) {
    for (const auto& fine : rows) {
      if (coarse.l == fine.l && fine.grid_n > coarse.grid_n) {
        const double slack = 3.0 * std::sqrt(coarse.d_empirical_se * coarse.d_empirical_se +
                                             fine.d_empirical_se * fine.d_empirical_se);
        c.expect(fine.d_empirical <= coarse.d_empirical + slack,
                 "l=" + std::to_string(coarse.l) + ": N=" + std::to_string(fine.grid_n) +
                     " has larger distortion than N=" + std::to_string(coarse.grid_n));
      }
    }
  }
  c.budget(600.0);
}

void criterion_8_property_suites() {
  Criterion c(8, "property suites: determinants, entropies, intervals, jacobians, covers");

  // det(J^T J) >= 1 wherever sampled.
  {
    const SystemDef systems[] = {SystemDef::doubling(), SystemDef::square(),
                                 SystemDef::nonlinear3d()};
    bool ok = true;
    for (const auto& sys : systems) {
      for (int l : {1, 3, 5}) {
        for (int rep = 0; rep < 200; ++rep) {
          SampleRng rng(11, static_cast<std::uint64_t>(rep));
          const Vec x = sample_uniform(sys.domain(), rng);
          ok = ok && log_det_gram(jacobian_chain(sys, x, l).jac) >= -1e-10;
        }
      }
    }
    c.expect(ok, "found det(J^T J) < 1");
  }

  // h >= h(xi0), h_s >= h_s(xi0), Renyi monotone in s.
  {
    const SystemDef systems[] = {SystemDef::square(), SystemDef::nonlinear3d()};
    for (const auto& sys : systems) {
      const double h0 = initial_entropy_uniform(sys);
      for (int l : {2, 3}) {
        const McValue h = entropy_mc(sys, l, 5000, 13, 4);
        c.expect(h.value >= h0 - 3.0 * h.se - 1e-12, "h < h(xi0)");
        double previous = kInf;
        for (double s : {1.5, 2.0, 4.0, 8.0}) {
          const McValue hs = renyi_mc(sys, l, s, 5000, 13, 4);
          c.expect(hs.value >= h0 - 3.0 * hs.se - 1e-12, "h_s < h_s(xi0)");
          c.expect(hs.value <= previous + 3.0 * hs.se + 1e-12, "h_s increased in s");
          previous = hs.value;
        }
        c.expect(renyi_sup(sys, l, 5000, 13, 4) >= h0 - 1e-12, "h_inf < h(xi0)");
      }
    }
  }

  // Interval soundness: 1e5 point-in-box checks, zero violations.
  {
    const std::vector<std::string> exprs = {
        "0.9*x1 + 0.1*sin(x2)", "2*x2^3 - x2",        "0.9*x3 + 0.1*x1*x2",
        "mod1(2*x1)",           "abs(x1 - x2)",       "min(x1, x2*x3)",
        "max(sin(x1), cos(x2))", "exp(-(x1^2)) * cos(3*x2)", "log(1 + x1^2 + x3^2)",
        "(x1 + 2) / (x2 + 6)",  "x1^4 - 2*x1^2 + x2"};
    long violations = 0;
    long checks = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      SampleRng rng(1234, static_cast<std::uint64_t>(rep));
      std::vector<Interval> box;
      for (int i = 0; i < 3; ++i) {
        double a = rng.next_in(-2, 2);
        double b = rng.next_in(-2, 2);
        if (a > b) std::swap(a, b);
        box.emplace_back(a, b);
      }
      const ExprPtr e = parse_expression(exprs[rep % exprs.size()], 3);
      const Interval enclosure = eval_interval(*e, box);
      for (int p = 0; p < 100; ++p) {
        SampleRng prng(4321, static_cast<std::uint64_t>(rep) * 128 + p);
        std::vector<double> point;
        for (const auto& ax : box) point.push_back(prng.next_in(ax.lo, ax.hi));
        const double v = eval_scalar(*e, std::span<const double>(point));
        const double tol = 1e-9 * (1.0 + std::abs(enclosure.lo) + std::abs(enclosure.hi));
        ++checks;
        if (v < enclosure.lo - tol || v > enclosure.hi + tol) ++violations;
      }
    }
    c.expect(checks == 100000, "expected 1e5 interval checks");
    c.expect(violations == 0, std::to_string(violations) + " interval soundness violations");
  }

  // Forward-mode jacobian chains vs central finite differences, < 1e-5 relative.
  {
    const SystemDef systems[] = {
        SystemDef::square(), SystemDef::nonlinear3d(),
        SystemDef::from_expressions({"0.8*x1 + 0.05*sin(3*x2)", "0.9*x2 - 0.1*x1^3"},
                                    BoxRegion::cube(-1, 1, 2), SmoothnessClass::Lipschitz, 1.2)};
    double worst = 0.0;
    for (const auto& sys : systems) {
      for (int rep = 0; rep < 100; ++rep) {
        SampleRng rng(777, static_cast<std::uint64_t>(rep));
        Vec x(sys.dim());
        for (int i = 0; i < sys.dim(); ++i) {
          const auto& ax = sys.domain().axis(i);
          x[i] = ax.lo + ax.width() * (0.1 + 0.8 * rng.next_unit());
        }
        const int l = 3;
        const Mat exact = jacobian_chain(sys, x, l).jac;
        Mat fd(exact.rows(), exact.cols());
        for (int col = 0; col < sys.dim(); ++col) {
          const double h = 1e-6 * std::max(1.0, std::abs(x[col]));
          Vec xp = x, xm = x;
          xp[col] += h;
          xm[col] -= h;
          const TrajectoryMatrix tp = behavior(sys, xp, l);
          const TrajectoryMatrix tm = behavior(sys, xm, l);
          for (int t = 0; t < l; ++t) {
            for (int row = 0; row < sys.dim(); ++row) {
              fd(t * sys.dim() + row, col) =
                  (tp.state(t)[row] - tm.state(t)[row]) / (2.0 * h);
            }
          }
        }
        for (int r = 0; r < exact.rows(); ++r) {
          for (int col = 0; col < exact.cols(); ++col) {
            const double scale = std::max({1e-3, std::abs(exact(r, col)), std::abs(fd(r, col))});
            worst = std::max(worst, std::abs(exact(r, col) - fd(r, col)) / scale);
          }
        }
      }
    }
    c.expect(worst < 1e-5, "worst jacobian deviation " + format_double(worst));
  }

  // Covering inequality on the doubling trajectory set at orders 2 and inf.
  {
    const int l = 3;
    const double h_s = 0.5 * std::log(21.0);
    const double cc = c_constant(SystemDef::doubling(), l).value;
    for (const long k : {1L, 2L, 4L, 8L}) {
      const double lhs = doubling_cover_mean_sq_radius(l, k);
      const double n_cover = 4.0 * static_cast<double>(k);
      for (const double s : {2.0, kInf}) {
        const double exponent = std::isinf(s) ? -2.0 : -2.0 / (1.0 - 1.0 / s);
        const double rhs = std::pow(cc, -2.0) * std::exp(2.0 * h_s) * std::pow(n_cover, exponent);
        c.expect(lhs >= rhs, "cover inequality failed at k=" + std::to_string(k) +
                                 " s=" + format_double(s));
      }
    }
  }
}

void criterion_9_asymptotics() {
  Criterion c(9, "Schur horizon decay and identity horizon invariance");
  // Schur scalar A = 0.5 on [-1, 1], fixed rate log 8.
  {
    Mat a(1, 1);
    a << 0.5;
    const SystemDef sys = SystemDef::lti(a, BoxRegion::cube(-1, 1, 1));
    const double rate = std::log(8.0);
    auto bound_at = [&](int l) {
      const EntropyReport r = entropy_closed_form(ClosedFormKind::LtiSchur, sys, l, {});
      const std::vector<SGridPoint> grid = {{kInf, r.h_inf}};
      return distortion_lower_bound(rate, 1, l, r.h, grid, unit_ball_volume(1)).d_lower;
    };
    const double at5 = bound_at(5);
    const double at50 = bound_at(50);
    const double trend50 = std::exp(-2.0 * rate) * std::exp(2.0 * std::log(2.0)) * (4.0 / 3.0) *
                           (1.0 / (2.0 * std::numbers::pi * std::numbers::e) + 0.25) / 50.0;
    c.expect(at50 < at5, "bound did not decrease from l=5 to l=50");
    c.expect(at50 < 1.05 * trend50, "l=50 bound " + format_double(at50) +
                                        " not within 1.05x of the trend " + format_double(trend50));
  }
  // Identity on [0, 1]: the bound is horizon-free.
  {
    double reference = 0.0;
    for (const int l : {2, 5, 10}) {
      const double h = 0.5 * std::log(static_cast<double>(l));
      const std::vector<SGridPoint> grid = {{2.0, h}, {kInf, h}};
      const double d = distortion_lower_bound(std::log(8.0), 1, l, h, grid, 2.0).d_lower;
      if (l == 2) {
        reference = d;
      } else {
        c.expect(std::abs(d - reference) <= 1e-10,
                 "identity bound changed between horizons: " + format_double(d) + " vs " +
                     format_double(reference));
      }
    }
  }
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string command = "\"" + cli + "\" " + args + " >/dev/null 2>&1";
  return std::system(command.c_str());
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  const std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  return !sa.empty() && sa == sb;
}

void criterion_10_cli_determinism(const std::string& cli) {
  Criterion c(10, "CLI outputs are byte-identical across reruns and worker counts");
  if (cli.empty()) {
    c.expect(false, "no CLI path supplied (argv[1])");
    return;
  }
  const fs::path root = fs::temp_directory_path() /
                        ("rdabs_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  const fs::path bound_cfg = root / "bound.json";
  write_text_file(bound_cfg,
                  R"({"system": {"builtin": "doubling"}, "horizon": 5,
                      "rates": {"cells": [16, 32, 64]}, "seed": 9})");
  const fs::path mc_cfg = root / "mc.json";
  write_text_file(mc_cfg,
                  R"({"system": {"builtin": "nonlinear3d"}, "horizon": 3,
                      "samples": 500, "entropy_samples": 500,
                      "entropy_method": "monte-carlo", "seed": 11})");
  const fs::path sq_cfg = root / "square.json";
  write_text_file(sq_cfg,
                  R"({"system": {"builtin": "square"}, "horizon": 3,
                      "grid": {"counts": [5]}, "samples": 800, "seed": 13})");

  auto out = [&](const std::string& name) { return (root / name).string(); };

  c.expect(run_cli(cli, "bound --config " + bound_cfg.string() + " --out " + out("b1") +
                            " --workers 1") == 0, "bound run failed");
  c.expect(run_cli(cli, "bound --config " + bound_cfg.string() + " --out " + out("b4") +
                            " --workers 4") == 0, "bound rerun failed");
  c.expect(same_bytes(root / "b1" / "bound_report.json", root / "b4" / "bound_report.json"),
           "bound_report.json differs across worker counts");
  c.expect(same_bytes(root / "b1" / "rd_curve.csv", root / "b4" / "rd_curve.csv"),
           "rd_curve.csv differs across worker counts");

  c.expect(run_cli(cli, "entropy --config " + mc_cfg.string() + " --out " + out("e1") +
                            " --workers 1") == 0, "entropy run failed");
  c.expect(run_cli(cli, "entropy --config " + mc_cfg.string() + " --out " + out("e4") +
                            " --workers 4") == 0, "entropy rerun failed");
  c.expect(run_cli(cli, "entropy --config " + mc_cfg.string() + " --out " + out("e4b") +
                            " --workers 4") == 0, "entropy second rerun failed");
  c.expect(same_bytes(root / "e1" / "entropy.json", root / "e4" / "entropy.json"),
           "entropy.json differs across worker counts");
  c.expect(same_bytes(root / "e4" / "entropy.json", root / "e4b" / "entropy.json"),
           "entropy.json differs across identical reruns");

  c.expect(run_cli(cli, "abstract --config " + sq_cfg.string() + " --out " + out("a1") +
                            " --workers 1") == 0, "abstract run failed");
  c.expect(run_cli(cli, "abstract --config " + sq_cfg.string() + " --out " + out("a4") +
                            " --workers 4") == 0, "abstract rerun failed");
  c.expect(same_bytes(root / "a1" / "abstraction.json", root / "a4" / "abstraction.json"),
           "abstraction.json differs across worker counts");

  const std::string artifact = (root / "a1" / "abstraction.json").string();
  c.expect(run_cli(cli, "distortion --config " + sq_cfg.string() + " --abstraction " + artifact +
                            " --out " + out("d1") + " --workers 1") == 0, "distortion run failed");
  c.expect(run_cli(cli, "distortion --config " + sq_cfg.string() + " --abstraction " + artifact +
                            " --out " + out("d4") + " --workers 4") == 0,
           "distortion rerun failed");
  c.expect(same_bytes(root / "d1" / "distortion.json", root / "d4" / "distortion.json"),
           "distortion.json differs across worker counts");

  fs::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  criterion_1_doubling_entropy();
  criterion_2_square_transitions();
  criterion_3_dp_equals_brute_force();
  criterion_4_doubling_achievability();
  criterion_5_consistently_half();
  criterion_6_rate_inverse();
  criterion_7_nonlinear3d();
  criterion_8_property_suites();
  criterion_9_asymptotics();
  criterion_10_cli_determinism(cli);
  if (failures) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}

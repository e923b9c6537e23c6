#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rdabs/abstraction.hpp"
#include "rdabs/bounds.hpp"
#include "rdabs/dynamics.hpp"
#include "rdabs/entropy.hpp"
#include "rdabs/errors.hpp"
#include "rdabs/experiments.hpp"
#include "rdabs/expr.hpp"
#include "rdabs/geometry.hpp"
#include "rdabs/serialize.hpp"

namespace py = pybind11;
using namespace rdabs;

namespace {

std::vector<Interval> to_intervals(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<Interval> out;
  out.reserve(pairs.size());
  for (const auto& [lo, hi] : pairs) out.emplace_back(lo, hi);
  return out;
}

std::vector<SGridPoint> to_grid(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<SGridPoint> out;
  out.reserve(pairs.size());
  for (const auto& [s, h] : pairs) out.push_back({s, h});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite abstractions of dynamical systems: distortion, trajectory entropy "
            "and rate-distortion lower bounds";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<ParseError>(m, "ExpressionParseError");
  py::register_exception<EvalError>(m, "EvalError");
  py::register_exception<NumericError>(m, "NumericFailure");
  py::register_exception<ResourceGuardError>(m, "ResourceGuardError");

  // --- geometry -------------------------------------------------------------
  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readonly("lo", &Interval::lo)
      .def_readonly("hi", &Interval::hi)
      .def("width", &Interval::width)
      .def("mid", &Interval::mid)
      .def("contains", &Interval::contains)
      .def("__repr__", [](const Interval& i) {
        return "Interval(" + format_double(i.lo) + ", " + format_double(i.hi) + ")";
      });

  py::class_<BoxRegion>(m, "BoxRegion")
      .def(py::init([](const std::vector<std::pair<double, double>>& axes) {
             return BoxRegion(to_intervals(axes));
           }),
           py::arg("axes"))
      .def_static("cube", &BoxRegion::cube, py::arg("lo"), py::arg("hi"), py::arg("dim"))
      .def_property_readonly("dim", &BoxRegion::dim)
      .def("axis", &BoxRegion::axis, py::return_value_policy::copy)
      .def("volume", &BoxRegion::volume)
      .def("midpoint", &BoxRegion::midpoint)
      .def("contains", &BoxRegion::contains, py::arg("point"), py::arg("tol") = 0.0);

  py::class_<ChebyshevData>(m, "ChebyshevData")
      .def_readonly("center", &ChebyshevData::center)
      .def_readonly("radius", &ChebyshevData::radius);

  m.def("unit_ball_volume", &unit_ball_volume, py::arg("n"));
  m.def("gamma_one_plus_half", &gamma_one_plus_half, py::arg("n"));
  m.def("chebyshev_of_box", &chebyshev_of_box, py::arg("box"));
  m.def("sup_sq_dist", &sup_sq_dist, py::arg("point"), py::arg("box"));
  m.def("min_enclosing_ball",
        [](const std::vector<Vec>& points) { return min_enclosing_ball(points); },
        py::arg("points"));
  m.def("chebyshev_of_box_union",
        [](const std::vector<BoxRegion>& boxes) { return chebyshev_of_box_union(boxes); },
        py::arg("boxes"));

  // --- expressions ----------------------------------------------------------
  m.def("eval_expression",
        [](const std::string& text, const Vec& env) {
          const ExprPtr e = parse_expression(text, static_cast<int>(env.size()));
          return eval_scalar(*e, env);
        },
        py::arg("text"), py::arg("env"),
        "Parse and evaluate an expression at a point; variables are x1..xn.");
  m.def("eval_expression_interval",
        [](const std::string& text, const std::vector<std::pair<double, double>>& env) {
          const auto intervals = to_intervals(env);
          const ExprPtr e = parse_expression(text, static_cast<int>(intervals.size()));
          const Interval r = eval_interval(*e, intervals);
          return std::make_pair(r.lo, r.hi);
        },
        py::arg("text"), py::arg("env"),
        "Natural interval extension over a box given as (lo, hi) pairs.");
  m.def("eval_expression_gradient",
        [](const std::string& text, const Vec& env) {
          const int n = static_cast<int>(env.size());
          const ExprPtr e = parse_expression(text, n);
          std::vector<Dual> duals;
          duals.reserve(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) duals.push_back(dual_variable(env[i], i, n));
          const Dual d = eval_dual(*e, duals);
          return std::make_pair(d.v, d.g);
        },
        py::arg("text"), py::arg("env"), "Value and gradient by forward-mode dual numbers.");
  m.def("normalize_expression",
        [](const std::string& text, int dimension) {
          return format_expression(*parse_expression(text, dimension));
        },
        py::arg("text"), py::arg("dimension"));

  // --- dynamics ---------------------------------------------------------------
  py::enum_<SmoothnessClass>(m, "SmoothnessClass")
      .value("AFFINE", SmoothnessClass::Affine)
      .value("PIECEWISE_AFFINE", SmoothnessClass::PiecewiseAffine)
      .value("LIPSCHITZ", SmoothnessClass::Lipschitz);

  py::class_<SystemDef>(m, "SystemDef")
      .def_static("doubling", &SystemDef::doubling)
      .def_static("square", &SystemDef::square)
      .def_static("identity", &SystemDef::identity, py::arg("n"), py::arg("domain"))
      .def_static("lti", &SystemDef::lti, py::arg("a"), py::arg("domain"))
      .def_static("nonlinear3d", &SystemDef::nonlinear3d)
      .def_static("from_expressions", &SystemDef::from_expressions, py::arg("expressions"),
                  py::arg("domain"), py::arg("smoothness"), py::arg("lipschitz") = std::nullopt,
                  py::arg("modes") = std::nullopt)
      .def_property_readonly("dim", &SystemDef::dim)
      .def_property_readonly("domain", &SystemDef::domain)
      .def_property_readonly("smoothness", &SystemDef::smoothness)
      .def_property_readonly("exact_lipschitz", &SystemDef::exact_lipschitz)
      .def_property_readonly("modes", &SystemDef::modes)
      .def_property_readonly("name", &SystemDef::name)
      .def("fingerprint", &SystemDef::fingerprint)
      .def("apply", &SystemDef::apply, py::arg("x"))
      .def("jacobian", &SystemDef::jacobian, py::arg("x"));

  py::class_<TrajectoryMatrix>(m, "TrajectoryMatrix")
      .def_readonly("n", &TrajectoryMatrix::n)
      .def_readonly("l", &TrajectoryMatrix::l)
      .def_readonly("states", &TrajectoryMatrix::states)
      .def_readonly("escapes", &TrajectoryMatrix::escapes)
      .def_property_readonly("jacobian",
                             [](const TrajectoryMatrix& t) -> std::optional<Mat> {
                               if (!t.has_jacobian()) return std::nullopt;
                               return t.jac;
                             });

  m.def("step", &step, py::arg("system"), py::arg("x"));
  m.def("behavior", &behavior, py::arg("system"), py::arg("xi0"), py::arg("l"));
  m.def("jacobian_chain", &jacobian_chain, py::arg("system"), py::arg("xi0"), py::arg("l"));
  m.def("log_det_gram", &log_det_gram, py::arg("jac"));
  m.def("spectral_norm", &spectral_norm, py::arg("a"), py::arg("tol") = 1e-10);
  m.def("lipschitz_estimate", &lipschitz_estimate, py::arg("system"), py::arg("samples"),
        py::arg("seed"));

  // --- abstraction ------------------------------------------------------------
  py::class_<UniformGrid>(m, "UniformGrid")
      .def(py::init<BoxRegion, std::vector<int>>(), py::arg("domain"), py::arg("counts"))
      .def_property_readonly("dim", &UniformGrid::dim)
      .def_property_readonly("cell_count", &UniformGrid::cell_count)
      .def_property_readonly("counts", &UniformGrid::counts)
      .def("cell", &UniformGrid::cell, py::arg("index"))
      .def("locate", &UniformGrid::locate, py::arg("point"));

  py::class_<TransitionRelation>(m, "TransitionRelation")
      .def_property_readonly("transition_count", &TransitionRelation::transition_count)
      .def("successors",
           [](const TransitionRelation& rel, std::int64_t cell) {
             const auto s = rel.successors(cell);
             return std::vector<std::int64_t>(s.begin(), s.end());
           },
           py::arg("cell"))
      .def("has", &TransitionRelation::has, py::arg("source"), py::arg("target"));

  py::class_<TransitionOptions>(m, "TransitionOptions")
      .def(py::init<>())
      .def_readwrite("exact", &TransitionOptions::exact)
      .def_readwrite("workers", &TransitionOptions::workers);

  py::class_<McDistortion>(m, "McDistortion")
      .def_readonly("mean", &McDistortion::mean)
      .def_readonly("stderr", &McDistortion::se)
      .def_readonly("escapes", &McDistortion::escapes)
      .def_readonly("samples", &McDistortion::samples);

  m.def("build_partition", &build_partition, py::arg("domain"), py::arg("counts"));
  m.def("build_transitions", &build_transitions, py::arg("system"), py::arg("grid"),
        py::arg("options") = TransitionOptions{});
  m.def("encode", &encode, py::arg("grid"), py::arg("xi0"));
  m.def("distortion", &distortion, py::arg("trajectory"), py::arg("omega0"), py::arg("relation"),
        py::arg("grid"));
  m.def("expected_distortion", &expected_distortion, py::arg("system"), py::arg("grid"),
        py::arg("relation"), py::arg("l"), py::arg("samples"), py::arg("seed"),
        py::arg("workers") = 1);
  m.def("check_inclusion", &check_inclusion, py::arg("system"), py::arg("grid"),
        py::arg("relation"), py::arg("l"), py::arg("samples"), py::arg("seed"),
        py::arg("workers") = 1);
  m.def("abstraction_to_json",
        [](const UniformGrid& grid, const TransitionRelation& rel, const std::string& fingerprint,
           const std::string& rule) {
          return abstraction_to_json(grid, rel, fingerprint, rule).dump(2);
        },
        py::arg("grid"), py::arg("relation"), py::arg("fingerprint"),
        py::arg("rule") = "interval-hull");
  m.def("abstraction_from_json",
        [](const std::string& text) {
          const AbstractionArtifact a = abstraction_from_json(nlohmann::json::parse(text));
          return std::make_tuple(a.grid, a.relation, a.system_fingerprint, a.rule);
        },
        py::arg("text"));

  // --- entropy ----------------------------------------------------------------
  py::class_<McValue>(m, "McValue")
      .def_readonly("value", &McValue::value)
      .def_readonly("stderr", &McValue::se);

  py::class_<RenyiPoint>(m, "RenyiPoint")
      .def_readonly("s", &RenyiPoint::s)
      .def_readonly("value", &RenyiPoint::value)
      .def_readonly("stderr", &RenyiPoint::se);

  py::class_<EntropyReport>(m, "EntropyReport")
      .def_readonly("h", &EntropyReport::h)
      .def_readonly("h_stderr", &EntropyReport::h_se)
      .def_readonly("renyi", &EntropyReport::renyi)
      .def_readonly("h_inf", &EntropyReport::h_inf)
      .def_readonly("method", &EntropyReport::method)
      .def_readonly("samples", &EntropyReport::samples)
      .def_readonly("seed", &EntropyReport::seed)
      .def("to_json", [](const EntropyReport& r) { return entropy_report_to_json(r).dump(2); });

  py::enum_<ClosedFormKind>(m, "ClosedFormKind")
      .value("DOUBLING", ClosedFormKind::Doubling)
      .value("IDENTITY", ClosedFormKind::Identity)
      .value("LTI_SCHUR", ClosedFormKind::LtiSchur);

  m.def("entropy_mc", &entropy_mc, py::arg("system"), py::arg("l"), py::arg("samples"),
        py::arg("seed"), py::arg("workers") = 1);
  m.def("renyi_mc", &renyi_mc, py::arg("system"), py::arg("l"), py::arg("s"), py::arg("samples"),
        py::arg("seed"), py::arg("workers") = 1);
  m.def("renyi_sup", &renyi_sup, py::arg("system"), py::arg("l"), py::arg("samples"),
        py::arg("seed"), py::arg("workers") = 1);
  m.def("entropy_closed_form",
        [](ClosedFormKind kind, const SystemDef& sys, int l, const std::vector<double>& s_grid) {
          return entropy_closed_form(kind, sys, l, s_grid);
        },
        py::arg("kind"), py::arg("system"), py::arg("l"),
        py::arg("s_grid") = std::vector<double>{});
  m.def("entropy_report",
        [](const SystemDef& sys, int l, const std::vector<double>& s_grid, long samples,
           std::uint64_t seed, int workers, bool prefer_closed_form) {
          return entropy_report(sys, l, s_grid, samples, seed, workers, prefer_closed_form);
        },
        py::arg("system"), py::arg("l"), py::arg("s_grid"), py::arg("samples"), py::arg("seed"),
        py::arg("workers") = 1, py::arg("prefer_closed_form") = true);
  m.def("initial_entropy_uniform", &initial_entropy_uniform, py::arg("system"));

  // --- bounds -----------------------------------------------------------------
  py::class_<CConstant>(m, "CConstant")
      .def_readonly("value", &CConstant::value)
      .def_readonly("case_tag", &CConstant::case_tag);

  py::class_<DistortionBound>(m, "DistortionBound")
      .def_readonly("d_lower", &DistortionBound::d_lower)
      .def_readonly("term1", &DistortionBound::term1)
      .def_readonly("term2", &DistortionBound::term2)
      .def_readonly("s_argmax", &DistortionBound::s_argmax);

  py::class_<RateBound>(m, "RateBound")
      .def_readonly("r_lower", &RateBound::r_lower)
      .def_readonly("vacuous", &RateBound::vacuous);

  py::class_<RelaxedBound>(m, "RelaxedBound")
      .def_readonly("d_lower", &RelaxedBound::d_lower)
      .def_readonly("k_factor", &RelaxedBound::k_factor)
      .def_readonly("case_tag", &RelaxedBound::case_tag)
      .def_readonly("k_vanishes", &RelaxedBound::k_vanishes)
      .def_readonly("vacuous", &RelaxedBound::vacuous)
      .def_readonly("r_lower", &RelaxedBound::r_lower);

  py::class_<RdPoint>(m, "RdPoint")
      .def_readonly("rate", &RdPoint::rate)
      .def_readonly("cells", &RdPoint::cells)
      .def_readonly("d_lower", &RdPoint::d_lower)
      .def_readonly("d_lower_highrate", &RdPoint::d_lower_highrate)
      .def_readonly("term1", &RdPoint::term1)
      .def_readonly("term2", &RdPoint::term2)
      .def_readonly("s_argmax", &RdPoint::s_argmax)
      .def_readonly("h", &RdPoint::h)
      .def_readonly("h_inf", &RdPoint::h_inf)
      .def_readonly("c", &RdPoint::c)
      .def_readonly("c_case", &RdPoint::c_case)
      .def("to_json", [](const RdPoint& p) { return rd_point_to_json(p).dump(2); });

  m.def("c_constant", &c_constant, py::arg("system"), py::arg("l"), py::arg("high_rate") = false,
        py::arg("lipschitz") = std::nullopt);
  m.def("distortion_lower_bound",
        [](double rate, int n, int l, double h,
           const std::vector<std::pair<double, double>>& renyi, double c) {
          return distortion_lower_bound(rate, n, l, h, to_grid(renyi), c);
        },
        py::arg("rate"), py::arg("n"), py::arg("l"), py::arg("h"), py::arg("renyi"), py::arg("c"),
        "renyi is a list of (s, h_s) pairs; use s = float('inf') for the sup entry.");
  m.def("rate_lower_bound", &rate_lower_bound, py::arg("d"), py::arg("n"), py::arg("l"),
        py::arg("h"), py::arg("h_inf"), py::arg("c"));
  m.def("relaxed_bound",
        [](SmoothnessClass cls, double l_or_m, int n, int l, double rate, double h0,
           const std::vector<std::pair<double, double>>& renyi0, std::optional<double> target_d) {
          return relaxed_bound(cls, l_or_m, n, l, rate, h0, to_grid(renyi0), target_d);
        },
        py::arg("smoothness"), py::arg("l_or_m"), py::arg("n"), py::arg("l"), py::arg("rate"),
        py::arg("h0"), py::arg("renyi0"), py::arg("target_d") = std::nullopt);
  m.def("rd_curve",
        [](const std::vector<double>& rates, int n, int l, const EntropyReport& ingredients,
           const CConstant& c_valid, const CConstant& c_high) {
          return rd_curve(rates, n, l, ingredients, c_valid, c_high);
        },
        py::arg("rates"), py::arg("n"), py::arg("l"), py::arg("ingredients"), py::arg("c_valid"),
        py::arg("c_highrate"));
  m.def("default_s_grid", &default_s_grid);

  // --- experiments --------------------------------------------------------------
  py::class_<DoublingClosedForm>(m, "DoublingClosedForm")
      .def_readonly("l", &DoublingClosedForm::l)
      .def_readonly("k", &DoublingClosedForm::k)
      .def_readonly("cells", &DoublingClosedForm::cells)
      .def_readonly("rate", &DoublingClosedForm::rate)
      .def_readonly("d_formula", &DoublingClosedForm::d_formula)
      .def_readonly("d_formula_alt", &DoublingClosedForm::d_formula_alt);

  py::class_<DoublingAchievability>(m, "DoublingAchievability")
      .def_readonly("closed_form", &DoublingAchievability::closed_form)
      .def_readonly("transitions", &DoublingAchievability::transitions)
      .def_readonly("mc_mean", &DoublingAchievability::mc_mean)
      .def_readonly("mc_stderr", &DoublingAchievability::mc_se)
      .def_readonly("within_3_stderr", &DoublingAchievability::within_3_se);

  py::class_<DoublingRatioRow>(m, "DoublingRatioRow")
      .def_readonly("l", &DoublingRatioRow::l)
      .def_readonly("k", &DoublingRatioRow::k)
      .def_readonly("rate", &DoublingRatioRow::rate)
      .def_readonly("d_lower", &DoublingRatioRow::d_lower)
      .def_readonly("d_formula", &DoublingRatioRow::d_formula)
      .def_readonly("ratio", &DoublingRatioRow::ratio);

  py::class_<Nonlinear3dRow>(m, "Nonlinear3dRow")
      .def_readonly("grid_n", &Nonlinear3dRow::grid_n)
      .def_readonly("l", &Nonlinear3dRow::l)
      .def_readonly("rate", &Nonlinear3dRow::rate)
      .def_readonly("d_empirical", &Nonlinear3dRow::d_empirical)
      .def_readonly("d_empirical_stderr", &Nonlinear3dRow::d_empirical_se)
      .def_readonly("inclusion_violations", &Nonlinear3dRow::inclusion_violations)
      .def_readonly("bound", &Nonlinear3dRow::bound)
      .def_readonly("bound_highrate", &Nonlinear3dRow::bound_highrate)
      .def_readonly("bound_holds", &Nonlinear3dRow::bound_holds)
      .def_readonly("transitions", &Nonlinear3dRow::transitions)
      .def_readonly("lipschitz", &Nonlinear3dRow::lipschitz);

  py::class_<Nonlinear3dConfig>(m, "Nonlinear3dConfig")
      .def(py::init<>())
      .def_readwrite("grid_sizes", &Nonlinear3dConfig::grid_sizes)
      .def_readwrite("horizons", &Nonlinear3dConfig::horizons)
      .def_readwrite("samples", &Nonlinear3dConfig::samples)
      .def_readwrite("entropy_samples", &Nonlinear3dConfig::entropy_samples)
      .def_readwrite("lipschitz_samples", &Nonlinear3dConfig::lipschitz_samples)
      .def_readwrite("seed", &Nonlinear3dConfig::seed)
      .def_readwrite("workers", &Nonlinear3dConfig::workers)
      .def_readwrite("cell_guard", &Nonlinear3dConfig::cell_guard);

  m.def("doubling_optimal_distortion", &doubling_optimal_distortion, py::arg("l"), py::arg("k"));
  m.def("doubling_optimal_abstraction", &doubling_optimal_abstraction, py::arg("l"), py::arg("k"),
        py::arg("samples"), py::arg("seed"), py::arg("workers") = 1);
  m.def("doubling_ratio_check",
        [](int l, const std::vector<long>& ks) { return doubling_ratio_check(l, ks); },
        py::arg("l"), py::arg("ks"));
  m.def("doubling_ratio_constant", &doubling_ratio_constant);
  m.def("doubling_cover_mean_sq_radius", &doubling_cover_mean_sq_radius, py::arg("l"),
        py::arg("k"));
  m.def("nonlinear3d_experiment", &nonlinear3d_experiment, py::arg("config"));

#ifdef VERSION_INFO
#define RDABS_STR(x) #x
#define RDABS_XSTR(x) RDABS_STR(x)
  m.attr("__version__") = RDABS_XSTR(VERSION_INFO);
#else
  m.attr("__version__") = "0.1.0";
#endif
}

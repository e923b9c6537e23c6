#include "rdabs/config.hpp"

#include <cmath>
#include <limits>

#include "rdabs/bounds.hpp"
#include "rdabs/errors.hpp"

namespace rdabs {

namespace {

using Json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config error at " + path + ": " + message);
}

double number_at(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    fail(path, "expected a number, got string '" + s + "'");
  }
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long integer_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

BoxRegion domain_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of [lo, hi] pairs");
  std::vector<Interval> axes;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& ax = j[i];
    const std::string axis_path = path + "/" + std::to_string(i);
    if (!ax.is_array() || ax.size() != 2) fail(axis_path, "expected [lo, hi]");
    const double lo = number_at(ax[0], axis_path);
    const double hi = number_at(ax[1], axis_path);
    if (!(lo < hi)) fail(axis_path, "lo must be < hi");
    axes.emplace_back(lo, hi);
  }
  return BoxRegion(std::move(axes));
}

Mat matrix_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(path, "ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = number_at(row[static_cast<std::size_t>(c)], path);
    }
  }
  return m;
}

SmoothnessClass smoothness_at(const Json& j, const std::string& path) {
  const auto s = j.is_string() ? j.get<std::string>() : std::string();
  if (s == "affine") return SmoothnessClass::Affine;
  if (s == "piecewise-affine") return SmoothnessClass::PiecewiseAffine;
  if (s == "lipschitz") return SmoothnessClass::Lipschitz;
  fail(path, "expected one of 'affine', 'piecewise-affine', 'lipschitz'");
}

}  // namespace

SystemDef make_system(const Json& system_config) {
  if (!system_config.is_object()) fail("/system", "expected an object");
  if (system_config.contains("builtin")) {
    const auto name = system_config.at("builtin").get<std::string>();
    if (name == "doubling") return SystemDef::doubling();
    if (name == "square") return SystemDef::square();
    if (name == "nonlinear3d") return SystemDef::nonlinear3d();
    if (name == "identity") {
      const int n = static_cast<int>(integer_at(system_config.value("n", Json(1)), "/system/n"));
      BoxRegion domain = system_config.contains("domain")
                             ? domain_at(system_config.at("domain"), "/system/domain")
                             : BoxRegion::cube(0.0, 1.0, n);
      return SystemDef::identity(n, std::move(domain));
    }
    if (name == "lti") {
      if (!system_config.contains("A")) fail("/system/A", "lti needs a square matrix");
      Mat a = matrix_at(system_config.at("A"), "/system/A");
      BoxRegion domain = system_config.contains("domain")
                             ? domain_at(system_config.at("domain"), "/system/domain")
                             : BoxRegion::cube(-1.0, 1.0, static_cast<int>(a.rows()));
      return SystemDef::lti(std::move(a), std::move(domain));
    }
    if (name == "piecewise_affine") {
      if (!system_config.contains("domain") || !system_config.contains("pieces")) {
        fail("/system", "piecewise_affine needs 'domain' and 'pieces'");
      }
      BoxRegion domain = domain_at(system_config.at("domain"), "/system/domain");
      std::vector<PwaPiece> pieces;
      const auto& list = system_config.at("pieces");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "/system/pieces/" + std::to_string(i);
        const auto& p = list[i];
        PwaPiece piece;
        piece.region = domain_at(p.at("region"), path + "/region");
        piece.A = matrix_at(p.at("A"), path + "/A");
        const auto b = p.at("b");
        piece.b = Vec(static_cast<Eigen::Index>(b.size()));
        for (Eigen::Index r = 0; r < piece.b.size(); ++r) {
          piece.b[r] = number_at(b[static_cast<std::size_t>(r)], path + "/b");
        }
        pieces.push_back(std::move(piece));
      }
      return SystemDef::piecewise_affine(std::move(pieces), std::move(domain));
    }
    fail("/system/builtin", "unknown system '" + name + "'");
  }
  if (system_config.contains("expressions")) {
    if (!system_config.contains("domain")) fail("/system/domain", "required for DSL systems");
    BoxRegion domain = domain_at(system_config.at("domain"), "/system/domain");
    const auto exprs = system_config.at("expressions").get<std::vector<std::string>>();
    const SmoothnessClass cls =
        smoothness_at(system_config.value("smoothness", Json("lipschitz")), "/system/smoothness");
    std::optional<double> lip;
    if (system_config.contains("lipschitz")) {
      lip = number_at(system_config.at("lipschitz"), "/system/lipschitz");
    }
    std::optional<int> modes;
    if (system_config.contains("modes")) {
      modes = static_cast<int>(integer_at(system_config.at("modes"), "/system/modes"));
    }
    try {
      return SystemDef::from_expressions(exprs, std::move(domain), cls, lip, modes);
    } catch (const ParseError& e) {
      fail("/system/expressions", e.what());
    }
  }
  fail("/system", "expected either 'builtin' or 'expressions'");
}

RunConfig parse_run_config(const Json& j) {
  if (!j.is_object()) fail("/", "expected a JSON object");
  RunConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "system") {
      config.system = value;
    } else if (key == "horizon") {
      config.horizon = static_cast<int>(integer_at(value, "/horizon"));
    } else if (key == "grid") {
      if (!value.is_object() || !value.contains("counts")) fail("/grid", "expected {counts: [...]}");
      config.grid_counts = value.at("counts").get<std::vector<int>>();
    } else if (key == "samples") {
      config.samples = integer_at(value, "/samples");
    } else if (key == "entropy_samples") {
      config.entropy_samples = integer_at(value, "/entropy_samples");
    } else if (key == "lipschitz_samples") {
      config.lipschitz_samples = integer_at(value, "/lipschitz_samples");
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(integer_at(value, "/seed"));
    } else if (key == "workers") {
      config.workers = static_cast<int>(integer_at(value, "/workers"));
    } else if (key == "s_grid") {
      if (!value.is_array()) fail("/s_grid", "expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const double s = number_at(value[i], "/s_grid/" + std::to_string(i));
        if (!(s > 1.0)) fail("/s_grid/" + std::to_string(i), "orders must be > 1");
        config.s_grid.push_back(s);
      }
    } else if (key == "rates") {
      if (!value.is_object()) fail("/rates", "expected {R: [...]} or {cells: [...]}");
      if (value.contains("R")) {
        for (std::size_t i = 0; i < value.at("R").size(); ++i) {
          config.rates.push_back(number_at(value.at("R")[i], "/rates/R/" + std::to_string(i)));
        }
      } else if (value.contains("cells")) {
        for (std::size_t i = 0; i < value.at("cells").size(); ++i) {
          const long cells = integer_at(value.at("cells")[i], "/rates/cells/" + std::to_string(i));
          if (cells < 1) fail("/rates/cells/" + std::to_string(i), "cell counts must be >= 1");
          config.rates.push_back(std::log(static_cast<double>(cells)));
        }
      } else {
        fail("/rates", "expected field 'R' or 'cells'");
      }
    } else if (key == "c_mode") {
      const auto mode = value.is_string() ? value.get<std::string>() : std::string();
      if (mode != "tightest" && mode != "high-rate" && mode != "both") {
        fail("/c_mode", "expected 'tightest', 'high-rate' or 'both'");
      }
      config.c_mode = mode;
    } else if (key == "entropy_method") {
      const auto method = value.is_string() ? value.get<std::string>() : std::string();
      if (method != "auto" && method != "monte-carlo") {
        fail("/entropy_method", "expected 'auto' or 'monte-carlo'");
      }
      config.entropy_method = method;
    } else if (key == "exact_transitions") {
      if (!value.is_boolean()) fail("/exact_transitions", "expected a boolean");
      config.exact_transitions = value.get<bool>();
    } else if (key == "cell_guard") {
      config.cell_guard = integer_at(value, "/cell_guard");
    } else if (key == "target_distortion") {
      const double d = number_at(value, "/target_distortion");
      if (!(d > 0.0)) fail("/target_distortion", "must be > 0");
      config.target_distortion = d;
    } else if (key == "version") {
      // accepted for forward compatibility
    } else {
      fail("/" + key, "unknown field");
    }
  }
  if (config.system.is_null()) fail("/system", "required");
  if (config.horizon < 1) fail("/horizon", "must be >= 1");
  if (config.samples < 2) fail("/samples", "must be >= 2");
  if (config.workers < 1) fail("/workers", "must be >= 1");
  if (config.s_grid.empty()) config.s_grid = default_s_grid();
  make_system(config.system);  // validate eagerly, before any computation
  return config;
}

Json resolved_config_json(const RunConfig& config) {
  Json s_grid = Json::array();
  for (double s : config.s_grid) {
    s_grid.push_back(std::isinf(s) ? Json("inf") : Json(s));
  }
  // `workers` is deliberately absent: results are worker-count invariant, and
  // embedding it would break byte-identical reruns across worker counts.
  Json out{{"system", config.system},
           {"horizon", config.horizon},
           {"grid_counts", config.grid_counts},
           {"samples", config.samples},
           {"entropy_samples", config.entropy_samples},
           {"lipschitz_samples", config.lipschitz_samples},
           {"seed", config.seed},
           {"s_grid", s_grid},
           {"rates", config.rates},
           {"c_mode", config.c_mode},
           {"entropy_method", config.entropy_method},
           {"exact_transitions", config.exact_transitions},
           {"cell_guard", config.cell_guard}};
  if (config.target_distortion) out["target_distortion"] = *config.target_distortion;
  return out;
}

std::uint64_t config_hash(const Json& resolved) {
  const std::string dump = resolved.dump();
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (const unsigned char c : dump) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::string tool_version() { return "0.1.0"; }

}  // namespace rdabs

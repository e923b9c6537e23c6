#include "rdabs/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "rdabs/errors.hpp"

namespace rdabs {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json grid_to_json(const UniformGrid& grid) {
  Json domain = Json::array();
  for (int i = 0; i < grid.dim(); ++i) {
    domain.push_back({grid.domain().axis(i).lo, grid.domain().axis(i).hi});
  }
  return Json{{"domain", domain}, {"counts", grid.counts()}};
}

UniformGrid grid_from_json(const Json& j) {
  if (!j.contains("domain") || !j.contains("counts")) {
    throw ConfigError("grid: fields 'domain' and 'counts' required");
  }
  std::vector<Interval> axes;
  for (const auto& ax : j.at("domain")) {
    if (!ax.is_array() || ax.size() != 2) throw ConfigError("grid: domain axes must be [lo, hi]");
    axes.emplace_back(ax[0].get<double>(), ax[1].get<double>());
  }
  return UniformGrid(BoxRegion(std::move(axes)), j.at("counts").get<std::vector<int>>());
}

Json relation_to_json(const TransitionRelation& rel) {
  Json adjacency = Json::array();
  for (std::int64_t c = 0; c < rel.source_count(); ++c) {
    const auto succ = rel.successors(c);
    adjacency.push_back(std::vector<std::int64_t>(succ.begin(), succ.end()));
  }
  return Json{{"adjacency", adjacency}};
}

TransitionRelation relation_from_json(const Json& j) {
  if (!j.contains("adjacency")) throw ConfigError("relation: field 'adjacency' required");
  std::vector<std::vector<std::int64_t>> adjacency;
  for (const auto& succ : j.at("adjacency")) {
    adjacency.push_back(succ.get<std::vector<std::int64_t>>());
  }
  return TransitionRelation::from_adjacency(std::move(adjacency));
}

Json abstraction_to_json(const UniformGrid& grid, const TransitionRelation& rel,
                         const std::string& system_fingerprint, const std::string& rule) {
  return Json{{"schema", "rdabs-abstraction-v1"},
              {"system", system_fingerprint},
              {"rule", rule},
              {"grid", grid_to_json(grid)},
              {"transitions", relation_to_json(rel)}};
}

AbstractionArtifact abstraction_from_json(const Json& j) {
  if (j.value("schema", "") != "rdabs-abstraction-v1") {
    throw ConfigError("abstraction artifact: unknown or missing schema tag");
  }
  AbstractionArtifact out;
  out.grid = grid_from_json(j.at("grid"));
  out.relation = relation_from_json(j.at("transitions"));
  out.system_fingerprint = j.value("system", "");
  out.rule = j.value("rule", "");
  if (out.relation.source_count() != out.grid.cell_count()) {
    throw ConfigError("abstraction artifact: adjacency size does not match the grid");
  }
  return out;
}

namespace {

Json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  return Json(v);
}

}  // namespace

Json entropy_report_to_json(const EntropyReport& report) {
  Json renyi = Json::array();
  for (const auto& point : report.renyi) {
    renyi.push_back({{"s", number_or_inf(point.s)}, {"value", point.value}, {"stderr", point.se}});
  }
  return Json{{"h", report.h},         {"stderr_h", report.h_se}, {"renyi", renyi},
              {"h_inf", report.h_inf}, {"method", report.method}, {"samples", report.samples},
              {"seed", report.seed}};
}

Json rd_point_to_json(const RdPoint& point) {
  Json per_s = Json::array();
  for (const auto& entry : point.per_s) {
    per_s.push_back({{"s", number_or_inf(entry.s)}, {"term", entry.h_s}});
  }
  return Json{{"R_nats", point.rate},
              {"cells", point.cells},
              {"D_lower", point.d_lower},
              {"D_lower_highrate", point.d_lower_highrate},
              {"term1", point.term1},
              {"term2", point.term2},
              {"s_argmax", number_or_inf(point.s_argmax)},
              {"h", point.h},
              {"h_inf", point.h_inf},
              {"c", point.c},
              {"c_case", point.c_case},
              {"per_s", per_s}};
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw ConfigError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace rdabs

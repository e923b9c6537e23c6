#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdabs/abstraction.hpp"
#include "rdabs/bounds.hpp"
#include "rdabs/entropy.hpp"

namespace rdabs {

using Json = nlohmann::json;

// Shortest round-trip decimal form; locale-free, byte-stable.
std::string format_double(double v);

Json grid_to_json(const UniformGrid& grid);
UniformGrid grid_from_json(const Json& j);

Json relation_to_json(const TransitionRelation& rel);
TransitionRelation relation_from_json(const Json& j);

// Abstraction artifact: grid, adjacency, and the fingerprint of the system it
// was built for. `rule` records the transition construction mode.
Json abstraction_to_json(const UniformGrid& grid, const TransitionRelation& rel,
                         const std::string& system_fingerprint, const std::string& rule);

struct AbstractionArtifact {
  UniformGrid grid;
  TransitionRelation relation;
  std::string system_fingerprint;
  std::string rule;
};

AbstractionArtifact abstraction_from_json(const Json& j);

Json entropy_report_to_json(const EntropyReport& report);
Json rd_point_to_json(const RdPoint& point);

// Minimal CSV writer; all numeric cells go through format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
  std::size_t columns_;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace rdabs

#ifndef OTSYS_REPORT_HPP_
#define OTSYS_REPORT_HPP_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace otsys {

// One named verification with its measured value and threshold.
struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::optional<double> tolerance;
  std::string note;
};

// Machine-readable run report; the JSON layout is pinned by
// schemas/report.schema.json.
struct Report {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::vector<Check> checks;
  nlohmann::json outputs = nlohmann::json::object();  // written file paths

  bool pass() const {
    for (const Check& c : checks)
      if (!c.pass) return false;
    return true;
  }

  Check& add(const std::string& name, bool ok, double value,
             std::optional<double> tolerance = std::nullopt,
             const std::string& note = "");

  // First failing check name, empty when all pass.
  std::string first_failure() const;

  nlohmann::json to_json() const;
  void write_json_file(const std::string& path) const;
};

// Structural validation against the subset of JSON Schema used by the
// shipped schema: type, properties, required, items.
bool validate_against_schema(const nlohmann::json& doc,
                             const nlohmann::json& schema, std::string* error);

}  // namespace otsys

#endif  // OTSYS_REPORT_HPP_

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <json.hpp>

namespace worklab {

inline constexpr int kScenarioSchema = 1;

// Command-line overrides applied on top of a config.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> atom_cap;
  std::optional<double> kT;
};

// Throws Error(validation) naming the offending field path.
void validate_scenario(const nlohmann::json& config);

// Report layout:
//   {"schema", "scenario" (echo), "kind", "results": {name: {value, provenance,
//   metadata}}, "ladder": [...], "checks": [{name, passed, detail}],
//   "checks_passed", "tables": {name: csv}}
nlohmann::json run_scenario(const nlohmann::json& config,
                            const RunOverrides& overrides = {});

}  // namespace worklab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bcp/estimators.hpp"

namespace bcp {

using json = nlohmann::ordered_json;

/// One requested method with its resolved controls.
struct MethodSpec {
  Method method = Method::closed_form;
  MethodControls controls;
};

struct OutputSpec {
  std::string format = "json";  // "json" or "csv"
  std::string path = "-";       // "-" writes to stdout
};

/// One sweep axis: a dotted config path and the values it takes.
struct SweepAxis {
  std::string path;
  std::vector<json> values;
};

/// A fully validated run configuration with defaults materialized.
struct RunConfig {
  std::optional<ProblemVariant> problem;
  std::optional<ScenarioMixture> mixture;
  std::vector<MethodSpec> methods;
  OutputSpec output;
  std::uint64_t seed = 1;
  bool timing = false;               // emit wall times (breaks byte-identity)
  std::string compare_reference = "path_mc";
  std::vector<double> diagnose_x = {-1.0, 0.0, 0.5};
  std::vector<SweepAxis> sweep;
  json resolved;  // the full config with defaults filled in, for reports
};

/// Parses and validates a configuration document.  Violations raise
/// ConfigInvalid with a JSON-pointer-style path in the message.
RunConfig parse_run_config(const json& raw);

/// Applies one `path=value` override (dotted path, JSON literal or bare
/// string value) to a raw configuration document.
void apply_override(json& raw, const std::string& dotted_path,
                    const std::string& value_text);

/// Builds a curve from its config block (kind plus kind-specific fields).
BoundaryCurve parse_curve(const json& block, const std::string& where);

}  // namespace bcp

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pic/feasibility.hpp"
#include "pic/plant.hpp"
#include "pic/simulator.hpp"

namespace pic::cli {

/// Any problem with a scenario file: syntax, schema or value constraints.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SystemModel = std::variant<BuiltinSystem, PendulumParams,
                                 CoupledSineParams, IntegratorChainParams>;

/// How initial funnel widths p_i are obtained.
enum class FunnelMode {
  fixed,   ///< p_i given directly ("explicit")
  offset,  ///< p_i = |z_i(0)| + delta_i ("offset")
};

struct StageConfig {
  double v_bar = 1.0;
  double c = kLinearShape;
  double q = 0.05;
  double mu = 1.0;
  std::optional<double> p;
  std::optional<double> delta;

  friend bool operator==(const StageConfig&, const StageConfig&) = default;
};

struct SimConfig {
  std::vector<double> x0;
  double horizon = 20.0;
  double step = 1e-3;
  std::size_t substeps = 1;
  bool permissive = false;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct RegionConfig {
  RegionGrid grid;
  std::vector<std::array<double, 2>> probes;

  friend bool operator==(const RegionConfig&, const RegionConfig&) = default;
};

/// In-memory form of a scenario file. Sections: system, reference,
/// controller, bounds, sim, region.
struct ScenarioConfig {
  SystemModel system = BuiltinSystem::pendulum_ex1;
  SineReferenceParams reference;
  FunnelMode funnel_mode = FunnelMode::fixed;
  std::vector<StageConfig> stages;
  std::optional<BoundsSpec> bounds;
  SimConfig sim;
  std::optional<RegionConfig> region;

  std::size_t order() const { return stages.size(); }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses and schema-checks a JSON scenario. Syntax errors carry
/// `source:line:column`; schema errors carry the JSON path of the offending
/// value. Throws ConfigError.
ScenarioConfig parse_config(std::string_view text,
                            std::string_view source = "<config>");

ScenarioConfig load_config(const std::filesystem::path& path);

/// Pretty-printed JSON that parse_config maps back to the same config.
std::string dump_config(const ScenarioConfig& config);

/// The bundled configuration for a built-in example.
ScenarioConfig default_config(BuiltinSystem which);

std::string system_label(const SystemModel& model);

SystemSpec build_system(const SystemModel& model);

/// Fixed-width cascade. Offset-mode widths are resolved from sim.x0 and y_d(0).
ResolvedParameters resolve_controller(const ScenarioConfig& config);

/// Builds the runnable scenario; throws ConfigError on inconsistencies.
Scenario build_scenario(const ScenarioConfig& config);

/// Region-sweep template. Requires bounds and a delta on every stage.
RegionTemplate build_region_template(const ScenarioConfig& config);

}  // namespace pic::cli

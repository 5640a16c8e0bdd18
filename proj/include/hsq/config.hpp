#pragma once

// JSON run configuration. Angular quantities must carry an explicit unit
// suffix: `_rad_s` (rad/s), `_hz` (multiplied by 2 pi) or, for detunings,
// `_omega_m` (multiples of the mechanical frequency).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hsq/gaussian.hpp"
#include "hsq/model.hpp"

namespace hsq {

enum class Task { steady, sweep, wigner, spectrum, stability_map, optimize_power };
enum class AxisScale { linear, log };
enum class AxisUnit { si, rad_s, hz, omega_m };
enum class OutputFormat { csv, json };
enum class CmRoute { lyapunov, frequency };

struct SweepAxis {
  std::string parameter;  ///< a PhysicalParams field name, e.g. "delta_c_tilde"
  double min = 0.0;
  double max = 0.0;
  int n_points = 2;
  AxisScale scale = AxisScale::linear;
  AxisUnit unit = AxisUnit::si;

  /// Axis values in the axis unit.
  std::vector<double> values() const;
  bool operator==(const SweepAxis&) const = default;
};

struct ConditioningBlock {
  bool enabled = false;
  std::vector<int> s;           ///< excitation counts to evaluate
  bool negativity = false;      ///< also build the Wigner grid and report n_w
  bool operator==(const ConditioningBlock&) const = default;
};

struct GridBlock {
  std::optional<double> half_width;  ///< default: six standard deviations
  int n_points = 513;
  bool operator==(const GridBlock&) const = default;
};

struct SpectrumBlock {
  int n_points = 2048;
  double span_omega_m = 5.0;  ///< axis covers [-span, span] omega_m
  bool output_mode_wigner = false;
  bool operator==(const SpectrumBlock&) const = default;
};

struct OptimizePowerBlock {
  double p_min_w = 1e-6;
  double p_max_w = 1.0;
  int n_scan = 400;
  Quadrature quadrature = kCavY;
  double margin_omega_m = 1e-4;  ///< require max Re(eig K) < -margin * omega_m
  bool operator==(const OptimizePowerBlock&) const = default;
};

struct OutputBlock {
  std::string directory = ".";
  std::string stem = "run";
  OutputFormat format = OutputFormat::csv;
  bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
  Task task = Task::steady;
  std::string name;
  PhysicalParams params;
  NoiseModel noise_model = NoiseModel::white;
  CmRoute cm_route = CmRoute::lyapunov;
  std::vector<SweepAxis> axes;
  /// With a sweep, re-optimize the power at every point.
  bool optimize_power_per_point = false;
  ConditioningBlock conditioning;
  GridBlock grid;
  SpectrumBlock spectrum;
  OptimizePowerBlock optimize;
  OutputBlock output;

  bool operator==(const RunConfig&) const;
};

/// Throws ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Checks the blocks `task` needs; the CLI verb may differ from `c.task`.
void require_task_blocks(const RunConfig& c, Task task);

/// Canonical JSON: rad/s suffixes, every field present.
nlohmann::json to_json(const RunConfig& c);

/// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const RunConfig& c);

/// Writes `value` (in `unit`) into the named parameter. `omega_m` units refer
/// to the current omega_m of `p`.
void set_parameter(PhysicalParams& p, const std::string& name, double value, AxisUnit unit);
bool is_parameter_name(const std::string& name);

std::string to_string(Task t);
std::string to_string(AxisUnit u);

}  // namespace hsq

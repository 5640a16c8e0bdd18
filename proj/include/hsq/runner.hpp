#pragma once

// Task drivers behind the CLI verbs. Each returns its results; the write_*
// functions turn them into files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsq/conditional.hpp"
#include "hsq/config.hpp"
#include "hsq/gaussian.hpp"
#include "hsq/model.hpp"
#include "hsq/spectra.hpp"

namespace hsq {

std::string code_version();

struct ConditionalSummary {
  int s = 0;
  double probability = 0.0;
  Moments moments;
  std::optional<NegativityReport> negativity;
};

struct SteadyResult {
  LinearModel model;
  CovarianceMatrix cm;
  QuadratureReport report;
  std::vector<ConditionalSummary> conditional;
};

/// Single point; throws StabilityError when unstable.
SteadyResult run_steady(const RunConfig& config, quad::Exec exec = quad::Exec::parallel);

/// Steady state plus the conditioning requested in `config`, for given parameters.
SteadyResult evaluate_point(const PhysicalParams& params, const RunConfig& config, quad::Exec exec);

struct PowerOptimum {
  double power = 0.0;
  double objective = 0.0;  ///< variance of the chosen quadrature at `power`
  SteadyResult steady;
  int scanned = 0;
  int feasible = 0;
};

/// Minimizes the chosen quadrature variance over P in [p_min, p_max]
/// (log scan, then golden-section refinement) subject to
/// max Re(eig K) < -margin * omega_m. Throws DomainError with no feasible P.
PowerOptimum optimize_power(const PhysicalParams& params, const RunConfig& config,
                            quad::Exec exec = quad::Exec::parallel);

struct SweepRecord {
  std::vector<double> coords;  ///< in axis units
  bool stable = false;
  double max_real = 0.0;
  std::optional<double> power;
  std::optional<double> alpha_s;
  std::optional<double> chi_eff;
  std::optional<double> var_x;
  std::optional<double> var_y;
  std::vector<ConditionalSummary> conditional;
  std::string error;
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<SweepRecord> records;  ///< first axis slowest
  std::vector<int> s_values;
  bool negativity = false;
  bool stability_only = false;
  std::uint64_t config_hash = 0;
  std::string timestamp;
  std::string code_version;
};

/// Cartesian sweep over the configured axes. Points run concurrently with
/// serial kernels inside; per-point failures land in `error`.
SweepResult run_sweep(const RunConfig& config, quad::Exec exec = quad::Exec::parallel);

/// Stability verdict and largest eigenvalue real part on a two-axis grid.
SweepResult run_stability_map(const RunConfig& config, quad::Exec exec = quad::Exec::parallel);

struct WignerRun {
  SteadyResult steady;
  std::vector<ConditionalField> fields;
  std::vector<WignerGrid> grids;
  std::vector<NegativityReport> negativity;
  std::vector<Moments> moments;
};

WignerRun run_wigner(const RunConfig& config, quad::Exec exec = quad::Exec::parallel);

struct SpectrumRun {
  LinearModel model;
  SpectrumResult spectrum;
  double min_db = 0.0;
  double omega_at_min = 0.0;
  /// Experimental output-mode conditioning at omega_at_min.
  std::optional<CovarianceMatrix> output_mode;
  bool output_mode_physical = false;
  std::vector<ConditionalSummary> output_conditional;
};

SpectrumRun run_spectrum(const RunConfig& config, quad::Exec exec = quad::Exec::parallel);

// Writers. Each returns the paths it created.
std::vector<std::filesystem::path> write_steady(const SteadyResult& r, const RunConfig& config,
                                                const std::filesystem::path& dir, OutputFormat format);
std::vector<std::filesystem::path> write_sweep(const SweepResult& r, const std::filesystem::path& dir,
                                               const std::string& stem, OutputFormat format);
std::vector<std::filesystem::path> write_power(const PowerOptimum& r, const RunConfig& config,
                                               const std::filesystem::path& dir, OutputFormat format);
std::vector<std::filesystem::path> write_wigner(const WignerRun& r, const RunConfig& config,
                                                const std::filesystem::path& dir, OutputFormat format);
std::vector<std::filesystem::path> write_spectrum(const SpectrumRun& r, const RunConfig& config,
                                                  const std::filesystem::path& dir, OutputFormat format);

/// Sweep table only (no metadata), for determinism checks.
void write_sweep_csv(std::ostream& out, const SweepResult& r);

}  // namespace hsq

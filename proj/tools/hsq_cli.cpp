// Command-line driver: one verb per task, configuration from a JSON file.

#include <cstdio>
#include <iostream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "hsq/config.hpp"
#include "hsq/errors.hpp"
#include "hsq/io.hpp"
#include "hsq/runner.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kInstability = 3, kNumerical = 4 };

using hsq::io::format_double;

void print_model(const hsq::LinearModel& m) {
  std::printf("alpha_s     %s\n", format_double(m.alpha_s).c_str());
  std::printf("chi_eff     %s rad/s\n", format_double(m.chi_eff).c_str());
  std::printf("delta_c     %s rad/s\n", format_double(m.delta_c).c_str());
  std::printf("n_bar       %s\n", format_double(m.n_bar).c_str());
  std::printf("stable      %s (max Re eig %s)\n", m.stability.stable ? "yes" : "no",
              format_double(m.stability.max_real).c_str());
}

void print_steady(const hsq::SteadyResult& r) {
  print_model(r.model);
  std::printf("var_X       %s (%+.3f dB)\n", format_double(r.report.var_x).c_str(), r.report.squeezing_db_x);
  std::printf("var_Y       %s (%+.3f dB)\n", format_double(r.report.var_y).c_str(), r.report.squeezing_db_y);
  for (const auto& c : r.conditional) {
    std::printf("s=%d         p=%s var_X=%s var_Y=%s", c.s, format_double(c.probability).c_str(),
                format_double(c.moments.var_x).c_str(), format_double(c.moments.var_y).c_str());
    if (c.negativity) std::printf(" n_w=%s", format_double(c.negativity->n_w).c_str());
    std::printf("\n");
  }
}

void print_paths(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::printf("wrote       %s\n", p.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid atom-optomechanical squeezing and conditional-state engine"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string format;
  int threads = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--format", format, "csv or json (overrides output.format)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);

  auto* steady = app.add_subcommand("steady", "steady-state covariance and quadrature report");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep over the configured axes");
  auto* wigner = app.add_subcommand("wigner", "conditional Wigner function on a grid");
  auto* spectrum = app.add_subcommand("spectrum", "output quadrature and optimal squeezing spectra");
  auto* stability = app.add_subcommand("stability-map", "stability verdict on a two-axis grid");
  auto* power = app.add_subcommand("optimize-power", "pump power minimizing a quadrature variance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    hsq::RunConfig config = hsq::load_config(config_path);
    const hsq::OutputFormat fmt = format.empty()   ? config.output.format
                                  : format == "csv" ? hsq::OutputFormat::csv
                                                    : hsq::OutputFormat::json;
    const std::filesystem::path dir = std::filesystem::path(out_dir.empty() ? config.output.directory : out_dir);

    if (steady->parsed()) {
      hsq::require_task_blocks(config, hsq::Task::steady);
      const auto r = hsq::run_steady(config);
      print_steady(r);
      print_paths(hsq::write_steady(r, config, dir, fmt));
    } else if (sweep->parsed()) {
      hsq::require_task_blocks(config, hsq::Task::sweep);
      const auto r = hsq::run_sweep(config);
      std::size_t unstable = 0, failed = 0;
      for (const auto& rec : r.records) {
        unstable += !rec.stable;
        failed += !rec.error.empty() && rec.stable;
      }
      std::printf("points      %zu (%zu unstable, %zu failed)\n", r.records.size(), unstable, failed);
      print_paths(hsq::write_sweep(r, dir, config.output.stem, fmt));
    } else if (stability->parsed()) {
      hsq::require_task_blocks(config, hsq::Task::stability_map);
      const auto r = hsq::run_stability_map(config);
      std::size_t unstable = 0;
      for (const auto& rec : r.records) unstable += !rec.stable;
      std::printf("points      %zu (%zu unstable)\n", r.records.size(), unstable);
      print_paths(hsq::write_sweep(r, dir, config.output.stem, fmt));
    } else if (wigner->parsed()) {
      hsq::require_task_blocks(config, hsq::Task::wigner);
      const auto r = hsq::run_wigner(config);
      print_steady(r.steady);
      print_paths(hsq::write_wigner(r, config, dir, fmt));
    } else if (spectrum->parsed()) {
      hsq::require_task_blocks(config, hsq::Task::spectrum);
      const auto r = hsq::run_spectrum(config);
      print_model(r.model);
      std::printf("min S_opt   %+.4f dB at omega = %s rad/s\n", r.min_db, format_double(r.omega_at_min).c_str());
      if (r.output_mode && !r.output_mode_physical)
        std::printf("output mode not a valid covariance matrix; conditioning skipped\n");
      for (const auto& c : r.output_conditional)
        std::printf("output s=%d  p=%s var_X=%s var_Y=%s\n", c.s, format_double(c.probability).c_str(),
                    format_double(c.moments.var_x).c_str(), format_double(c.moments.var_y).c_str());
      print_paths(hsq::write_spectrum(r, config, dir, fmt));
    } else if (power->parsed()) {
      hsq::require_task_blocks(config, hsq::Task::optimize_power);
      const auto r = hsq::optimize_power(config.params, config);
      std::printf("power       %s W (%d of %d scan points feasible)\n", format_double(r.power).c_str(), r.feasible,
                  r.scanned);
      print_steady(r.steady);
      print_paths(hsq::write_power(r, config, dir, fmt));
    }
  } catch (const hsq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const hsq::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfig;
  } catch (const hsq::StabilityError& e) {
    std::cerr << "instability: " << e.what() << "\neigenvalues of K:\n";
    for (const auto& ev : e.eigenvalues())
      std::cerr << "  " << format_double(ev.real()) << " " << (ev.imag() < 0 ? "- " : "+ ")
                << format_double(std::abs(ev.imag())) << "i\n";
    return kInstability;
  } catch (const hsq::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (estimate " << format_double(e.estimate()) << ")\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}

#include "hsq/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "hsq/errors.hpp"
#include "hsq/io.hpp"

#ifndef HSQ_VERSION
#define HSQ_VERSION "0.0.0"
#endif

namespace hsq {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CovarianceMatrix steady_cm(const LinearModel& m, const PhysicalParams& p, const RunConfig& c, quad::Exec exec) {
  if (c.cm_route == CmRoute::lyapunov) return steady_cm_lyapunov(m.drift, m.diffusion);
  FrequencyCmOptions o;
  o.exec = exec;
  return steady_cm_frequency(m.drift, NoiseSpectrum::from(p, c.noise_model), o);
}

double grid_half_width(const RunConfig& c, const CovarianceMatrix& cm, const Moments& conditional) {
  if (c.grid.half_width) return *c.grid.half_width;
  const double v = std::max(conditional.var_x, conditional.var_y);
  return std::max(default_half_width(cm), 6.0 * std::sqrt(std::max(v, 0.0)));
}

std::vector<ConditionalSummary> condition(const CovarianceMatrix& cm, const RunConfig& c, quad::Exec exec) {
  std::vector<ConditionalSummary> out;
  if (!c.conditioning.enabled) return out;
  for (int s : c.conditioning.s) {
    const ConditionalField field(cm, s);
    ConditionalSummary r;
    r.s = s;
    r.probability = field.outcome_probability();
    r.moments = curvature_moments(field);
    if (c.conditioning.negativity) {
      const WignerGrid grid = wigner_grid(field, grid_half_width(c, cm, r.moments), c.grid.n_points, exec);
      r.negativity = negativity(grid);
    }
    out.push_back(r);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Cartesian product of the axis values, first axis slowest.
std::vector<std::vector<double>> grid_points(const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<double>> values;
  std::size_t total = 1;
  for (const auto& a : axes) {
    values.push_back(a.values());
    total *= values.back().size();
  }
  std::vector<std::vector<double>> points(total, std::vector<double>(axes.size()));
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rest = n;
    for (std::size_t k = axes.size(); k-- > 0;) {
      points[n][k] = values[k][rest % values[k].size()];
      rest /= values[k].size();
    }
  }
  return points;
}

PhysicalParams apply_axes(PhysicalParams p, const std::vector<SweepAxis>& axes, const std::vector<double>& coords) {
  for (std::size_t k = 0; k < axes.size(); ++k) set_parameter(p, axes[k].parameter, coords[k], axes[k].unit);
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  return out;
}

json to_json(const Mat6& m) {
  json rows = json::array();
  for (int i = 0; i < 6; ++i) {
    json row = json::array();
    for (int j = 0; j < 6; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const ConditionalSummary& c) {
  json j = {{"s", c.s}, {"probability", c.probability}, {"var_x", c.moments.var_x}, {"var_y", c.moments.var_y}};
  if (c.negativity) {
    j["n_w"] = c.negativity->n_w;
    j["min_w"] = c.negativity->min_w;
  }
  return j;
}

json model_json(const LinearModel& m) {
  json eig = json::array();
  for (const auto& e : m.stability.eigenvalues) eig.push_back({e.real(), e.imag()});
  return {{"chi", m.chi},         {"epsilon", m.epsilon},
          {"alpha_s", m.alpha_s}, {"chi_eff", m.chi_eff},
          {"delta_c", m.delta_c}, {"n_bar", m.n_bar},
          {"stable", m.stability.stable}, {"max_re_eig", m.stability.max_real},
          {"eigenvalues", eig}};
}

json steady_json(const SteadyResult& r) {
  json cond = json::array();
  for (const auto& c : r.conditional) cond.push_back(to_json(c));
  return {{"model", model_json(r.model)},
          {"var_x", r.report.var_x},
          {"var_y", r.report.var_y},
          {"squeezing_db_x", r.report.squeezing_db_x},
          {"squeezing_db_y", r.report.squeezing_db_y},
          {"sigma", to_json(r.cm.sigma)},
          {"conditional", cond}};
}

void steady_csv(std::ostream& out, const SteadyResult& r) {
  io::CsvWriter csv(out);
  csv.header({"quantity", "value"});
  const auto put = [&csv](const std::string& k, double v) { csv.row({io::Cell(k), io::Cell(v)}); };
  put("alpha_s", r.model.alpha_s);
  put("chi_eff", r.model.chi_eff);
  put("delta_c", r.model.delta_c);
  put("n_bar", r.model.n_bar);
  put("max_re_eig", r.model.stability.max_real);
  put("var_x", r.report.var_x);
  put("var_y", r.report.var_y);
  put("squeezing_db_x", r.report.squeezing_db_x);
  put("squeezing_db_y", r.report.squeezing_db_y);
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) put("sigma_" + std::to_string(i) + std::to_string(j), r.cm.sigma(i, j));
  for (const auto& c : r.conditional) {
    const std::string s = "_s" + std::to_string(c.s);
    put("probability" + s, c.probability);
    put("var_x" + s, c.moments.var_x);
    put("var_y" + s, c.moments.var_y);
    if (c.negativity) put("n_w" + s, c.negativity->n_w);
  }
}

}  // namespace

std::string code_version() { return HSQ_VERSION; }

SteadyResult evaluate_point(const PhysicalParams& params, const RunConfig& config, quad::Exec exec) {
  SteadyResult r;
  r.model = linearize(params);
  if (!r.model.stability.stable)
    throw StabilityError("unstable parameters: max Re(eig K) = " + io::format_double(r.model.stability.max_real),
                         r.model.stability.eigenvalues);
  r.cm = steady_cm(r.model, params, config, exec);
  r.report = quadrature_report(r.cm);
  r.conditional = condition(r.cm, config, exec);
  return r;
}

SteadyResult run_steady(const RunConfig& config, quad::Exec exec) { return evaluate_point(config.params, config, exec); }

PowerOptimum optimize_power(const PhysicalParams& params, const RunConfig& config, quad::Exec exec) {
  if (params.chi_eff) throw DomainError("power optimization needs chi_eff to follow the power");
  const OptimizePowerBlock& o = config.optimize;
  const int q = o.quadrature;
  const double margin = o.margin_omega_m * params.omega_m;

  PowerOptimum best;
  best.objective = kInf;
  const auto objective = [&](double power) {
    PhysicalParams p = params;
    p.power = power;
    try {
      const LinearModel m = linearize(p);
      if (!m.stability.stable || !(m.stability.max_real < -margin)) return kInf;
      return steady_cm(m, p, config, exec).sigma(q, q);
    } catch (const Error&) {
      return kInf;
    }
  };

  const int n = o.p_min_w == o.p_max_w ? 1 : o.n_scan;
  const double lo = std::log(o.p_min_w);
  const double hi = std::log(o.p_max_w);
  std::vector<double> logp(n), f(n);
  // Endpoints are evaluated at the configured powers, not exp(log(P)).
  const auto scan_power = [&](int i) {
    return i == 0 ? o.p_min_w : i == n - 1 ? o.p_max_w : std::exp(logp[i]);
  };
  for (int i = 0; i < n; ++i) {
    logp[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    f[i] = objective(scan_power(i));
    if (std::isfinite(f[i])) ++best.feasible;
  }
  best.scanned = n;
  const int i0 = static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
  if (!std::isfinite(f[i0]))
    throw DomainError("no power in [" + io::format_double(o.p_min_w) + ", " + io::format_double(o.p_max_w) +
                      "] W satisfies the stability margin");

  double p_best = scan_power(i0);
  double f_best = f[i0];
  if (n > 2) {
    // Golden-section on log P between the scan neighbours; infeasible points
    // count as +inf, so the search can settle on the stability edge.
    double a = logp[std::max(i0 - 1, 0)];
    double b = logp[std::min(i0 + 1, n - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = objective(std::exp(c));
    double fd = objective(std::exp(d));
    for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = objective(std::exp(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = objective(std::exp(d));
      }
    }
    if (fc < f_best) {
      f_best = fc;
      p_best = std::exp(c);
    }
    if (fd < f_best) {
      f_best = fd;
      p_best = std::exp(d);
    }
  }

  best.power = p_best;
  best.objective = f_best;
  PhysicalParams p = params;
  p.power = best.power;
  best.steady = evaluate_point(p, config, exec);
  return best;
}

SweepResult run_sweep(const RunConfig& config, quad::Exec exec) {
  SweepResult r;
  r.axes = config.axes;
  r.s_values = config.conditioning.enabled ? config.conditioning.s : std::vector<int>{};
  r.negativity = config.conditioning.enabled && config.conditioning.negativity;
  r.config_hash = config_hash(config);
  r.timestamp = utc_timestamp();
  r.code_version = code_version();

  const auto points = grid_points(config.axes);
  r.records.resize(points.size());
  const long count = static_cast<long>(points.size());

  const auto one = [&](long i) {
    SweepRecord& rec = r.records[i];
    rec.coords = points[i];
    try {
      const PhysicalParams p = apply_axes(config.params, config.axes, rec.coords);
      SteadyResult s;
      if (config.optimize_power_per_point) {
        const PowerOptimum opt = optimize_power(p, config, quad::Exec::serial);
        rec.power = opt.power;
        s = opt.steady;
      } else {
        rec.power = p.power;
        const LinearModel m = linearize(p);
        rec.stable = m.stability.stable;
        rec.max_real = m.stability.max_real;
        rec.alpha_s = m.alpha_s;
        rec.chi_eff = m.chi_eff;
        if (!rec.stable) return;
        s = evaluate_point(p, config, quad::Exec::serial);
      }
      rec.stable = true;
      rec.max_real = s.model.stability.max_real;
      rec.alpha_s = s.model.alpha_s;
      rec.chi_eff = s.model.chi_eff;
      rec.var_x = s.report.var_x;
      rec.var_y = s.report.var_y;
      rec.conditional = s.conditional;
    } catch (const StabilityError& e) {
      rec.stable = false;
      rec.error = e.what();
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  };

  if (exec == quad::Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) one(i);
  } else {
    for (long i = 0; i < count; ++i) one(i);
  }
  return r;
}

SweepResult run_stability_map(const RunConfig& config, quad::Exec exec) {
  SweepResult r;
  r.axes = config.axes;
  r.stability_only = true;
  r.config_hash = config_hash(config);
  r.timestamp = utc_timestamp();
  r.code_version = code_version();

  const auto points = grid_points(config.axes);
  r.records.resize(points.size());
  const long count = static_cast<long>(points.size());
  const auto one = [&](long i) {
    SweepRecord& rec = r.records[i];
    rec.coords = points[i];
    try {
      const LinearModel m = linearize(apply_axes(config.params, config.axes, rec.coords));
      rec.stable = m.stability.stable;
      rec.max_real = m.stability.max_real;
      rec.alpha_s = m.alpha_s;
      rec.chi_eff = m.chi_eff;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  };
  if (exec == quad::Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) one(i);
  } else {
    for (long i = 0; i < count; ++i) one(i);
  }
  return r;
}

WignerRun run_wigner(const RunConfig& config, quad::Exec exec) {
  RunConfig plain = config;
  plain.conditioning.enabled = false;
  WignerRun r;
  r.steady = evaluate_point(config.params, plain, exec);
  if (!config.conditioning.enabled) {
    const Mat2 c = r.steady.cm.cavity_block();
    const double hw = config.grid.half_width.value_or(default_half_width(r.steady.cm));
    WignerGrid grid = gaussian_wigner_grid(c, hw, config.grid.n_points);
    r.negativity.push_back(negativity(grid));
    r.moments.push_back(conditional_moments(grid));
    r.grids.push_back(std::move(grid));
    return r;
  }
  for (int s : config.conditioning.s) {
    ConditionalField field(r.steady.cm, s);
    const Moments curv = curvature_moments(field);
    WignerGrid grid = wigner_grid(field, grid_half_width(config, r.steady.cm, curv), config.grid.n_points, exec);
    r.negativity.push_back(negativity(grid));
    r.moments.push_back(conditional_moments(grid));
    r.steady.conditional.push_back({s, field.outcome_probability(), curv, r.negativity.back()});
    r.fields.push_back(std::move(field));
    r.grids.push_back(std::move(grid));
  }
  return r;
}

SpectrumRun run_spectrum(const RunConfig& config, quad::Exec exec) {
  SpectrumRun r;
  r.model = linearize(config.params);
  if (!r.model.stability.stable)
    throw StabilityError("unstable parameters: max Re(eig K) = " + io::format_double(r.model.stability.max_real),
                         r.model.stability.eigenvalues);
  const auto axis = default_axis(config.params.omega_m, config.spectrum.n_points, config.spectrum.span_omega_m);
  r.spectrum = output_spectra(config.params, r.model, axis, config.noise_model, exec);
  const std::size_t i = r.spectrum.argmin_opt();
  r.min_db = r.spectrum.s_opt_db[i];
  r.omega_at_min = r.spectrum.omega[i];

  if (config.spectrum.output_mode_wigner && config.conditioning.enabled) {
    CovarianceMatrix cm;
    cm.sigma = output_mode_covariance(config.params, r.model, r.omega_at_min, config.noise_model);
    r.output_mode = cm;
    r.output_mode_physical = is_physical(cm.sigma);
    if (r.output_mode_physical) r.output_conditional = condition(cm, config, exec);
  }
  return r;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  io::CsvWriter csv(out);
  std::vector<std::string> head;
  for (const auto& a : r.axes) head.push_back(a.parameter + "[" + to_string(a.unit) + "]");
  head.insert(head.end(), {"stable", "max_re_eig", "alpha_s", "chi_eff"});
  if (!r.stability_only) {
    head.insert(head.end(), {"power_w", "var_x", "var_y"});
    for (int s : r.s_values) {
      const std::string t = "_s" + std::to_string(s);
      head.insert(head.end(), {"probability" + t, "var_x" + t, "var_y" + t});
      if (r.negativity) head.push_back("n_w" + t);
    }
  }
  head.push_back("error");
  csv.header(head);

  for (const auto& rec : r.records) {
    std::vector<io::Cell> row;
    for (double c : rec.coords) row.emplace_back(c);
    row.emplace_back(rec.stable);
    row.emplace_back(rec.max_real);
    row.push_back(io::cell(rec.alpha_s));
    row.push_back(io::cell(rec.chi_eff));
    if (!r.stability_only) {
      row.push_back(io::cell(rec.power));
      row.push_back(io::cell(rec.var_x));
      row.push_back(io::cell(rec.var_y));
      for (std::size_t k = 0; k < r.s_values.size(); ++k) {
        const bool have = k < rec.conditional.size();
        const ConditionalSummary* c = have ? &rec.conditional[k] : nullptr;
        row.push_back(io::cell(c ? std::optional(c->probability) : std::nullopt));
        row.push_back(io::cell(c ? std::optional(c->moments.var_x) : std::nullopt));
        row.push_back(io::cell(c ? std::optional(c->moments.var_y) : std::nullopt));
        if (r.negativity)
          row.push_back(io::cell(c && c->negativity ? std::optional(c->negativity->n_w) : std::nullopt));
      }
    }
    row.emplace_back(rec.error);
    csv.row(row);
  }
}

namespace {

json sweep_meta(const SweepResult& r) {
  json axes = json::array();
  for (const auto& a : r.axes)
    axes.push_back({{"parameter", a.parameter},
                    {"unit", to_string(a.unit)},
                    {"min", a.min},
                    {"max", a.max},
                    {"n_points", a.n_points},
                    {"values", a.values()}});
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.config_hash));
  return {{"config_hash", hash}, {"timestamp", r.timestamp}, {"code_version", r.code_version},
          {"records", r.records.size()}, {"axes", axes}};
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<fs::path> write_sweep(const SweepResult& r, const fs::path& dir, const std::string& stem,
                                  OutputFormat format) {
  fs::create_directories(dir);
  std::vector<fs::path> paths;
  if (format == OutputFormat::csv) {
    paths.push_back(dir / (stem + ".csv"));
    auto out = open_out(paths.back());
    write_sweep_csv(out, r);
    paths.push_back(dir / (stem + ".meta.json"));
    auto meta = open_out(paths.back());
    meta << sweep_meta(r).dump(2) << '\n';
    return paths;
  }
  json records = json::array();
  for (const auto& rec : r.records) {
    json cond = json::array();
    for (const auto& c : rec.conditional) cond.push_back(to_json(c));
    json j = {{"coords", rec.coords}, {"stable", rec.stable}, {"max_re_eig", rec.max_real},
              {"alpha_s", opt(rec.alpha_s)}, {"chi_eff", opt(rec.chi_eff)}};
    if (!r.stability_only) {
      j["power_w"] = opt(rec.power);
      j["var_x"] = opt(rec.var_x);
      j["var_y"] = opt(rec.var_y);
      j["conditional"] = cond;
    }
    if (!rec.error.empty()) j["error"] = rec.error;
    records.push_back(j);
  }
  paths.push_back(dir / (stem + ".json"));
  auto out = open_out(paths.back());
  out << json{{"meta", sweep_meta(r)}, {"records", records}}.dump() << '\n';
  return paths;
}

std::vector<fs::path> write_steady(const SteadyResult& r, const RunConfig& config, const fs::path& dir,
                                   OutputFormat format) {
  fs::create_directories(dir);
  const fs::path path = dir / (config.output.stem + (format == OutputFormat::csv ? ".csv" : ".json"));
  auto out = open_out(path);
  if (format == OutputFormat::csv)
    steady_csv(out, r);
  else
    out << steady_json(r).dump(2) << '\n';
  return {path};
}

std::vector<fs::path> write_power(const PowerOptimum& r, const RunConfig& config, const fs::path& dir,
                                  OutputFormat format) {
  fs::create_directories(dir);
  const fs::path path = dir / (config.output.stem + (format == OutputFormat::csv ? ".csv" : ".json"));
  auto out = open_out(path);
  if (format == OutputFormat::csv) {
    io::CsvWriter csv(out);
    csv.header({"quantity", "value"});
    csv.row({io::Cell(std::string("power_w")), io::Cell(r.power)});
    csv.row({io::Cell(std::string("objective")), io::Cell(r.objective)});
    csv.row({io::Cell(std::string("scanned")), io::Cell(static_cast<long long>(r.scanned))});
    csv.row({io::Cell(std::string("feasible")), io::Cell(static_cast<long long>(r.feasible))});
    out << "\r\n";
    steady_csv(out, r.steady);
  } else {
    json j = steady_json(r.steady);
    j["power_w"] = r.power;
    j["objective"] = r.objective;
    j["scanned"] = r.scanned;
    j["feasible"] = r.feasible;
    out << j.dump(2) << '\n';
  }
  return {path};
}

std::vector<fs::path> write_wigner(const WignerRun& r, const RunConfig& config, const fs::path& dir,
                                   OutputFormat format) {
  fs::create_directories(dir);
  std::vector<fs::path> paths;
  const bool conditioned = !r.fields.empty();
  for (std::size_t k = 0; k < r.grids.size(); ++k) {
    const std::string stem =
        config.output.stem + (conditioned ? "_s" + std::to_string(r.fields[k].excitations()) : "_unconditional");
    paths.push_back(dir / (stem + (format == OutputFormat::csv ? ".csv" : ".json")));
    auto out = open_out(paths.back());
    if (format == OutputFormat::csv)
      write_wigner_csv(out, r.grids[k]);
    else if (conditioned)
      write_wigner_json(out, r.grids[k], r.fields[k]);
    else
      write_wigner_json(out, r.grids[k]);
  }
  paths.push_back(dir / (config.output.stem + "_summary.csv"));
  auto out = open_out(paths.back());
  io::CsvWriter csv(out);
  csv.header({"s", "probability", "var_x", "var_y", "var_x_grid", "var_y_grid", "n_w", "min_w", "negative_fraction"});
  for (std::size_t k = 0; k < r.grids.size(); ++k) {
    const NegativityReport& n = r.negativity[k];
    const Moments& g = r.moments[k];
    if (conditioned) {
      const auto& c = r.steady.conditional[k];
      csv.row({io::Cell(static_cast<long long>(c.s)), io::Cell(c.probability), io::Cell(c.moments.var_x),
               io::Cell(c.moments.var_y), io::Cell(g.var_x), io::Cell(g.var_y), io::Cell(n.n_w), io::Cell(n.min_w),
               io::Cell(n.negative_fraction)});
    } else {
      csv.row({io::Cell(), io::Cell(1.0), io::Cell(r.steady.report.var_x), io::Cell(r.steady.report.var_y),
               io::Cell(g.var_x), io::Cell(g.var_y), io::Cell(n.n_w), io::Cell(n.min_w),
               io::Cell(n.negative_fraction)});
    }
  }
  return paths;
}

std::vector<fs::path> write_spectrum(const SpectrumRun& r, const RunConfig& config, const fs::path& dir,
                                     OutputFormat format) {
  fs::create_directories(dir);
  std::vector<fs::path> paths;
  paths.push_back(dir / (config.output.stem + (format == OutputFormat::csv ? ".csv" : ".json")));
  auto out = open_out(paths.back());
  if (format == OutputFormat::csv)
    write_spectrum_csv(out, r.spectrum);
  else
    write_spectrum_json(out, r.spectrum);
  if (r.output_mode) {
    paths.push_back(dir / (config.output.stem + "_output_mode.json"));
    auto om = open_out(paths.back());
    json cond = json::array();
    for (const auto& c : r.output_conditional) cond.push_back(to_json(c));
    om << json{{"omega", r.omega_at_min},
               {"approximation", "zero-width spectral mode of the output field"},
               {"physical", r.output_mode_physical},
               {"sigma", to_json(r.output_mode->sigma)},
               {"conditional", cond}}
              .dump(2)
       << '\n';
  }
  return paths;
}

}  // namespace hsq

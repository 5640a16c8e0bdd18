#include "hsq/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "hsq/constants.hpp"
#include "hsq/conditional.hpp"
#include "hsq/errors.hpp"

namespace hsq {

using nlohmann::json;

namespace {

enum class Kind { frequency, detuning, plain };

struct FieldInfo {
  double PhysicalParams::*member;
  Kind kind;
  const char* si_suffix;  // for plain fields
};

const std::map<std::string, FieldInfo>& fields() {
  static const std::map<std::string, FieldInfo> table = {
      {"omega_m", {&PhysicalParams::omega_m, Kind::frequency, nullptr}},
      {"gamma_m", {&PhysicalParams::gamma_m, Kind::frequency, nullptr}},
      {"mass", {&PhysicalParams::mass, Kind::plain, "_kg"}},
      {"omega_l", {&PhysicalParams::omega_l, Kind::frequency, nullptr}},
      {"power", {&PhysicalParams::power, Kind::plain, "_w"}},
      {"cavity_length", {&PhysicalParams::cavity_length, Kind::plain, "_m"}},
      {"kappa", {&PhysicalParams::kappa, Kind::frequency, nullptr}},
      {"gamma_a", {&PhysicalParams::gamma_a, Kind::frequency, nullptr}},
      {"g_n", {&PhysicalParams::g_n, Kind::frequency, nullptr}},
      {"delta_c_tilde", {&PhysicalParams::delta_c_tilde, Kind::detuning, nullptr}},
      {"delta_a", {&PhysicalParams::delta_a, Kind::detuning, nullptr}},
      {"temperature", {&PhysicalParams::temperature, Kind::plain, "_k"}},
  };
  return table;
}

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError("config field '" + field + "': " + msg);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& field) {
  if (!j.is_boolean()) fail(field, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.contains(it.key())) fail(where + it.key(), "unknown key");
}

const json& object(const json& parent, const char* key, const std::string& where) {
  const json& j = parent.at(key);
  if (!j.is_object()) fail(where + key, "expected an object");
  return j;
}

template <class E>
E enum_value(const json& j, const std::string& field, const std::vector<std::pair<std::string, E>>& names) {
  const std::string v = text(j, field);
  for (const auto& [n, e] : names)
    if (n == v) return e;
  std::string allowed;
  for (const auto& [n, e] : names) allowed += (allowed.empty() ? "" : "|") + n;
  fail(field, "'" + v + "' is not one of " + allowed);
}

template <class E>
std::string enum_name(E e, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [n, v] : names)
    if (v == e) return n;
  return "?";
}

const std::vector<std::pair<std::string, Task>> kTasks = {
    {"steady", Task::steady},     {"sweep", Task::sweep},
    {"wigner", Task::wigner},     {"spectrum", Task::spectrum},
    {"stability_map", Task::stability_map}, {"optimize_power", Task::optimize_power}};
const std::vector<std::pair<std::string, AxisScale>> kScales = {{"linear", AxisScale::linear},
                                                                {"log", AxisScale::log}};
const std::vector<std::pair<std::string, AxisUnit>> kUnits = {
    {"si", AxisUnit::si}, {"rad_s", AxisUnit::rad_s}, {"hz", AxisUnit::hz}, {"omega_m", AxisUnit::omega_m}};
const std::vector<std::pair<std::string, OutputFormat>> kFormats = {{"csv", OutputFormat::csv},
                                                                    {"json", OutputFormat::json}};
const std::vector<std::pair<std::string, NoiseModel>> kNoise = {{"white", NoiseModel::white},
                                                                {"brownian", NoiseModel::brownian}};
const std::vector<std::pair<std::string, CmRoute>> kRoutes = {{"lyapunov", CmRoute::lyapunov},
                                                              {"frequency", CmRoute::frequency}};
const std::vector<std::pair<std::string, Quadrature>> kQuadratures = {{"x", kCavX}, {"y", kCavY}};

// Reads one angular quantity given by exactly one of its suffixed keys.
std::optional<double> angular(const json& p, const std::string& base, bool allow_omega_m,
                              std::optional<double> omega_m, std::set<std::string>& seen) {
  std::optional<double> out;
  int count = 0;
  const auto take = [&](const std::string& suffix, double factor) {
    const std::string key = base + suffix;
    seen.insert(key);
    if (!p.contains(key)) return;
    ++count;
    out = number(p.at(key), "params." + key) * factor;
  };
  take("_rad_s", 1.0);
  take("_hz", constants::kTwoPi);
  if (allow_omega_m) {
    const std::string key = base + "_omega_m";
    seen.insert(key);
    if (p.contains(key)) {
      ++count;
      if (!omega_m) fail("params." + key, "needs omega_m to be given");
      out = number(p.at(key), "params." + key) * *omega_m;
    }
  }
  if (count > 1) fail("params." + base, "given with more than one unit suffix");
  return out;
}

PhysicalParams parse_params(const json& p) {
  if (!p.is_object()) fail("params", "expected an object");
  std::set<std::string> seen;
  PhysicalParams out;

  const auto require = [](std::optional<double> v, const std::string& name, const char* hint) {
    if (!v) fail("params." + name, std::string("missing (give ") + hint + ")");
    return *v;
  };
  const auto plain = [&](const std::string& key) -> std::optional<double> {
    seen.insert(key);
    if (!p.contains(key)) return std::nullopt;
    return number(p.at(key), "params." + key);
  };

  out.omega_m = require(angular(p, "omega_m", false, std::nullopt, seen), "omega_m", "omega_m_hz or omega_m_rad_s");

  const auto gm = angular(p, "gamma_m", false, std::nullopt, seen);
  const auto q = plain("mechanical_q");
  if (gm && q) fail("params.gamma_m", "give either gamma_m_* or mechanical_q, not both");
  if (q) {
    if (!(*q > 0)) fail("params.mechanical_q", "must be > 0");
    out.gamma_m = out.omega_m / *q;
  } else {
    out.gamma_m = require(gm, "gamma_m", "gamma_m_hz, gamma_m_rad_s or mechanical_q");
  }

  const auto wl = angular(p, "omega_l", false, std::nullopt, seen);
  const auto lambda = plain("wavelength_m");
  if (wl && lambda) fail("params.omega_l", "give either omega_l_* or wavelength_m, not both");
  if (lambda) {
    if (!(*lambda > 0)) fail("params.wavelength_m", "must be > 0");
    out.omega_l = omega_from_wavelength(*lambda);
  } else {
    out.omega_l = require(wl, "omega_l", "wavelength_m or omega_l_rad_s");
  }

  out.mass = require(plain("mass_kg"), "mass_kg", "mass_kg");
  out.power = require(plain("power_w"), "power_w", "power_w");
  out.cavity_length = require(plain("cavity_length_m"), "cavity_length_m", "cavity_length_m");
  out.temperature = require(plain("temperature_k"), "temperature_k", "temperature_k");
  out.kappa = require(angular(p, "kappa", false, std::nullopt, seen), "kappa", "kappa_hz or kappa_rad_s");
  out.gamma_a = require(angular(p, "gamma_a", false, std::nullopt, seen), "gamma_a", "gamma_a_hz or gamma_a_rad_s");
  out.delta_c_tilde = require(angular(p, "delta_c_tilde", true, out.omega_m, seen), "delta_c_tilde",
                              "delta_c_tilde_omega_m, _hz or _rad_s");
  out.delta_a =
      require(angular(p, "delta_a", true, out.omega_m, seen), "delta_a", "delta_a_omega_m, _hz or _rad_s");
  out.chi_eff = angular(p, "chi_eff", false, std::nullopt, seen);

  const auto gn = angular(p, "g_n", false, std::nullopt, seen);
  seen.insert("atoms");
  if (p.contains("atoms")) {
    if (gn) fail("params.atoms", "give either g_n_* or atoms, not both");
    const json& a = object(p, "atoms", "params.");
    reject_unknown(a, {"dipole_c_m", "mode_volume_m3", "count"}, "params.atoms.");
    for (const char* k : {"dipole_c_m", "mode_volume_m3", "count"})
      if (!a.contains(k)) fail(std::string("params.atoms.") + k, "missing");
    try {
      out.g_n = atom_cavity_coupling(number(a.at("dipole_c_m"), "params.atoms.dipole_c_m"),
                                     number(a.at("mode_volume_m3"), "params.atoms.mode_volume_m3"),
                                     number(a.at("count"), "params.atoms.count"), out.omega_l);
    } catch (const DomainError& e) {
      fail("params.atoms", e.what());
    }
  } else {
    out.g_n = require(gn, "g_n", "g_n_rad_s, g_n_hz or atoms");
  }

  reject_unknown(p, seen, "params.");
  try {
    out.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config field 'params': ") + e.what());
  }
  return out;
}

SweepAxis parse_axis(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  reject_unknown(j, {"parameter", "min", "max", "n_points", "scale", "unit"}, where + ".");
  for (const char* k : {"parameter", "min", "max", "n_points"})
    if (!j.contains(k)) fail(where + "." + k, "missing");
  SweepAxis a;
  a.parameter = text(j.at("parameter"), where + ".parameter");
  if (!is_parameter_name(a.parameter)) fail(where + ".parameter", "'" + a.parameter + "' is not a parameter name");
  a.min = number(j.at("min"), where + ".min");
  a.max = number(j.at("max"), where + ".max");
  a.n_points = integer(j.at("n_points"), where + ".n_points");
  if (a.n_points < 2) fail(where + ".n_points", "must be >= 2");
  if (j.contains("scale")) a.scale = enum_value(j.at("scale"), where + ".scale", kScales);
  if (a.scale == AxisScale::log && !(a.min > 0 && a.max > 0)) fail(where + ".scale", "log axes need min, max > 0");

  const bool plain = a.parameter == "mass" || a.parameter == "power" || a.parameter == "cavity_length" ||
                     a.parameter == "temperature";
  if (!j.contains("unit")) fail(where + ".unit", plain ? "missing (use \"si\")" : "missing (rad_s, hz or omega_m)");
  a.unit = enum_value(j.at("unit"), where + ".unit", kUnits);
  if (plain != (a.unit == AxisUnit::si))
    fail(where + ".unit", plain ? "must be \"si\" for this parameter" : "angular parameters need rad_s, hz or omega_m");
  return a;
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> v(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / (n_points - 1);
    v[i] = scale == AxisScale::linear ? min + t * (max - min)
                                      : std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
  }
  v.back() = max;
  return v;
}

bool is_parameter_name(const std::string& name) { return fields().contains(name) || name == "chi_eff"; }

void set_parameter(PhysicalParams& p, const std::string& name, double value, AxisUnit unit) {
  double factor = 1.0;
  switch (unit) {
    case AxisUnit::si:
    case AxisUnit::rad_s: factor = 1.0; break;
    case AxisUnit::hz: factor = constants::kTwoPi; break;
    case AxisUnit::omega_m: factor = p.omega_m; break;
  }
  if (name == "chi_eff") {
    p.chi_eff = value * factor;
    return;
  }
  const auto it = fields().find(name);
  if (it == fields().end()) throw ConfigError("unknown parameter '" + name + "'");
  p.*(it->second.member) = value * factor;
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& a = params;
  const auto& b = o.params;
  const bool same_params = a.omega_m == b.omega_m && a.gamma_m == b.gamma_m && a.mass == b.mass &&
                           a.omega_l == b.omega_l && a.power == b.power && a.cavity_length == b.cavity_length &&
                           a.kappa == b.kappa && a.gamma_a == b.gamma_a && a.g_n == b.g_n &&
                           a.delta_c_tilde == b.delta_c_tilde && a.delta_a == b.delta_a &&
                           a.temperature == b.temperature && a.chi_eff == b.chi_eff;
  return same_params && task == o.task && name == o.name && noise_model == o.noise_model && cm_route == o.cm_route &&
         axes == o.axes && optimize_power_per_point == o.optimize_power_per_point &&
         conditioning == o.conditioning && grid == o.grid && spectrum == o.spectrum && optimize == o.optimize &&
         output == o.output;
}

void require_task_blocks(const RunConfig& c, Task task) {
  switch (task) {
    case Task::sweep:
      if (c.axes.empty()) fail("sweep.axes", "sweep needs at least one axis");
      break;
    case Task::stability_map:
      if (c.axes.size() != 2) fail("sweep.axes", "stability_map needs exactly two axes");
      break;
    case Task::optimize_power:
      if (c.params.chi_eff) fail("params.chi_eff", "power optimization needs chi_eff to follow the power");
      break;
    default: break;
  }
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"task", "name", "params", "noise_model", "cm_method", "sweep", "conditioning", "grid", "spectrum",
                  "optimize_power", "output"},
                 "");
  RunConfig c;
  if (!j.contains("task")) fail("task", "missing");
  c.task = enum_value(j.at("task"), "task", kTasks);
  if (j.contains("name")) c.name = text(j.at("name"), "name");
  if (!j.contains("params")) fail("params", "missing");
  c.params = parse_params(j.at("params"));
  if (j.contains("noise_model")) c.noise_model = enum_value(j.at("noise_model"), "noise_model", kNoise);
  if (j.contains("cm_method")) c.cm_route = enum_value(j.at("cm_method"), "cm_method", kRoutes);

  if (j.contains("sweep")) {
    const json& s = object(j, "sweep", "");
    reject_unknown(s, {"axes", "optimize_power"}, "sweep.");
    if (!s.contains("axes") || !s.at("axes").is_array()) fail("sweep.axes", "expected an array");
    const json& axes = s.at("axes");
    for (std::size_t i = 0; i < axes.size(); ++i)
      c.axes.push_back(parse_axis(axes[i], "sweep.axes[" + std::to_string(i) + "]"));
    if (s.contains("optimize_power")) c.optimize_power_per_point = boolean(s.at("optimize_power"), "sweep.optimize_power");
  }

  if (j.contains("conditioning")) {
    const json& b = object(j, "conditioning", "");
    reject_unknown(b, {"enabled", "s", "negativity"}, "conditioning.");
    if (b.contains("enabled")) c.conditioning.enabled = boolean(b.at("enabled"), "conditioning.enabled");
    if (b.contains("negativity")) c.conditioning.negativity = boolean(b.at("negativity"), "conditioning.negativity");
    if (b.contains("s")) {
      const json& s = b.at("s");
      if (s.is_number_integer()) {
        c.conditioning.s = {s.get<int>()};
      } else if (s.is_array()) {
        for (std::size_t i = 0; i < s.size(); ++i)
          c.conditioning.s.push_back(integer(s[i], "conditioning.s[" + std::to_string(i) + "]"));
      } else {
        fail("conditioning.s", "expected an integer or an array of integers");
      }
    }
    for (int s : c.conditioning.s)
      if (s < 0 || s > kMaxExcitations) fail("conditioning.s", "excitation counts must lie in [0, 20]");
    if (c.conditioning.enabled && c.conditioning.s.empty()) fail("conditioning.s", "missing while enabled");
  }

  if (j.contains("grid")) {
    const json& g = object(j, "grid", "");
    reject_unknown(g, {"half_width", "n_points"}, "grid.");
    if (g.contains("half_width") && !g.at("half_width").is_null()) {
      c.grid.half_width = number(g.at("half_width"), "grid.half_width");
      if (!(*c.grid.half_width > 0)) fail("grid.half_width", "must be > 0");
    }
    if (g.contains("n_points")) c.grid.n_points = integer(g.at("n_points"), "grid.n_points");
    if (c.grid.n_points < 3 || c.grid.n_points % 2 == 0) fail("grid.n_points", "must be odd and >= 3");
  }

  if (j.contains("spectrum")) {
    const json& s = object(j, "spectrum", "");
    reject_unknown(s, {"n_points", "span_omega_m", "output_mode_wigner"}, "spectrum.");
    if (s.contains("n_points")) c.spectrum.n_points = integer(s.at("n_points"), "spectrum.n_points");
    if (s.contains("span_omega_m")) c.spectrum.span_omega_m = number(s.at("span_omega_m"), "spectrum.span_omega_m");
    if (s.contains("output_mode_wigner"))
      c.spectrum.output_mode_wigner = boolean(s.at("output_mode_wigner"), "spectrum.output_mode_wigner");
    if (c.spectrum.n_points < 2) fail("spectrum.n_points", "must be >= 2");
    if (!(c.spectrum.span_omega_m > 0)) fail("spectrum.span_omega_m", "must be > 0");
  }

  if (j.contains("optimize_power")) {
    const json& o = object(j, "optimize_power", "");
    reject_unknown(o, {"p_min_w", "p_max_w", "n_scan", "quadrature", "margin_omega_m"}, "optimize_power.");
    if (o.contains("p_min_w")) c.optimize.p_min_w = number(o.at("p_min_w"), "optimize_power.p_min_w");
    if (o.contains("p_max_w")) c.optimize.p_max_w = number(o.at("p_max_w"), "optimize_power.p_max_w");
    if (o.contains("n_scan")) c.optimize.n_scan = integer(o.at("n_scan"), "optimize_power.n_scan");
    if (o.contains("quadrature"))
      c.optimize.quadrature = enum_value(o.at("quadrature"), "optimize_power.quadrature", kQuadratures);
    if (o.contains("margin_omega_m"))
      c.optimize.margin_omega_m = number(o.at("margin_omega_m"), "optimize_power.margin_omega_m");
    if (!(c.optimize.p_min_w > 0) || c.optimize.p_max_w < c.optimize.p_min_w)
      fail("optimize_power.p_min_w", "need 0 < p_min_w <= p_max_w");
    if (c.optimize.n_scan < 2) fail("optimize_power.n_scan", "must be >= 2");
    if (c.optimize.margin_omega_m < 0) fail("optimize_power.margin_omega_m", "must be >= 0");
  }

  if (j.contains("output")) {
    const json& o = object(j, "output", "");
    reject_unknown(o, {"directory", "stem", "format"}, "output.");
    if (o.contains("directory")) c.output.directory = text(o.at("directory"), "output.directory");
    if (o.contains("stem")) c.output.stem = text(o.at("stem"), "output.stem");
    if (o.contains("format")) c.output.format = enum_value(o.at("format"), "output.format", kFormats);
  }

  require_task_blocks(c, c.task);
  if (c.optimize_power_per_point && c.params.chi_eff)
    fail("sweep.optimize_power", "power optimization needs chi_eff to follow the power; drop params.chi_eff_*");
  if (c.noise_model == NoiseModel::brownian && c.cm_route != CmRoute::frequency)
    fail("noise_model", "brownian noise needs cm_method \"frequency\"");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  const PhysicalParams& p = c.params;
  json params = {
      {"omega_m_rad_s", p.omega_m},     {"gamma_m_rad_s", p.gamma_m},
      {"mass_kg", p.mass},              {"omega_l_rad_s", p.omega_l},
      {"power_w", p.power},             {"cavity_length_m", p.cavity_length},
      {"kappa_rad_s", p.kappa},         {"gamma_a_rad_s", p.gamma_a},
      {"g_n_rad_s", p.g_n},             {"delta_c_tilde_rad_s", p.delta_c_tilde},
      {"delta_a_rad_s", p.delta_a},     {"temperature_k", p.temperature},
  };
  if (p.chi_eff) params["chi_eff_rad_s"] = *p.chi_eff;

  json axes = json::array();
  for (const auto& a : c.axes)
    axes.push_back({{"parameter", a.parameter},
                    {"min", a.min},
                    {"max", a.max},
                    {"n_points", a.n_points},
                    {"scale", enum_name(a.scale, kScales)},
                    {"unit", enum_name(a.unit, kUnits)}});

  json j = {
      {"task", enum_name(c.task, kTasks)},
      {"name", c.name},
      {"params", params},
      {"noise_model", enum_name(c.noise_model, kNoise)},
      {"cm_method", enum_name(c.cm_route, kRoutes)},
      {"sweep", {{"axes", axes}, {"optimize_power", c.optimize_power_per_point}}},
      {"conditioning",
       {{"enabled", c.conditioning.enabled}, {"s", c.conditioning.s}, {"negativity", c.conditioning.negativity}}},
      {"grid",
       {{"half_width", c.grid.half_width ? json(*c.grid.half_width) : json(nullptr)}, {"n_points", c.grid.n_points}}},
      {"spectrum",
       {{"n_points", c.spectrum.n_points},
        {"span_omega_m", c.spectrum.span_omega_m},
        {"output_mode_wigner", c.spectrum.output_mode_wigner}}},
      {"optimize_power",
       {{"p_min_w", c.optimize.p_min_w},
        {"p_max_w", c.optimize.p_max_w},
        {"n_scan", c.optimize.n_scan},
        {"quadrature", enum_name(c.optimize.quadrature, kQuadratures)},
        {"margin_omega_m", c.optimize.margin_omega_m}}},
      {"output",
       {{"directory", c.output.directory}, {"stem", c.output.stem}, {"format", enum_name(c.output.format, kFormats)}}},
  };
  return j;
}

std::uint64_t config_hash(const RunConfig& c) {
  const std::string s = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_string(Task t) { return enum_name(t, kTasks); }
std::string to_string(AxisUnit u) { return enum_name(u, kUnits); }

}  // namespace hsq

#include "hsq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "hsq/constants.hpp"
#include "hsq/errors.hpp"

namespace hsq {

using constants::kHbar;

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw DomainError(std::string("parameter '") + field + "' must be " + rule);
}

}  // namespace

void PhysicalParams::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  require(finite(omega_m) && omega_m > 0, "omega_m", "> 0");
  require(finite(gamma_m) && gamma_m > 0, "gamma_m", "> 0");
  require(finite(mass) && mass > 0, "mass", "> 0");
  require(finite(omega_l) && omega_l > 0, "omega_l", "> 0");
  require(finite(power) && power >= 0, "power", ">= 0");
  require(finite(cavity_length) && cavity_length > 0, "cavity_length", "> 0");
  require(finite(kappa) && kappa > 0, "kappa", "> 0");
  require(finite(gamma_a) && gamma_a > 0, "gamma_a", "> 0");
  require(finite(g_n) && g_n >= 0, "g_N", ">= 0");
  require(finite(delta_c_tilde), "delta_c_tilde", "finite");
  require(finite(delta_a), "delta_a", "finite");
  require(finite(temperature) && temperature >= 0, "temperature", ">= 0");
  if (chi_eff) require(finite(*chi_eff) && *chi_eff >= 0, "chi_eff", ">= 0");
}

double omega_from_wavelength(double wavelength_m) {
  if (!(wavelength_m > 0)) throw DomainError("wavelength must be > 0");
  return constants::kTwoPi * constants::kSpeedOfLight / wavelength_m;
}

double single_photon_coupling(const PhysicalParams& p) {
  if (!(p.mass > 0) || !(p.omega_m > 0) || !(p.cavity_length > 0) || !(p.omega_l > 0))
    throw DomainError("single_photon_coupling needs mass, omega_m, cavity_length, omega_l > 0");
  return p.omega_l / p.cavity_length * std::sqrt(kHbar / (p.mass * p.omega_m));
}

double drive_amplitude(const PhysicalParams& p) {
  if (!(p.power >= 0) || !(p.kappa >= 0) || !(p.omega_l > 0))
    throw DomainError("drive_amplitude needs power >= 0, kappa >= 0, omega_l > 0");
  return std::sqrt(2.0 * p.power * p.kappa / (kHbar * p.omega_l));
}

SteadyAmplitude steady_state_amplitude(const PhysicalParams& p, double chi, double epsilon) {
  const Complex atoms = p.g_n * p.g_n / Complex(p.gamma_a, p.delta_a);
  const Complex denom = Complex(p.kappa, p.delta_c_tilde) + atoms;
  if (std::abs(denom) == 0.0) throw NumericalError("steady-state amplitude denominator vanishes");

  SteadyAmplitude out;
  out.alpha_s = std::abs(epsilon / denom);
  const double chi_eff = std::sqrt(2.0) * chi * out.alpha_s;
  out.delta_c = p.delta_c_tilde + chi_eff * chi_eff / (2.0 * p.omega_m);

  // alpha [kappa + i Delta_c - i chi^2 |alpha|^2 / omega_m + g^2/(gamma_a + i Delta_a)] = eps
  const Complex full = Complex(p.kappa, out.delta_c - chi * chi * out.alpha_s * out.alpha_s / p.omega_m) + atoms;
  const double lhs = out.alpha_s * std::abs(full);
  // The two radiation-pressure shifts cancel; measure against their size.
  const double terms = epsilon + out.alpha_s * chi_eff * chi_eff / p.omega_m;
  out.residual = terms > 0 ? std::abs(lhs - epsilon) / terms : 0.0;
  if (!(out.residual < 1e-10))
    throw NumericalError("steady-state amplitude does not satisfy its defining equation", out.residual);
  return out;
}

Mat6 build_drift(const PhysicalParams& p, double chi_eff) {
  Mat6 k = Mat6::Zero();
  k(kMechQ, kMechP) = p.omega_m;
  k(kMechP, kMechQ) = -p.omega_m;
  k(kMechP, kMechP) = -p.gamma_m;
  k(kMechP, kCavX) = chi_eff;

  k(kCavX, kCavX) = -p.kappa;
  k(kCavX, kCavY) = p.delta_c_tilde;
  k(kCavX, kAtomY) = p.g_n;
  k(kCavY, kMechQ) = chi_eff;
  k(kCavY, kCavX) = -p.delta_c_tilde;
  k(kCavY, kCavY) = -p.kappa;
  k(kCavY, kAtomX) = -p.g_n;

  k(kAtomX, kCavY) = p.g_n;
  k(kAtomX, kAtomX) = -p.gamma_a;
  k(kAtomX, kAtomY) = p.delta_a;
  k(kAtomY, kCavX) = -p.g_n;
  k(kAtomY, kAtomX) = -p.delta_a;
  k(kAtomY, kAtomY) = -p.gamma_a;
  return k;
}

double mean_phonon_number(double omega, double temperature) {
  if (temperature <= 0) return 0.0;
  const double x = kHbar * omega / (constants::kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

Mat6 build_diffusion(const PhysicalParams& p) {
  if (!(p.temperature >= 0)) throw DomainError("temperature must be >= 0");
  const double n = mean_phonon_number(p.omega_m, p.temperature);
  Vec6 d;
  d << 0.0, p.gamma_m * (2.0 * n + 1.0), p.kappa, p.kappa, p.gamma_a, p.gamma_a;
  return d.asDiagonal();
}

StabilityReport check_stability(const Mat6& drift) {
  if (!drift.allFinite()) throw NumericalError("drift matrix has non-finite entries");
  Eigen::EigenSolver<Mat6> solver(drift, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed on drift matrix");

  StabilityReport r;
  const auto ev = solver.eigenvalues();
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  double max_abs = 0.0;
  r.max_real = -std::numeric_limits<double>::infinity();
  for (const auto& e : r.eigenvalues) {
    r.max_real = std::max(r.max_real, e.real());
    max_abs = std::max(max_abs, std::abs(e));
  }
  r.stable = r.max_real < -1e-9 * max_abs;
  return r;
}

double atom_cavity_coupling(double dipole, double mode_volume, double atom_count, double omega_c) {
  if (!(dipole > 0) || !(mode_volume > 0) || !(atom_count > 0) || !(omega_c > 0))
    throw DomainError("atom_cavity_coupling needs d, V, N, omega_c > 0");
  const double g = dipole * std::sqrt(omega_c / (2.0 * kHbar * constants::kVacuumPermittivity * mode_volume));
  return std::sqrt(atom_count) * g;
}

LinearModel linearize(const PhysicalParams& p) {
  p.validate();
  LinearModel m;
  m.chi = single_photon_coupling(p);
  m.epsilon = drive_amplitude(p);
  if (p.chi_eff) {
    m.chi_eff = *p.chi_eff;
    m.alpha_s = m.chi_eff / (std::sqrt(2.0) * m.chi);
    m.delta_c = p.delta_c_tilde + m.chi_eff * m.chi_eff / (2.0 * p.omega_m);
  } else {
    const SteadyAmplitude a = steady_state_amplitude(p, m.chi, m.epsilon);
    m.alpha_s = a.alpha_s;
    m.delta_c = a.delta_c;
    m.chi_eff = std::sqrt(2.0) * m.chi * m.alpha_s;
  }
  m.n_bar = mean_phonon_number(p.omega_m, p.temperature);
  m.drift = build_drift(p, m.chi_eff);
  m.diffusion = build_diffusion(p);
  m.stability = check_stability(m.drift);
  return m;
}

}  // namespace hsq

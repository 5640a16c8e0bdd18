#pragma once

// Linearized atom-cavity-mirror model: physical inputs, steady-state
// amplitude, drift/diffusion matrices and the stability verdict.

#include <optional>
#include <vector>

#include "hsq/types.hpp"

namespace hsq {

/// Raw experimental inputs. All frequencies and rates are angular (rad/s).
struct PhysicalParams {
  double omega_m = 0.0;        ///< mechanical frequency
  double gamma_m = 0.0;        ///< mechanical damping
  double mass = 0.0;           ///< effective mirror mass (kg)
  double omega_l = 0.0;        ///< laser frequency, also used as the cavity frequency
  double power = 0.0;          ///< pump power (W)
  double cavity_length = 0.0;  ///< L (m)
  double kappa = 0.0;          ///< cavity amplitude decay
  double gamma_a = 0.0;        ///< atomic decay
  double g_n = 0.0;            ///< collective atom-cavity coupling
  double delta_c_tilde = 0.0;  ///< effective cavity detuning
  double delta_a = 0.0;        ///< atom-pump detuning
  double temperature = 0.0;    ///< bath temperature (K)
  /// When set, fixes chi_eff directly instead of deriving it from power and mass.
  std::optional<double> chi_eff;

  /// Throws DomainError naming the first offending field.
  void validate() const;
};

/// Laser angular frequency for a vacuum wavelength in metres.
double omega_from_wavelength(double wavelength_m);

struct SteadyAmplitude {
  double alpha_s = 0.0;   ///< |alpha_s|, phase absorbed into the quadrature frame
  double delta_c = 0.0;   ///< bare detuning implied by delta_c_tilde
  double residual = 0.0;  ///< relative residual of the nonlinear steady-state equation
};

struct StabilityReport {
  bool stable = false;
  double max_real = 0.0;
  std::vector<Complex> eigenvalues;
};

struct LinearModel {
  double chi = 0.0;
  double epsilon = 0.0;
  double alpha_s = 0.0;
  double chi_eff = 0.0;
  double delta_c = 0.0;
  double n_bar = 0.0;
  Mat6 drift = Mat6::Zero();
  Mat6 diffusion = Mat6::Zero();
  StabilityReport stability;
};

/// chi = (omega_c / L) sqrt(hbar / (m omega_m)), with omega_c taken as omega_l.
double single_photon_coupling(const PhysicalParams& p);

/// epsilon = sqrt(2 P kappa / (hbar omega_l)).
double drive_amplitude(const PhysicalParams& p);

/// Closed-form steady-state amplitude for a given effective detuning; the
/// bare detuning follows from delta_c = delta_c_tilde + chi_eff^2 / (2 omega_m).
SteadyAmplitude steady_state_amplitude(const PhysicalParams& p, double chi, double epsilon);

/// Drift matrix of the linearized Langevin equations, ordering (q, p, X, Y, x, y).
Mat6 build_drift(const PhysicalParams& p, double chi_eff);

/// Bose occupation 1/(exp(hbar omega / kB T) - 1); zero at T = 0.
double mean_phonon_number(double omega, double temperature);

/// Markovian diffusion matrix diag(0, gamma_m (2 n + 1), kappa, kappa, gamma_a, gamma_a).
Mat6 build_diffusion(const PhysicalParams& p);

/// Unstable when max Re(eig) >= -1e-9 max|eig|.
StabilityReport check_stability(const Mat6& drift);

/// g_N = sqrt(N) d sqrt(omega_c / (2 hbar eps0 V)).
double atom_cavity_coupling(double dipole, double mode_volume, double atom_count, double omega_c);

/// Full chain params -> LinearModel. Does not throw on instability; inspect
/// `stability.stable`.
LinearModel linearize(const PhysicalParams& p);

}  // namespace hsq

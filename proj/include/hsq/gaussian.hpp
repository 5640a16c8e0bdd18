#pragma once

// Steady-state covariance matrix of the six fluctuation quadratures, by the
// algebraic Lyapunov route and by direct frequency integration of the
// resolvent, plus the derived quadrature report and characteristic function.

#include "hsq/model.hpp"
#include "hsq/quadrature.hpp"
#include "hsq/types.hpp"

namespace hsq {

enum class CmMethod { lyapunov, frequency_integral };

/// Symmetrized second moments V_ij = <{v_i, v_j}>/2; vacuum gives I/2.
struct CovarianceMatrix {
  Mat6 sigma = Mat6::Zero();
  CmMethod method = CmMethod::lyapunov;

  Mat2 cavity_block() const { return sigma.block<2, 2>(kCavX, kCavX); }
  Mat2 atom_block() const { return sigma.block<2, 2>(kAtomX, kAtomX); }
};

struct QuadratureReport {
  double var_x = 0.0;
  double var_y = 0.0;
  double sql = 0.5;
  double squeezing_db_x = 0.0;
  double squeezing_db_y = 0.0;
};

enum class NoiseModel { white, brownian };

/// Input-noise spectral density: the Markovian diffusion matrix, optionally
/// with the mechanical entry replaced by the symmetrized Brownian spectrum.
struct NoiseSpectrum {
  Mat6 white = Mat6::Zero();
  NoiseModel model = NoiseModel::white;
  double gamma_m = 0.0;
  double omega_m = 0.0;
  double temperature = 0.0;

  static NoiseSpectrum from(const PhysicalParams& p, NoiseModel model = NoiseModel::white);
  /// Mechanical (xi) entry at frequency omega.
  double mechanical(double omega) const;
};

/// Symmetrized Brownian force spectrum (gamma_m omega / omega_m) coth(hbar omega / 2 kB T).
double brownian_spectral_density(double omega, double gamma_m, double omega_m, double temperature);

/// Solves K sigma + sigma K^T = -D. Throws StabilityError if K is unstable.
CovarianceMatrix steady_cm_lyapunov(const Mat6& drift, const Mat6& diffusion);

struct FrequencyCmOptions {
  double rel_tol = 1e-11;
  quad::Exec exec = quad::Exec::parallel;
};

/// sigma = (1/2pi) Int T(w) S(w) T(w)^dag dw with T(w) = (-i w - K)^{-1}.
CovarianceMatrix steady_cm_frequency(const Mat6& drift, const NoiseSpectrum& noise,
                                     const FrequencyCmOptions& opts = {});

QuadratureReport quadrature_report(const CovarianceMatrix& cm);

/// Smallest eigenvalue of sigma + i Omega / 2 (Omega the three-mode symplectic form).
double uncertainty_margin(const Mat6& sigma);
/// uncertainty_margin >= -tol * ||sigma||.
bool is_physical(const Mat6& sigma, double tol = 1e-9);

/// exp(-p^T sigma p).
double joint_characteristic(const Mat6& sigma, const Vec6& point);
/// Cavity marginal exp(-(Re l, Im l) sigma_c (Re l, Im l)^T).
double cavity_characteristic(const Mat6& sigma, Complex lambda);

}  // namespace hsq

#pragma once

// Output-field quadrature spectra from the resolvent of the drift matrix and
// the input-output relation b_out = sqrt(2 kappa) b - b_in.

#include <iosfwd>
#include <span>
#include <vector>

#include "hsq/gaussian.hpp"
#include "hsq/model.hpp"
#include "hsq/quadrature.hpp"

namespace hsq {

/// Output spectral densities; shot noise is 1/2.
struct SpectrumResult {
  std::vector<double> omega;
  std::vector<double> s_x;
  std::vector<double> s_y;
  std::vector<double> s_xy;
  std::vector<double> s_opt;
  std::vector<double> s_opt_db;

  std::size_t argmin_opt() const;
};

/// (-i omega I - K)^{-1}. Throws NumericalError when the matrix is singular.
CMat6 fluctuation_transfer(const Mat6& drift, double omega);

/// Minimum over quadrature angles of the output spectrum at one frequency.
double optimal_spectrum(double s_x, double s_y, double s_xy);

/// 2048 points on [-5 omega_m, 5 omega_m] unless overridden.
std::vector<double> default_axis(double omega_m, int n_points = 2048, double span = 5.0);

struct SpectralPoint {
  double s_x = 0.0;
  double s_y = 0.0;
  double s_xy = 0.0;
};

/// Output quadrature spectra at one frequency.
SpectralPoint output_point(const Mat6& drift, double kappa, const NoiseSpectrum& noise, double omega);

/// Intracavity S_X(omega) = [T S T^dag]_XX; integrates to sigma_XX over the real line.
double intracavity_x_spectrum(const Mat6& drift, const NoiseSpectrum& noise, double omega);

SpectrumResult output_spectra(const PhysicalParams& params, const LinearModel& model,
                              std::span<const double> omega_axis, NoiseModel noise_model = NoiseModel::white,
                              quad::Exec exec = quad::Exec::parallel);

/// Experimental: covariance-like matrix of the zero-width spectral mode at
/// omega, built from the output channels of the cavity (sqrt(2 kappa) T - 1)
/// and of the atoms (sqrt(2 gamma_a) T - 1), with mechanical rows sqrt(gamma_m) T.
/// Only the cavity and atomic blocks matter for atomic conditioning.
Mat6 output_mode_covariance(const PhysicalParams& params, const LinearModel& model, double omega,
                            NoiseModel noise_model = NoiseModel::white);

void write_spectrum_csv(std::ostream& out, const SpectrumResult& r);
void write_spectrum_json(std::ostream& out, const SpectrumResult& r);

}  // namespace hsq

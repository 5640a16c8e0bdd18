#pragma once

// Cavity field conditioned on counting s excitations in the collective
// atomic mode: characteristic function, Wigner grid, moments, negativity.

#include <iosfwd>
#include <vector>

#include "hsq/gaussian.hpp"
#include "hsq/quadrature.hpp"
#include "hsq/types.hpp"

namespace hsq {

/// Largest excitation count accepted by the closed-form evaluation.
inline constexpr int kMaxExcitations = 20;

/// G_s(beta) = Int d^2 gamma exp(-|gamma|^2/2) zeta(0, beta, gamma) L_s(|gamma|^2),
/// evaluated in closed form. Real for a real symmetric sigma.
double g_s_function(const Mat6& sigma, int s, Complex beta);

/// zeta(lambda) = G_s(lambda) / G_s(0) for a fixed source covariance.
///
/// With u = (Re gamma, Im gamma) the integrand is a Gaussian in u times a
/// Laguerre polynomial of |u|^2. Completing the square leaves
///   G_s(b) = pi / sqrt(det M) exp(-b^T A_eff b) E[L_s(|u|^2)],
/// u ~ N(-M^{-1} C^T b, (2M)^{-1}), M = sigma_aa + I/2. The Laguerre
/// expectation is read off the generating function sum_s t^s L_s(x) =
/// exp(-t x / (1 - t)) / (1 - t) averaged over u.
class ConditionalField {
 public:
  ConditionalField(const CovarianceMatrix& source, int s);

  double operator()(double re, double im) const;
  double operator()(Complex lambda) const { return (*this)(lambda.real(), lambda.imag()); }

  /// Unnormalized G_s at b = (Re beta, Im beta).
  double g(double re, double im) const;

  int excitations() const { return s_; }
  double norm_g0() const { return g0_; }
  /// Tr[Pi rho] = G_s(0) / pi.
  double outcome_probability() const;
  /// Gaussian envelope exponent: |zeta| ~ poly * exp(-lambda^T A_eff lambda).
  const Mat2& envelope() const { return a_eff_; }
  const CovarianceMatrix& source() const { return source_; }

 private:
  struct Unguarded {};
  ConditionalField(const CovarianceMatrix& source, int s, Unguarded);
  friend double g_s_function(const Mat6& sigma, int s, Complex beta);

  CovarianceMatrix source_;
  int s_;
  Mat2 a_eff_;
  Mat2 cross_;      // C = sigma_ca
  Mat2 m_inv_;      // M^{-1}
  double prefactor_;
  std::vector<Mat2> c_pow_;        // (I - M^{-1})^j, j = 0..s
  std::vector<double> trace_pow_;  // traces of c_pow_
  double g0_;
};

/// Wigner function sampled on an n x n square grid, row-major with the X
/// index slow: values[ix * n + iy] = W(x_ix, y_iy).
struct WignerGrid {
  double half_width = 0.0;
  int n_points = 0;
  double dx = 0.0;
  double raw_norm = 0.0;  ///< sum W dx^2 before renormalization
  std::vector<double> values;

  double coordinate(int i) const { return -half_width + i * dx; }
  double at(int ix, int iy) const { return values[static_cast<std::size_t>(ix) * n_points + iy]; }
};

struct NegativityReport {
  double n_w = 0.0;
  double min_w = 0.0;
  double negative_fraction = 0.0;
};

struct Moments {
  double var_x = 0.0;
  double var_y = 0.0;
};

/// Default grid half-width: six standard deviations of the wider unconditional quadrature.
double default_half_width(const CovarianceMatrix& source);
inline constexpr int kDefaultGridPoints = 513;

/// W = F[zeta], normalized so the vacuum gives (1/pi) exp(-X^2 - Y^2).
WignerGrid wigner_grid(const ConditionalField& field, double half_width, int n_points,
                       quad::Exec exec = quad::Exec::parallel);

/// Unconditional cavity Wigner function, the Gaussian with covariance sigma_c.
WignerGrid gaussian_wigner_grid(const Mat2& sigma_c, double half_width, int n_points);

/// Second moments by summation over the grid.
Moments conditional_moments(const WignerGrid& grid);

/// Second moments from the curvature of zeta at the origin; no grid needed.
Moments curvature_moments(const ConditionalField& field);

NegativityReport negativity(const WignerGrid& grid);

void write_wigner_csv(std::ostream& out, const WignerGrid& grid);
void write_wigner_json(std::ostream& out, const WignerGrid& grid, const ConditionalField& field);
/// Unconditional grid; `excitations` is null.
void write_wigner_json(std::ostream& out, const WignerGrid& grid);

namespace kernels {

/// Samples of an even characteristic function on a uniform dual grid.
struct DualGrid {
  double half_width = 0.0;
  int n_points = 0;
  double step = 0.0;
  std::vector<double> zeta;  // row-major, index [k * n + l] for (lambda_k, lambda_l)
};

DualGrid sample_dual(const ConditionalField& field, double half_width, int n_points,
                     quad::Exec exec = quad::Exec::parallel);

/// Separable transform W(x_i, y_j) = (1/2pi^2) sum zeta cos(sqrt2 (x_i l_k + y_j l_l)) dl^2.
std::vector<double> wigner_dft(const DualGrid& dual, double half_width, int n_points, quad::Exec exec);

/// Direct O(n^2 m^2) double sum of the same transform; reference for tests and benchmarks.
std::vector<double> wigner_dft_reference(const DualGrid& dual, double half_width, int n_points);

}  // namespace kernels

}  // namespace hsq

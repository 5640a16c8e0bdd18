#pragma once

// Independent oracles shared by the unit tests and the acceptance binary.

#include <cstdint>
#include <random>
#include <string>

#include "hsq/config.hpp"
#include "hsq/model.hpp"
#include "hsq/types.hpp"

namespace hsq::oracle {

/// Absolute path of a shipped config file.
std::string config_path(const std::string& name);
RunConfig shipped_config(const std::string& name);

/// Random parameter set with O(1) rates whose drift matrix is stable.
PhysicalParams random_stable_params(std::mt19937_64& rng);

struct SdeEstimate {
  Mat6 mean = Mat6::Zero();
  Mat6 standard_error = Mat6::Zero();
};

/// Stationary covariance of dv = K v dt + D^{1/2} dW from one long
/// Euler-Maruyama trajectory (symmetrized outer products), with batch-means
/// standard errors. D must be diagonal.
SdeEstimate sde_covariance(const Mat6& drift, const Mat6& diffusion, double dt, double t_total, int batches,
                           std::uint64_t seed);

/// G_s(beta) by nested adaptive quadrature of
/// Int d^2 u exp(-|u|^2/2) exp(-p^T sigma p) L_s(|u|^2), p = (0, 0, beta, u).
double g_s_quadrature(const Mat6& sigma, int s, double beta_re, double beta_im, double rel_tol = 1e-13);

/// Minimum over theta of cos^2 S_x + sin^2 S_y + 2 sin cos S_xy by bracketing and golden-section search.
double min_over_angle(double s_x, double s_y, double s_xy);

/// Cavity-atom two-mode squeezed vacuum with squeezing r, mechanics in vacuum.
Mat6 two_mode_squeezed(double r);

/// Random physical cavity-atom covariance: a symplectic image of a thermal state.
Mat6 random_physical_cm(std::mt19937_64& rng, double max_occupation);

}  // namespace hsq::oracle

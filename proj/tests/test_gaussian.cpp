#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hsq/errors.hpp"
#include "hsq/gaussian.hpp"
#include "hsq/model.hpp"
#include "support.hpp"

using namespace hsq;

TEST(Gaussian, LyapunovMatchesFrequencyIntegralOnRandomModels) {
  std::mt19937_64 rng(20261019);
  for (int trial = 0; trial < 20; ++trial) {
    const PhysicalParams p = oracle::random_stable_params(rng);
    const LinearModel m = linearize(p);
    const CovarianceMatrix a = steady_cm_lyapunov(m.drift, m.diffusion);
    const CovarianceMatrix b = steady_cm_frequency(m.drift, NoiseSpectrum::from(p));
    EXPECT_LT((a.sigma - b.sigma).norm() / a.sigma.norm(), 1e-6) << "trial " << trial;
    EXPECT_TRUE(is_physical(a.sigma)) << "trial " << trial;
  }
}

TEST(Gaussian, LyapunovResidualIsSmall) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const LinearModel m = linearize(oracle::random_stable_params(rng));
    const Mat6 s = steady_cm_lyapunov(m.drift, m.diffusion).sigma;
    EXPECT_LT((m.drift * s + s * m.drift.transpose() + m.diffusion).norm(), 1e-12 * (1.0 + s.norm()));
    EXPECT_LT((s - s.transpose()).norm(), 1e-15 * s.norm());
  }
}

TEST(Gaussian, MonteCarloTrajectoriesAgreeWithinThreeStandardErrors) {
  std::mt19937_64 rng(424242);
  for (int model = 0; model < 3; ++model) {
    const PhysicalParams p = oracle::random_stable_params(rng);
    const LinearModel m = linearize(p);
    const Mat6 exact = steady_cm_lyapunov(m.drift, m.diffusion).sigma;
    const auto est = oracle::sde_covariance(m.drift, m.diffusion, 2e-3, 4e4, 40, 1000 + model);
    for (int k = 0; k < 6; ++k) {
      EXPECT_LT(std::abs(est.mean(k, k) - exact(k, k)), 3.0 * est.standard_error(k, k))
          << "model " << model << " entry " << k << " sde " << est.mean(k, k) << " exact " << exact(k, k);
    }
    EXPECT_LT(std::abs(est.mean(kCavX, kCavY) - exact(kCavX, kCavY)), 3.0 * est.standard_error(kCavX, kCavY));
  }
}

TEST(Gaussian, UncoupledModesSitAtTheirBaselines) {
  std::mt19937_64 rng(3);
  PhysicalParams p = oracle::random_stable_params(rng);
  p.g_n = 0.0;
  p.chi_eff = 0.0;
  const LinearModel m = linearize(p);
  for (const auto route : {0, 1}) {
    const Mat6 s = route == 0 ? steady_cm_lyapunov(m.drift, m.diffusion).sigma
                              : steady_cm_frequency(m.drift, NoiseSpectrum::from(p)).sigma;
    const double tol = route == 0 ? 1e-15 : 1e-9;
    EXPECT_NEAR(s(kCavX, kCavX), 0.5, tol);
    EXPECT_NEAR(s(kCavY, kCavY), 0.5, tol);
    EXPECT_NEAR(s(kAtomX, kAtomX), 0.5, tol);
    EXPECT_NEAR(s(kAtomY, kAtomY), 0.5, tol);
    EXPECT_NEAR(s(kCavX, kCavY), 0.0, tol);
    // Damped oscillator: (n + 1/2) in both quadratures.
    EXPECT_NEAR(s(kMechQ, kMechQ) / (m.n_bar + 0.5), 1.0, 1e-9);
    EXPECT_NEAR(s(kMechP, kMechP) / (m.n_bar + 0.5), 1.0, 1e-9);
  }
  const QuadratureReport r = quadrature_report(steady_cm_lyapunov(m.drift, m.diffusion));
  EXPECT_EQ(r.var_x, 0.5);
  EXPECT_EQ(r.squeezing_db_x, 0.0);
}

TEST(Gaussian, BrownianNoiseReducesToWhiteAtHighTemperatureAndQ) {
  // Membrane set: n ~ 2e5, Q = 1e4; the Markov approximation should hold to 1%.
  PhysicalParams p;
  p.mass = 2e-16;
  p.omega_m = 2 * M_PI * 1e7;
  p.gamma_m = p.omega_m / 1e4;
  p.omega_l = omega_from_wavelength(1540e-9);
  p.power = 2.36e-3;
  p.cavity_length = 1e-3;
  p.kappa = 2 * M_PI * 2e6;
  p.gamma_a = 2 * M_PI * 2e5;
  p.g_n = 2e8;
  p.delta_a = -p.omega_m;
  p.temperature = 100.0;
  const LinearModel m = linearize(p);
  const Mat6 white = steady_cm_lyapunov(m.drift, m.diffusion).sigma;
  FrequencyCmOptions o;
  o.rel_tol = 1e-9;
  const Mat6 brown = steady_cm_frequency(m.drift, NoiseSpectrum::from(p, NoiseModel::brownian), o).sigma;
  for (int k = kCavX; k <= kCavY; ++k) EXPECT_NEAR(brown(k, k) / white(k, k), 1.0, 1e-2);
}

TEST(Gaussian, BrownianDensityLimits) {
  const double gm = 3.0, wm = 10.0;
  EXPECT_NEAR(brownian_spectral_density(0.0, gm, wm, 1.0),
              gm / wm * 2.0 * 1.380649e-23 / 1.054571817e-34, 1e-6 * gm / wm * 2.6e11);
  EXPECT_DOUBLE_EQ(brownian_spectral_density(-4.0, gm, wm, 0.0), gm * 4.0 / wm);
  EXPECT_DOUBLE_EQ(brownian_spectral_density(5.0, gm, wm, 2.0), brownian_spectral_density(-5.0, gm, wm, 2.0));
}

TEST(Gaussian, UnstableDriftThrowsWithEigenvalues) {
  Mat6 k = -Mat6::Identity();
  k(0, 0) = 0.1;
  try {
    steady_cm_lyapunov(k, Mat6::Identity());
    FAIL();
  } catch (const StabilityError& e) {
    EXPECT_EQ(e.eigenvalues().size(), 6u);
  }
}

TEST(Gaussian, UncertaintyCheckRejectsSubVacuumStates) {
  Mat6 s = 0.5 * Mat6::Identity();
  EXPECT_TRUE(is_physical(s));
  s(kCavX, kCavX) = 0.2;
  s(kCavY, kCavY) = 0.2;
  EXPECT_FALSE(is_physical(s));
  s(kCavY, kCavY) = 1.25;  // 0.2 * 1.25 = 1/4: minimum-uncertainty squeezed state
  EXPECT_TRUE(is_physical(s));
}

TEST(Gaussian, CharacteristicFunctionOfVacuum) {
  const Mat6 s = 0.5 * Mat6::Identity();
  EXPECT_NEAR(cavity_characteristic(s, Complex(0.3, -0.4)), std::exp(-0.5 * 0.25), 1e-15);
}

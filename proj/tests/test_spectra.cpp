#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hsq/gaussian.hpp"
#include "hsq/quadrature.hpp"
#include "hsq/spectra.hpp"
#include "support.hpp"

using namespace hsq;

TEST(Spectra, PassiveCavityIsShotNoiseLimited) {
  std::mt19937_64 rng(1);
  PhysicalParams p = oracle::random_stable_params(rng);
  p.g_n = 0.0;
  p.chi_eff = 0.0;
  const LinearModel m = linearize(p);
  const auto axis = default_axis(p.omega_m, 257, 5.0);
  const SpectrumResult r = output_spectra(p, m, axis);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    EXPECT_NEAR(r.s_x[i], 0.5, 1e-12);
    EXPECT_NEAR(r.s_y[i], 0.5, 1e-12);
    EXPECT_NEAR(r.s_xy[i], 0.0, 1e-12);
    EXPECT_NEAR(r.s_opt_db[i], 0.0, 1e-10);
  }
}

TEST(Spectra, OptimalSpectrumEqualsNumericalAngleMinimum) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double sx = 0.1 + std::abs(u(rng)) * 3;
    const double sy = 0.1 + std::abs(u(rng)) * 3;
    const double sxy = u(rng) * std::sqrt(sx * sy);
    EXPECT_NEAR(optimal_spectrum(sx, sy, sxy), oracle::min_over_angle(sx, sy, sxy), 1e-9);
  }
}

TEST(Spectra, OptimalIsBelowBothQuadratures) {
  std::mt19937_64 rng(4);
  const PhysicalParams p = oracle::random_stable_params(rng);
  const LinearModel m = linearize(p);
  const auto axis = default_axis(p.omega_m, 513, 4.0);
  const SpectrumResult r = output_spectra(p, m, axis);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    EXPECT_LE(r.s_opt[i], std::min(r.s_x[i], r.s_y[i]) + 1e-14);
    EXPECT_GE(r.s_x[i] * r.s_y[i] - r.s_xy[i] * r.s_xy[i], -1e-12);
  }
}

TEST(Spectra, IntracavitySpectrumIntegratesToTheVariance) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 3; ++trial) {
    const PhysicalParams p = oracle::random_stable_params(rng);
    const LinearModel m = linearize(p);
    const NoiseSpectrum noise = NoiseSpectrum::from(p);
    const double var = steady_cm_lyapunov(m.drift, m.diffusion).sigma(kCavX, kCavX);
    // omega = tan(t) maps the real line onto (-pi/2, pi/2).
    quad::Options o;
    o.rel_tol = 1e-10;
    const auto r = quad::integrate(
        [&](double t) {
          const double c = std::cos(t);
          return intracavity_x_spectrum(m.drift, noise, std::tan(t)) / (c * c) / (2 * std::numbers::pi);
        },
        -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, o);
    EXPECT_NEAR(r.value[0] / var, 1.0, 1e-4) << "trial " << trial;
  }
}

TEST(Spectra, SerialAndParallelAgree) {
  std::mt19937_64 rng(9);
  const PhysicalParams p = oracle::random_stable_params(rng);
  const LinearModel m = linearize(p);
  const auto axis = default_axis(p.omega_m, 301, 3.0);
  const auto a = output_spectra(p, m, axis, NoiseModel::white, quad::Exec::serial);
  const auto b = output_spectra(p, m, axis, NoiseModel::white, quad::Exec::parallel);
  EXPECT_EQ(a.s_opt, b.s_opt);
  EXPECT_EQ(a.s_xy, b.s_xy);
}

TEST(Spectra, DefaultAxisIsSymmetric) {
  const auto axis = default_axis(2.0);
  ASSERT_EQ(axis.size(), 2048u);
  EXPECT_DOUBLE_EQ(axis.front(), -10.0);
  EXPECT_DOUBLE_EQ(axis.back(), 10.0);
}

TEST(Spectra, OutputModeOfPassiveCavityIsVacuum) {
  std::mt19937_64 rng(12);
  PhysicalParams p = oracle::random_stable_params(rng);
  p.g_n = 0.0;
  p.chi_eff = 0.0;
  const Mat6 s = output_mode_covariance(p, linearize(p), 0.3);
  EXPECT_NEAR(s(kCavX, kCavX), 0.5, 1e-12);
  EXPECT_NEAR(s(kCavY, kCavY), 0.5, 1e-12);
  EXPECT_NEAR(s(kAtomX, kAtomX), 0.5, 1e-12);
  EXPECT_NEAR(s(kCavX, kAtomX), 0.0, 1e-12);
}

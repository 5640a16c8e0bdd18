#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "hsq/conditional.hpp"
#include "hsq/errors.hpp"
#include "support.hpp"

using namespace hsq;

namespace {

CovarianceMatrix cm_of(const Mat6& s) {
  CovarianceMatrix c;
  c.sigma = s;
  return c;
}

}  // namespace

TEST(Conditional, ClosedFormMatchesTwoDimensionalQuadrature) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const Mat6 sigma = oracle::random_physical_cm(rng, 1.5);
    for (int s = 0; s <= 2; ++s) {
      for (const Complex beta : {Complex(0, 0), Complex(0.3, -0.2), Complex(-0.7, 0.5)}) {
        const double closed = g_s_function(sigma, s, beta);
        const double numeric = oracle::g_s_quadrature(sigma, s, beta.real(), beta.imag());
        EXPECT_NEAR(closed, numeric, 1e-6 * std::max(std::abs(numeric), 1e-3))
            << "trial " << trial << " s " << s << " beta " << beta;
      }
    }
  }
}

TEST(Conditional, TwoModeSqueezedVacuumProjectsOntoFockStates) {
  // Counting s quanta in one arm of a two-mode squeezed vacuum leaves |s> in the other.
  const CovarianceMatrix src = cm_of(oracle::two_mode_squeezed(0.6));
  for (int s = 0; s <= 3; ++s) {
    const ConditionalField f(src, s);
    const Moments c = curvature_moments(f);
    EXPECT_NEAR(c.var_x, s + 0.5, 1e-6);
    EXPECT_NEAR(c.var_y, s + 0.5, 1e-6);
    const double lambda2 = std::pow(std::tanh(0.6), 2);
    EXPECT_NEAR(f.outcome_probability(), (1 - lambda2) * std::pow(lambda2, s), 1e-12);

    const WignerGrid g = wigner_grid(f, 7.0, 201);
    const int mid = 100;
    EXPECT_NEAR(g.at(mid, mid) * std::numbers::pi, s % 2 == 0 ? 1.0 : -1.0, 1e-6) << "s " << s;
    const Moments m = conditional_moments(g);
    EXPECT_NEAR(m.var_x, s + 0.5, 1e-6);
    if (s > 0) {
      EXPECT_GT(negativity(g).n_w, 0.05);
    } else {
      EXPECT_EQ(negativity(g).n_w, 0.0);
    }
  }
}

TEST(Conditional, OutcomesSumToTheUnconditionalState) {
  std::mt19937_64 rng(5);
  const Mat6 sigma = oracle::random_physical_cm(rng, 0.3);
  const CovarianceMatrix src = cm_of(sigma);
  double total = 0.0;
  const Complex lambda(0.4, -0.25);
  double mixed = 0.0;
  for (int s = 0; s <= kMaxExcitations; ++s) {
    const ConditionalField f(src, s);
    total += f.outcome_probability();
    mixed += f.outcome_probability() * f(lambda);
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_NEAR(mixed, cavity_characteristic(sigma, lambda), 1e-9);
}

TEST(Conditional, GridPipelineIsCalibratedOnRandomStates) {
  // Decoupled vacuum atoms: s = 0 leaves the cavity marginal unchanged, so the
  // grid moments must reproduce sigma_c.
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    Mat6 sigma = oracle::random_physical_cm(rng, 2.0);
    sigma.block<2, 6>(kAtomX, 0).setZero();
    sigma.block<6, 2>(0, kAtomX).setZero();
    sigma.block<2, 2>(kAtomX, kAtomX) = 0.5 * Mat2::Identity();
    const CovarianceMatrix src = cm_of(sigma);
    const ConditionalField f(src, 0);
    EXPECT_NEAR(f.outcome_probability(), 1.0, 1e-14);
    const WignerGrid g = wigner_grid(f, default_half_width(src), kDefaultGridPoints);
    const Moments m = conditional_moments(g);
    EXPECT_NEAR(m.var_x / sigma(kCavX, kCavX), 1.0, 1e-3) << "trial " << trial;
    EXPECT_NEAR(m.var_y / sigma(kCavY, kCavY), 1.0, 1e-3) << "trial " << trial;
  }
}

TEST(Conditional, MixtureOfGridMomentsRecoversCorrelatedMarginal) {
  std::mt19937_64 rng(123);
  const Mat6 sigma = oracle::random_physical_cm(rng, 0.2);
  const CovarianceMatrix src = cm_of(sigma);
  double vx = 0.0;
  for (int s = 0; s <= 12; ++s) {
    const ConditionalField f(src, s);
    if (f.outcome_probability() < 1e-14) break;
    const Moments c = curvature_moments(f);
    const WignerGrid g = wigner_grid(f, 6.0 * std::sqrt(std::max(c.var_x, c.var_y)) + 2.0, 257);
    vx += f.outcome_probability() * conditional_moments(g).var_x;
  }
  EXPECT_NEAR(vx / sigma(kCavX, kCavX), 1.0, 1e-3);
}

TEST(Conditional, CharacteristicFunctionIsEvenAndNormalized) {
  std::mt19937_64 rng(8);
  const CovarianceMatrix src = cm_of(oracle::random_physical_cm(rng, 1.0));
  for (int s = 0; s <= 3; ++s) {
    const ConditionalField f(src, s);
    EXPECT_DOUBLE_EQ(f(0.0, 0.0), 1.0);
    for (const Complex l : {Complex(0.2, 0.1), Complex(-1.3, 0.7)})
      EXPECT_NEAR(f(l), f(-l), 1e-14 * (1.0 + std::abs(f(l))));
  }
}

TEST(Conditional, CurvatureAndGridMomentsAgree) {
  std::mt19937_64 rng(31);
  const CovarianceMatrix src = cm_of(oracle::random_physical_cm(rng, 1.0));
  for (int s = 0; s <= 2; ++s) {
    const ConditionalField f(src, s);
    const Moments c = curvature_moments(f);
    const Moments g = conditional_moments(wigner_grid(f, 6.0 * std::sqrt(std::max(c.var_x, c.var_y)) + 2.0, 401));
    EXPECT_NEAR(g.var_x / c.var_x, 1.0, 1e-5);
    EXPECT_NEAR(g.var_y / c.var_y, 1.0, 1e-5);
  }
}

TEST(Conditional, SeparableTransformMatchesDirectSum) {
  std::mt19937_64 rng(2);
  const CovarianceMatrix src = cm_of(oracle::random_physical_cm(rng, 0.8));
  const ConditionalField f(src, 2);
  const auto dual = kernels::sample_dual(f, 4.0, 41, quad::Exec::serial);
  const auto fast = kernels::wigner_dft(dual, 3.0, 17, quad::Exec::serial);
  const auto par = kernels::wigner_dft(dual, 3.0, 17, quad::Exec::parallel);
  const auto ref = kernels::wigner_dft_reference(dual, 3.0, 17);
  double scale = 0.0;
  for (double v : ref) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_NEAR(fast[i], ref[i], 1e-12 * scale);
    EXPECT_EQ(fast[i], par[i]);
  }
}

TEST(Conditional, SerialAndParallelGridsAgree) {
  const CovarianceMatrix src = cm_of(oracle::two_mode_squeezed(0.4));
  const ConditionalField f(src, 1);
  const WignerGrid a = wigner_grid(f, 6.0, 129, quad::Exec::serial);
  const WignerGrid b = wigner_grid(f, 6.0, 129, quad::Exec::parallel);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_EQ(a.values[i], b.values[i]);
}

TEST(Conditional, GaussianGridMatchesClosedForm) {
  Mat2 c;
  c << 1.3, 0.4, 0.4, 0.7;
  const WignerGrid g = gaussian_wigner_grid(c, 8.0, 161);
  EXPECT_NEAR(g.raw_norm, 1.0, 1e-9);
  const Moments m = conditional_moments(g);
  EXPECT_NEAR(m.var_x, 1.3, 1e-8);
  EXPECT_NEAR(m.var_y, 0.7, 1e-8);
  EXPECT_NEAR(g.at(80, 80), 1.0 / (2 * std::numbers::pi * std::sqrt(c.determinant())), 1e-14);
}

TEST(Conditional, RejectsOutOfRangeExcitations) {
  const CovarianceMatrix src = cm_of(oracle::two_mode_squeezed(0.2));
  EXPECT_THROW(ConditionalField(src, -1), DomainError);
  EXPECT_THROW(ConditionalField(src, kMaxExcitations + 1), DomainError);
}

TEST(Conditional, TooSmallGridIsReported) {
  const CovarianceMatrix src = cm_of(oracle::two_mode_squeezed(0.8));
  const ConditionalField f(src, 2);
  EXPECT_THROW(wigner_grid(f, 1.0, 65), DomainError);
}

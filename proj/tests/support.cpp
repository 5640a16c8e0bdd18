#include "support.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "hsq/constants.hpp"
#include "hsq/quadrature.hpp"

#ifndef HSQ_CONFIG_DIR
#error "HSQ_CONFIG_DIR must point at the shipped configs"
#endif

namespace hsq::oracle {

std::string config_path(const std::string& name) { return std::string(HSQ_CONFIG_DIR) + "/" + name + ".json"; }

RunConfig shipped_config(const std::string& name) { return load_config(config_path(name)); }

PhysicalParams random_stable_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
  for (;;) {
    PhysicalParams p;
    p.omega_m = 1.0;
    p.gamma_m = in(0.05, 0.3);
    p.mass = 1.0;
    p.omega_l = 1.0;
    p.power = 1.0;
    p.cavity_length = 1.0;
    p.kappa = in(0.3, 1.5);
    p.gamma_a = in(0.2, 1.0);
    p.g_n = in(0.0, 0.8);
    p.delta_c_tilde = in(-1.0, 1.0);
    p.delta_a = in(-1.5, 1.5);
    p.chi_eff = in(0.0, 0.4);
    const double n_bar = in(0.0, 5.0);
    p.temperature = constants::kHbar * p.omega_m / (constants::kBoltzmann * std::log1p(1.0 / n_bar));
    const LinearModel m = linearize(p);
    if (m.stability.stable && m.stability.max_real < -0.01) return p;
  }
}

SdeEstimate sde_covariance(const Mat6& drift, const Mat6& diffusion, double dt, double t_total, int batches,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec6 amp;
  for (int k = 0; k < 6; ++k) amp[k] = std::sqrt(diffusion(k, k) * dt);
  const Mat6 step = Mat6::Identity() + dt * drift;

  Vec6 v = Vec6::Zero();
  Vec6 noise;
  const auto advance = [&] {
    for (int k = 0; k < 6; ++k) noise[k] = amp[k] > 0 ? amp[k] * normal(rng) : 0.0;
    v = step * v + noise;
  };

  // Burn-in of several relaxation times.
  Eigen::EigenSolver<Mat6> es(drift, false);
  const double slowest = -es.eigenvalues().real().maxCoeff();
  const long burn = static_cast<long>(20.0 / slowest / dt);
  for (long i = 0; i < burn; ++i) advance();

  const long per_batch = static_cast<long>(t_total / dt / batches);
  std::vector<Mat6> means(batches, Mat6::Zero());
  for (int b = 0; b < batches; ++b) {
    Mat6 acc = Mat6::Zero();
    for (long i = 0; i < per_batch; ++i) {
      advance();
      acc.noalias() += v * v.transpose();
    }
    means[b] = acc / static_cast<double>(per_batch);
  }
  SdeEstimate out;
  for (const auto& m : means) out.mean += m;
  out.mean /= batches;
  Mat6 var = Mat6::Zero();
  for (const auto& m : means) var += (m - out.mean).cwiseAbs2();
  out.standard_error = (var / (batches - 1.0) / batches).cwiseSqrt();
  return out;
}

double g_s_quadrature(const Mat6& sigma, int s, double beta_re, double beta_im, double rel_tol) {
  // Integration box from the Gaussian factor's curvature; the integrand itself is evaluated raw.
  const Eigen::Matrix2d m = sigma.block<2, 2>(kAtomX, kAtomX) + 0.5 * Eigen::Matrix2d::Identity();
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues().minCoeff();
  const Eigen::Vector2d b(beta_re, beta_im);
  const Eigen::Vector2d center = -m.inverse() * sigma.block<2, 2>(kCavX, kAtomX).transpose() * b;
  const double half = std::sqrt(60.0 / lmin);

  const auto integrand = [&](double ur, double ui) {
    Vec6 p;
    p << 0.0, 0.0, beta_re, beta_im, ur, ui;
    const double r2 = ur * ur + ui * ui;
    return std::exp(-0.5 * r2 - p.dot(sigma * p)) * std::laguerre(static_cast<unsigned>(s), r2);
  };
  quad::Options inner;
  inner.rel_tol = rel_tol;
  inner.exec = quad::Exec::serial;
  quad::Options outer = inner;
  const auto row = [&](double ur) {
    return quad::integrate([&](double ui) { return integrand(ur, ui); }, center[1] - half, center[1] + half, inner)
        .value[0];
  };
  return quad::integrate(row, center[0] - half, center[0] + half, outer).value[0];
}

double min_over_angle(double s_x, double s_y, double s_xy) {
  const auto f = [&](double t) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    return c * c * s_x + s * s * s_y + 2.0 * s * c * s_xy;
  };
  const int n = 4096;
  int best = 0;
  double fbest = f(0.0);
  for (int i = 1; i < n; ++i) {
    const double v = f(std::numbers::pi * i / n);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  double a = std::numbers::pi * (best - 1) / n;
  double b = std::numbers::pi * (best + 1) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (f(c) < f(d))
      b = d;
    else
      a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return std::min(fbest, f(0.5 * (a + b)));
}

Mat6 two_mode_squeezed(double r) {
  Mat6 s = Mat6::Zero();
  const double ch = 0.5 * std::cosh(2.0 * r);
  const double sh = 0.5 * std::sinh(2.0 * r);
  s(kMechQ, kMechQ) = s(kMechP, kMechP) = 0.5;
  s(kCavX, kCavX) = s(kCavY, kCavY) = ch;
  s(kAtomX, kAtomX) = s(kAtomY, kAtomY) = ch;
  s(kCavX, kAtomX) = s(kAtomX, kCavX) = sh;
  s(kCavY, kAtomY) = s(kAtomY, kCavY) = -sh;
  return s;
}

Mat6 random_physical_cm(std::mt19937_64& rng, double max_occupation) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat6 sigma = Mat6::Zero();
  for (int k = 0; k < 3; ++k) sigma(2 * k, 2 * k) = sigma(2 * k + 1, 2 * k + 1) = 0.5 + max_occupation * u(rng);

  const auto rotate = [&](int mode, double t) {
    Mat6 r = Mat6::Identity();
    r(2 * mode, 2 * mode) = r(2 * mode + 1, 2 * mode + 1) = std::cos(t);
    r(2 * mode, 2 * mode + 1) = std::sin(t);
    r(2 * mode + 1, 2 * mode) = -std::sin(t);
    return r;
  };
  const auto squeeze = [&](int mode, double z) {
    Mat6 q = Mat6::Identity();
    q(2 * mode, 2 * mode) = std::exp(-z);
    q(2 * mode + 1, 2 * mode + 1) = std::exp(z);
    return q;
  };
  const auto split = [&](int a, int b, double t) {
    Mat6 m = Mat6::Identity();
    for (int q = 0; q < 2; ++q) {
      m(2 * a + q, 2 * a + q) = m(2 * b + q, 2 * b + q) = std::cos(t);
      m(2 * a + q, 2 * b + q) = std::sin(t);
      m(2 * b + q, 2 * a + q) = -std::sin(t);
    }
    return m;
  };
  Mat6 s = Mat6::Identity();
  for (int layer = 0; layer < 2; ++layer) {
    for (int k = 0; k < 3; ++k) s = squeeze(k, 0.4 * (u(rng) - 0.5)) * rotate(k, 2.0 * std::numbers::pi * u(rng)) * s;
    s = split(0, 1, u(rng)) * split(1, 2, u(rng)) * split(0, 2, u(rng)) * s;
  }
  return s * sigma * s.transpose();
}

}  // namespace hsq::oracle

#include "hsq/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "hsq/constants.hpp"
#include "hsq/errors.hpp"

namespace hsq {

namespace {

constexpr int kDim = 6;
constexpr int kSymDim = kDim * (kDim + 1) / 2;

// (i, j) with i <= j  <->  packed index, row-major over the upper triangle.
constexpr std::array<std::array<int, 2>, kSymDim> make_pairs() {
  std::array<std::array<int, 2>, kSymDim> pairs{};
  int n = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) pairs[n++] = {i, j};
  return pairs;
}
constexpr auto kPairs = make_pairs();

Mat6 unpack(const Eigen::Matrix<double, kSymDim, 1>& v) {
  Mat6 m;
  for (int n = 0; n < kSymDim; ++n) {
    m(kPairs[n][0], kPairs[n][1]) = v[n];
    m(kPairs[n][1], kPairs[n][0]) = v[n];
  }
  return m;
}

void throw_if_unstable(const Mat6& drift) {
  const StabilityReport st = check_stability(drift);
  if (!st.stable)
    throw StabilityError("drift matrix is not stable (max Re eig = " + std::to_string(st.max_real) +
                             "); no steady state",
                         st.eigenvalues);
}

}  // namespace

NoiseSpectrum NoiseSpectrum::from(const PhysicalParams& p, NoiseModel model) {
  NoiseSpectrum n;
  n.white = build_diffusion(p);
  n.model = model;
  n.gamma_m = p.gamma_m;
  n.omega_m = p.omega_m;
  n.temperature = p.temperature;
  return n;
}

double NoiseSpectrum::mechanical(double omega) const {
  if (model == NoiseModel::white) return white(kMechP, kMechP);
  return brownian_spectral_density(omega, gamma_m, omega_m, temperature);
}

double brownian_spectral_density(double omega, double gamma_m, double omega_m, double temperature) {
  if (temperature <= 0) return gamma_m * std::abs(omega) / omega_m;
  const double thermal = 2.0 * constants::kBoltzmann * temperature / constants::kHbar;  // 2 kB T / hbar
  const double x = omega / thermal;
  // omega coth(x) -> thermal (1 + x^2/3) as x -> 0
  const double omega_coth = std::abs(x) < 1e-4 ? thermal * (1.0 + x * x / 3.0) : omega / std::tanh(x);
  return gamma_m * omega_coth / omega_m;
}

CovarianceMatrix steady_cm_lyapunov(const Mat6& drift, const Mat6& diffusion) {
  throw_if_unstable(drift);

  using SymMat = Eigen::Matrix<double, kSymDim, kSymDim>;
  using SymVec = Eigen::Matrix<double, kSymDim, 1>;
  SymMat a = SymMat::Zero();
  SymVec b;
  for (int col = 0; col < kSymDim; ++col) {
    Mat6 e = Mat6::Zero();
    e(kPairs[col][0], kPairs[col][1]) = 1.0;
    e(kPairs[col][1], kPairs[col][0]) = 1.0;
    const Mat6 image = drift * e + e * drift.transpose();
    for (int row = 0; row < kSymDim; ++row) a(row, col) = image(kPairs[row][0], kPairs[row][1]);
  }
  for (int row = 0; row < kSymDim; ++row) b[row] = -diffusion(kPairs[row][0], kPairs[row][1]);

  // Rates span many decades; equilibrate columns before factorizing.
  SymVec scale;
  for (int c = 0; c < kSymDim; ++c) {
    const double n = a.col(c).cwiseAbs().maxCoeff();
    scale[c] = n > 0 ? 1.0 / n : 1.0;
  }
  const SymMat scaled = a * scale.asDiagonal();
  Eigen::FullPivLU<SymMat> lu(scaled);
  if (!lu.isInvertible()) throw NumericalError("Lyapunov system is singular");

  SymVec y = lu.solve(b);
  for (int iter = 0; iter < 4; ++iter) y += lu.solve(b - scaled * y);
  const SymVec x = scale.asDiagonal() * y;

  CovarianceMatrix cm;
  cm.sigma = unpack(x);
  cm.method = CmMethod::lyapunov;

  // Backward-error test: residual against the size of the terms it balances.
  const double resid = (drift * cm.sigma + cm.sigma * drift.transpose() + diffusion).norm();
  const double terms = 2.0 * drift.norm() * cm.sigma.norm() + diffusion.norm();
  const double scale_ref = terms > 0 ? terms : 1.0;
  if (!(resid <= 1e-10 * scale_ref))
    throw NumericalError("Lyapunov residual above tolerance", resid / scale_ref);
  return cm;
}

CovarianceMatrix steady_cm_frequency(const Mat6& drift, const NoiseSpectrum& noise, const FrequencyCmOptions& opts) {
  throw_if_unstable(drift);
  const StabilityReport st = check_stability(drift);

  double scale = 0.0;
  for (const auto& e : st.eigenvalues) scale = std::max(scale, std::abs(e));
  const double half_pi = 0.5 * std::numbers::pi;

  const Eigen::Vector<double, kDim> white_diag = noise.white.diagonal();
  if (!noise.white.isDiagonal()) throw DomainError("steady_cm_frequency expects a diagonal noise matrix");

  // Accumulates Re[T S T^dag] (packed upper triangle) for a diagonal S.
  const auto accumulate = [&drift](double omega, const Eigen::Vector<double, kDim>& s_diag,
                                   Eigen::Ref<Eigen::VectorXd> out, double weight) {
    const CMat6 m = Complex(0.0, -omega) * CMat6::Identity() - drift.cast<Complex>();
    const CMat6 t = m.partialPivLu().inverse();
    for (int n = 0; n < kSymDim; ++n) {
      const int i = kPairs[n][0];
      const int j = kPairs[n][1];
      double acc = 0.0;
      for (int k = 0; k < kDim; ++k) acc += s_diag[k] * (t(i, k) * std::conj(t(j, k))).real();
      out[n] = weight * acc;
    }
  };

  // Whole real line via omega = scale * tan(theta); breakpoints bracket each
  // resonance at Im(eig) within a few linewidths.
  std::vector<double> theta_bp = {-half_pi, half_pi};
  for (const auto& e : st.eigenvalues) {
    for (double offset : {-3.0, -0.5, 0.0, 0.5, 3.0}) {
      theta_bp.push_back(std::atan((e.imag() + offset * std::abs(e.real())) / scale));
    }
  }
  std::sort(theta_bp.begin(), theta_bp.end());
  theta_bp.erase(std::unique(theta_bp.begin(), theta_bp.end()), theta_bp.end());

  quad::Options qo;
  qo.rel_tol = opts.rel_tol;
  qo.exec = opts.exec;

  const auto white_integrand = [&](double theta, Eigen::Ref<Eigen::VectorXd> out) {
    const double c = std::cos(theta);
    const double omega = scale * std::tan(theta);
    accumulate(omega, white_diag, out, scale / (c * c) / constants::kTwoPi);
  };
  quad::Result total = quad::integrate(white_integrand, kSymDim, theta_bp, qo);
  double est = total.error;

  if (noise.model == NoiseModel::brownian) {
    // The Ohmic spectrum grows with |omega|; integrate the departure from the
    // white level over a finite window, which acts as the bath cutoff.
    const double cutoff = 50.0 * scale;
    std::vector<double> bp = {-cutoff, cutoff};
    for (const auto& e : st.eigenvalues) {
      for (double offset : {-3.0, 0.0, 3.0}) bp.push_back(e.imag() + offset * std::abs(e.real()));
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    bp.erase(std::remove_if(bp.begin(), bp.end(), [cutoff](double w) { return std::abs(w) > cutoff; }), bp.end());

    const auto correction = [&](double omega, Eigen::Ref<Eigen::VectorXd> out) {
      Eigen::Vector<double, kDim> d = Eigen::Vector<double, kDim>::Zero();
      d[kMechP] = noise.mechanical(omega) - white_diag[kMechP];
      accumulate(omega, d, out, 1.0 / constants::kTwoPi);
    };
    quad::Options co = qo;
    co.abs_tol = qo.rel_tol * total.value.norm();
    const quad::Result corr = quad::integrate(correction, kSymDim, bp, co);
    total.value += corr.value;
    est += corr.error;
    total.converged = total.converged && corr.converged;
  }

  const double rel = est / std::max(total.value.norm(), 1e-300);
  if (!total.converged && rel > 1e-6) throw NumericalError("frequency-integral quadrature did not converge", rel);

  CovarianceMatrix cm;
  cm.sigma = unpack(total.value);
  cm.method = CmMethod::frequency_integral;
  return cm;
}

QuadratureReport quadrature_report(const CovarianceMatrix& cm) {
  QuadratureReport r;
  r.var_x = cm.sigma(kCavX, kCavX);
  r.var_y = cm.sigma(kCavY, kCavY);
  r.squeezing_db_x = 10.0 * std::log10(r.var_x / r.sql);
  r.squeezing_db_y = 10.0 * std::log10(r.var_y / r.sql);
  return r;
}

double uncertainty_margin(const Mat6& sigma) {
  CMat6 h = sigma.cast<Complex>();
  for (int m = 0; m < 3; ++m) {
    h(2 * m, 2 * m + 1) += Complex(0.0, 0.5);
    h(2 * m + 1, 2 * m) -= Complex(0.0, 0.5);
  }
  Eigen::SelfAdjointEigenSolver<CMat6> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen-solver failed in uncertainty check");
  return solver.eigenvalues().minCoeff();
}

bool is_physical(const Mat6& sigma, double tol) {
  return uncertainty_margin(sigma) >= -tol * sigma.norm();
}

double joint_characteristic(const Mat6& sigma, const Vec6& point) {
  return std::exp(-point.dot(sigma * point));
}

double cavity_characteristic(const Mat6& sigma, Complex lambda) {
  const Vec2 v(lambda.real(), lambda.imag());
  return std::exp(-v.dot(sigma.block<2, 2>(kCavX, kCavX) * v));
}

}  // namespace hsq

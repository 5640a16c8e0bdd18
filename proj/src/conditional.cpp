#include "hsq/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "hsq/errors.hpp"
#include "hsq/io.hpp"

namespace hsq {

ConditionalField::ConditionalField(const CovarianceMatrix& source, int s) : ConditionalField(source, s, Unguarded{}) {
  if (!(g0_ > 1e-300)) throw DomainError("zero-probability outcome: G_s(0) = " + std::to_string(g0_));
}

ConditionalField::ConditionalField(const CovarianceMatrix& source, int s, Unguarded) : source_(source), s_(s) {
  if (s < 0 || s > kMaxExcitations)
    throw DomainError("excitation count must be in [0, " + std::to_string(kMaxExcitations) + "]");

  const Mat2 a = source.sigma.block<2, 2>(kCavX, kCavX);
  const Mat2 b = source.sigma.block<2, 2>(kAtomX, kAtomX);
  cross_ = source.sigma.block<2, 2>(kCavX, kAtomX);

  const Mat2 m = b + 0.5 * Mat2::Identity();
  Eigen::LLT<Mat2> llt(m);
  if (llt.info() != Eigen::Success || !(m.determinant() > 0))
    throw NumericalError("atomic quadratic form is not positive definite");
  m_inv_ = m.inverse();
  prefactor_ = std::numbers::pi / std::sqrt(m.determinant());
  a_eff_ = a - cross_ * m_inv_ * cross_.transpose();

  // C = I - M^{-1}; powers C^j and their traces feed the log-series of the
  // Laguerre generating function.
  const Mat2 c = Mat2::Identity() - m_inv_;
  c_pow_.assign(s_ + 1, Mat2::Identity());
  trace_pow_.assign(s_ + 1, 2.0);
  for (int j = 1; j <= s_; ++j) {
    c_pow_[j] = c_pow_[j - 1] * c;
    trace_pow_[j] = c_pow_[j].trace();
  }

  g0_ = g(0.0, 0.0);
}

double ConditionalField::g(double re, double im) const {
  const Vec2 beta(re, im);
  const Vec2 mean = -m_inv_ * (cross_.transpose() * beta);

  // E[L_s(|u|^2)] is the t^s coefficient of
  //   sum_s t^s E[L_s] = det(I - t C)^{-1/2} exp(-t mean^T (I - t C)^{-1} mean),
  // whose logarithm has coefficients l_n = tr(C^n) / (2n) - mean^T C^{n-1} mean.
  double log_coef[kMaxExcitations + 1];
  double coef[kMaxExcitations + 1];
  coef[0] = 1.0;
  for (int n = 1; n <= s_; ++n) log_coef[n] = trace_pow_[n] / (2.0 * n) - mean.dot(c_pow_[n - 1] * mean);
  for (int n = 1; n <= s_; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += k * log_coef[k] * coef[n - k];
    coef[n] = acc / n;
  }
  const double poly = coef[s_];
  return prefactor_ * std::exp(-beta.dot(a_eff_ * beta)) * poly;
}

double ConditionalField::operator()(double re, double im) const { return g(re, im) / g0_; }

double ConditionalField::outcome_probability() const { return g0_ / std::numbers::pi; }

double g_s_function(const Mat6& sigma, int s, Complex beta) {
  CovarianceMatrix cm;
  cm.sigma = sigma;
  return ConditionalField(cm, s, ConditionalField::Unguarded{}).g(beta.real(), beta.imag());
}

double default_half_width(const CovarianceMatrix& source) {
  const QuadratureReport q = quadrature_report(source);
  return 6.0 * std::sqrt(std::max(q.var_x, q.var_y));
}

namespace kernels {

DualGrid sample_dual(const ConditionalField& field, double half_width, int n_points, quad::Exec exec) {
  DualGrid d;
  d.half_width = half_width;
  d.n_points = n_points;
  d.step = 2.0 * half_width / (n_points - 1);
  d.zeta.resize(static_cast<std::size_t>(n_points) * n_points);
  const auto row = [&](int k) {
    const double lr = -half_width + k * d.step;
    for (int l = 0; l < n_points; ++l) d.zeta[static_cast<std::size_t>(k) * n_points + l] = field(lr, -half_width + l * d.step);
  };
  if (exec == quad::Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n_points; ++k) row(k);
  } else {
    for (int k = 0; k < n_points; ++k) row(k);
  }
  return d;
}

std::vector<double> wigner_dft(const DualGrid& dual, double half_width, int n_points, quad::Exec exec) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const int m = dual.n_points;
  const int n = n_points;
  const double dx = 2.0 * half_width / (n - 1);

  RowMat ct(n, m);
  RowMat st(n, m);
  for (int i = 0; i < n; ++i) {
    const double x = std::numbers::sqrt2 * (-half_width + i * dx);
    for (int k = 0; k < m; ++k) {
      const double phase = x * (-dual.half_width + k * dual.step);
      ct(i, k) = std::cos(phase);
      st(i, k) = std::sin(phase);
    }
  }
  const Eigen::Map<const RowMat> z(dual.zeta.data(), m, m);
  const double norm = dual.step * dual.step / (2.0 * std::numbers::pi * std::numbers::pi);

  RowMat pc(n, m);
  RowMat ps(n, m);
  std::vector<double> w(static_cast<std::size_t>(n) * n);
  Eigen::Map<RowMat> wm(w.data(), n, n);

  const auto first_pass = [&](int i) {
    pc.row(i).noalias() = ct.row(i) * z;
    ps.row(i).noalias() = st.row(i) * z;
  };
  const auto second_pass = [&](int i) {
    wm.row(i).noalias() = norm * (pc.row(i) * ct.transpose() - ps.row(i) * st.transpose());
  };
  if (exec == quad::Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) first_pass(i);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) second_pass(i);
  } else {
    for (int i = 0; i < n; ++i) first_pass(i);
    for (int i = 0; i < n; ++i) second_pass(i);
  }
  return w;
}

std::vector<double> wigner_dft_reference(const DualGrid& dual, double half_width, int n_points) {
  const int m = dual.n_points;
  const double dx = 2.0 * half_width / (n_points - 1);
  const double norm = dual.step * dual.step / (2.0 * std::numbers::pi * std::numbers::pi);
  std::vector<double> w(static_cast<std::size_t>(n_points) * n_points, 0.0);
  for (int i = 0; i < n_points; ++i) {
    const double x = -half_width + i * dx;
    for (int j = 0; j < n_points; ++j) {
      const double y = -half_width + j * dx;
      double acc = 0.0;
      for (int k = 0; k < m; ++k) {
        const double lr = -dual.half_width + k * dual.step;
        for (int l = 0; l < m; ++l) {
          const double li = -dual.half_width + l * dual.step;
          acc += dual.zeta[static_cast<std::size_t>(k) * m + l] * std::cos(std::numbers::sqrt2 * (x * lr + y * li));
        }
      }
      w[static_cast<std::size_t>(i) * n_points + j] = norm * acc;
    }
  }
  return w;
}

}  // namespace kernels

WignerGrid wigner_grid(const ConditionalField& field, double half_width, int n_points, quad::Exec exec) {
  if (!(half_width > 0)) throw DomainError("Wigner grid half_width must be > 0");
  if (n_points < 3 || n_points % 2 == 0) throw DomainError("Wigner grid n_points must be odd and >= 3");

  // Dual extent: grow until zeta has decayed on the boundary of the square.
  Eigen::SelfAdjointEigenSolver<Mat2> es(field.envelope());
  const double a_min = es.eigenvalues().minCoeff();
  if (!(a_min > 0)) throw NumericalError("conditional characteristic function does not decay");
  double lam = std::sqrt(std::log(1e14) / a_min);
  const auto boundary_max = [&field](double h) {
    double mx = 0.0;
    constexpr int kSamples = 256;
    for (int t = 0; t <= kSamples; ++t) {
      const double u = -h + 2.0 * h * t / kSamples;
      mx = std::max({mx, std::abs(field(u, h)), std::abs(field(u, -h)), std::abs(field(h, u)), std::abs(field(-h, u))});
    }
    return mx;
  };
  for (int tries = 0; boundary_max(lam) > 1e-12; ++tries) {
    if (tries > 20) throw NumericalError("characteristic function does not decay on the dual grid");
    lam *= 1.25;
  }

  // Dual spacing sets the alias period 2 pi / (sqrt2 dl); keep it >= 4 half widths.
  const double max_step = 2.0 * std::numbers::pi / (std::numbers::sqrt2 * 4.0 * half_width);
  const int half_count = static_cast<int>(std::ceil(lam / max_step));
  const int m = 2 * half_count + 1;
  if (m > 16385)
    throw DomainError("dual grid would need " + std::to_string(m) +
                      " points per axis; the Wigner half_width is too large for this state");

  const kernels::DualGrid dual = kernels::sample_dual(field, half_count * max_step, m, exec);

  WignerGrid grid;
  grid.half_width = half_width;
  grid.n_points = n_points;
  grid.dx = 2.0 * half_width / (n_points - 1);
  grid.values = kernels::wigner_dft(dual, half_width, n_points, exec);

  double sum = 0.0;
  for (double v : grid.values) sum += v;
  grid.raw_norm = sum * grid.dx * grid.dx;
  if (std::abs(grid.raw_norm - 1.0) > 1e-3)
    throw DomainError("Wigner grid does not contain the state (norm " + std::to_string(grid.raw_norm) +
                      "); use a larger half_width or more points");
  for (double& v : grid.values) v /= grid.raw_norm;
  return grid;
}

WignerGrid gaussian_wigner_grid(const Mat2& sigma_c, double half_width, int n_points) {
  if (n_points < 3 || !(half_width > 0)) throw DomainError("Wigner grid needs n_points >= 3 and half_width > 0");
  const double det = sigma_c.determinant();
  if (!(det > 0)) throw DomainError("cavity covariance block is not positive definite");
  const Mat2 inv = sigma_c.inverse();
  WignerGrid grid;
  grid.half_width = half_width;
  grid.n_points = n_points;
  grid.dx = 2.0 * half_width / (n_points - 1);
  grid.values.resize(static_cast<std::size_t>(n_points) * n_points);
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  double sum = 0.0;
  for (int i = 0; i < n_points; ++i) {
    for (int j = 0; j < n_points; ++j) {
      const Vec2 v(grid.coordinate(i), grid.coordinate(j));
      const double w = norm * std::exp(-0.5 * v.dot(inv * v));
      grid.values[static_cast<std::size_t>(i) * n_points + j] = w;
      sum += w;
    }
  }
  grid.raw_norm = sum * grid.dx * grid.dx;
  return grid;
}

Moments conditional_moments(const WignerGrid& grid) {
  const int n = grid.n_points;
  const double area = grid.dx * grid.dx;
  double sx = 0.0;
  double sy = 0.0;
  double edge = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = grid.coordinate(i);
    for (int j = 0; j < n; ++j) {
      const double y = grid.coordinate(j);
      const double w = grid.at(i, j);
      sx += x * x * w;
      sy += y * y * w;
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) edge += (x * x + y * y) * std::abs(w);
    }
  }
  Moments m{sx * area, sy * area};
  if (edge * area > 1e-6 * (m.var_x + m.var_y))
    throw DomainError("second moments not converged at the Wigner grid boundary; enlarge half_width");
  return m;
}

Moments curvature_moments(const ConditionalField& field) {
  // <X^2> = -(1/2) d^2 zeta / d lambda_r^2 at 0; five-point stencil.
  const Mat2 c = field.source().cavity_block();
  const auto second = [&field](double hx, double hy) {
    const double f1 = field(hx, hy) + field(-hx, -hy);
    const double f2 = field(2 * hx, 2 * hy) + field(-2 * hx, -2 * hy);
    return (16.0 * f1 - f2 - 30.0) / 12.0;
  };
  const double hx = 1e-2 / std::sqrt(std::max(c(0, 0), 0.5));
  const double hy = 1e-2 / std::sqrt(std::max(c(1, 1), 0.5));
  return {-0.5 * second(hx, 0.0) / (hx * hx), -0.5 * second(0.0, hy) / (hy * hy)};
}

NegativityReport negativity(const WignerGrid& grid) {
  double max_abs = 0.0;
  double min_w = std::numeric_limits<double>::infinity();
  for (double v : grid.values) {
    max_abs = std::max(max_abs, std::abs(v));
    min_w = std::min(min_w, v);
  }
  // Fourier ringing below this level is not counted as negativity.
  const double threshold = -1e-6 * max_abs;
  double neg = 0.0;
  std::size_t count = 0;
  for (double v : grid.values) {
    if (v < threshold) {
      neg += v;
      ++count;
    }
  }
  NegativityReport r;
  r.n_w = std::abs(neg) * grid.dx * grid.dx;
  r.min_w = min_w;
  r.negative_fraction = static_cast<double>(count) / static_cast<double>(grid.values.size());
  return r;
}

void write_wigner_csv(std::ostream& out, const WignerGrid& grid) {
  io::CsvWriter csv(out);
  csv.header({"X", "Y", "W"});
  for (int i = 0; i < grid.n_points; ++i)
    for (int j = 0; j < grid.n_points; ++j) csv.row({grid.coordinate(i), grid.coordinate(j), grid.at(i, j)});
}

namespace {

nlohmann::json grid_header(const WignerGrid& grid) {
  nlohmann::json j;
  j["half_width"] = grid.half_width;
  j["n_points"] = grid.n_points;
  j["dx"] = grid.dx;
  j["raw_norm"] = grid.raw_norm;
  j["layout"] = "row-major, X index slow: values[ix * n_points + iy]";
  return j;
}

}  // namespace

void write_wigner_json(std::ostream& out, const WignerGrid& grid, const ConditionalField& field) {
  nlohmann::json j = grid_header(grid);
  j["excitations"] = field.excitations();
  j["outcome_probability"] = field.outcome_probability();
  j["values"] = grid.values;
  out << j.dump() << '\n';
}

void write_wigner_json(std::ostream& out, const WignerGrid& grid) {
  nlohmann::json j = grid_header(grid);
  j["excitations"] = nullptr;
  j["values"] = grid.values;
  out << j.dump() << '\n';
}

}  // namespace hsq

#include "hsq/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "hsq/constants.hpp"
#include "hsq/errors.hpp"
#include "hsq/io.hpp"

namespace hsq {

namespace {

Vec6 noise_diagonal(const NoiseSpectrum& noise, double omega) {
  Vec6 d = noise.white.diagonal();
  d[kMechP] = noise.mechanical(omega);
  return d;
}

// Row of the output operator O_out = sqrt(2 rate) dO - O_in, with O_in = n_k / sqrt(2 rate).
Eigen::Matrix<Complex, 1, 6> output_row(const CMat6& t, int k, double rate) {
  Eigen::Matrix<Complex, 1, 6> r = std::sqrt(2.0 * rate) * t.row(k);
  r[k] -= 1.0 / std::sqrt(2.0 * rate);
  return r;
}

double weighted(const Eigen::Matrix<Complex, 1, 6>& a, const Vec6& d, const Eigen::Matrix<Complex, 1, 6>& b) {
  double acc = 0.0;
  for (int k = 0; k < 6; ++k) acc += d[k] * (a[k] * std::conj(b[k])).real();
  return acc;
}

}  // namespace

std::size_t SpectrumResult::argmin_opt() const {
  return static_cast<std::size_t>(std::min_element(s_opt.begin(), s_opt.end()) - s_opt.begin());
}

CMat6 fluctuation_transfer(const Mat6& drift, double omega) {
  const CMat6 m = Complex(0.0, -omega) * CMat6::Identity() - drift.cast<Complex>();
  Eigen::FullPivLU<CMat6> lu(m);
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw NumericalError("resolvent is singular at omega = " + std::to_string(omega), lu.rcond());
  return lu.inverse();
}

double optimal_spectrum(double s_x, double s_y, double s_xy) {
  const double num = 2.0 * s_x * s_y - 2.0 * s_xy * s_xy;
  const double den = s_x + s_y + std::sqrt((s_x - s_y) * (s_x - s_y) + 4.0 * s_xy * s_xy);
  return num / den;
}

std::vector<double> default_axis(double omega_m, int n_points, double span) {
  if (n_points < 2) throw DomainError("spectrum axis needs at least two points");
  std::vector<double> axis(n_points);
  for (int i = 0; i < n_points; ++i) axis[i] = omega_m * span * (-1.0 + 2.0 * i / (n_points - 1));
  return axis;
}

SpectralPoint output_point(const Mat6& drift, double kappa, const NoiseSpectrum& noise, double omega) {
  const CMat6 t = fluctuation_transfer(drift, omega);
  const Vec6 d = noise_diagonal(noise, omega);
  const auto rx = output_row(t, kCavX, kappa);
  const auto ry = output_row(t, kCavY, kappa);
  return {weighted(rx, d, rx), weighted(ry, d, ry), weighted(rx, d, ry)};
}

double intracavity_x_spectrum(const Mat6& drift, const NoiseSpectrum& noise, double omega) {
  const CMat6 t = fluctuation_transfer(drift, omega);
  const Eigen::Matrix<Complex, 1, 6> row = t.row(kCavX);
  return weighted(row, noise_diagonal(noise, omega), row);
}

SpectrumResult output_spectra(const PhysicalParams& params, const LinearModel& model,
                              std::span<const double> omega_axis, NoiseModel noise_model, quad::Exec exec) {
  if (!model.stability.stable)
    throw StabilityError("output spectra need a stable model", model.stability.eigenvalues);
  const NoiseSpectrum noise = NoiseSpectrum::from(params, noise_model);
  const std::size_t n = omega_axis.size();

  SpectrumResult r;
  r.omega.assign(omega_axis.begin(), omega_axis.end());
  r.s_x.resize(n);
  r.s_y.resize(n);
  r.s_xy.resize(n);
  r.s_opt.resize(n);
  r.s_opt_db.resize(n);

  const auto point = [&](std::size_t i) {
    const SpectralPoint p = output_point(model.drift, params.kappa, noise, omega_axis[i]);
    r.s_x[i] = p.s_x;
    r.s_y[i] = p.s_y;
    r.s_xy[i] = p.s_xy;
    r.s_opt[i] = optimal_spectrum(p.s_x, p.s_y, p.s_xy);
    r.s_opt_db[i] = 10.0 * std::log10(r.s_opt[i] / constants::kSql);
  };
  const long count = static_cast<long>(n);
  if (exec == quad::Exec::parallel) {
    // Per-point failures are rethrown after the loop; exceptions may not cross the region.
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) {
      try {
        point(static_cast<std::size_t>(i));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
    for (const auto& e : errors)
      if (!e.empty()) throw NumericalError(e);
  } else {
    for (long i = 0; i < count; ++i) point(static_cast<std::size_t>(i));
  }
  return r;
}

Mat6 output_mode_covariance(const PhysicalParams& params, const LinearModel& model, double omega,
                            NoiseModel noise_model) {
  if (!model.stability.stable)
    throw StabilityError("output mode needs a stable model", model.stability.eigenvalues);
  const NoiseSpectrum noise = NoiseSpectrum::from(params, noise_model);
  const CMat6 t = fluctuation_transfer(model.drift, omega);
  Eigen::Matrix<Complex, 6, 6> rows;
  rows.row(kMechQ) = std::sqrt(params.gamma_m) * t.row(kMechQ);
  rows.row(kMechP) = std::sqrt(params.gamma_m) * t.row(kMechP);
  rows.row(kCavX) = output_row(t, kCavX, params.kappa);
  rows.row(kCavY) = output_row(t, kCavY, params.kappa);
  rows.row(kAtomX) = output_row(t, kAtomX, params.gamma_a);
  rows.row(kAtomY) = output_row(t, kAtomY, params.gamma_a);
  const Vec6 d = noise_diagonal(noise, omega);
  Mat6 cm;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) cm(i, j) = weighted(rows.row(i), d, rows.row(j));
  return 0.5 * (cm + cm.transpose());
}

void write_spectrum_csv(std::ostream& out, const SpectrumResult& r) {
  io::CsvWriter csv(out);
  csv.header({"omega", "s_x", "s_y", "s_xy", "s_opt", "s_opt_db"});
  for (std::size_t i = 0; i < r.omega.size(); ++i)
    csv.row({r.omega[i], r.s_x[i], r.s_y[i], r.s_xy[i], r.s_opt[i], r.s_opt_db[i]});
}

void write_spectrum_json(std::ostream& out, const SpectrumResult& r) {
  nlohmann::json j;
  j["omega"] = r.omega;
  j["s_x"] = r.s_x;
  j["s_y"] = r.s_y;
  j["s_xy"] = r.s_xy;
  j["s_opt"] = r.s_opt;
  j["s_opt_db"] = r.s_opt_db;
  j["shot_noise"] = constants::kSql;
  out << j.dump() << '\n';
}

}  // namespace hsq

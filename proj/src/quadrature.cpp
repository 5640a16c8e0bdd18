#include "hsq/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "hsq/errors.hpp"

namespace hsq::quad {

namespace {

// Kronrod 15-point abscissae (positive half, descending) and weights; Gauss
// 7-point weights sit on the odd Kronrod nodes.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd value;
  double error = 0.0;
};

void evaluate(const VectorIntegrand& f, int dim, Panel& panel) {
  const double center = 0.5 * (panel.a + panel.b);
  const double half = 0.5 * (panel.b - panel.a);
  Eigen::VectorXd kron = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd gauss = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd fx(dim);

  f(center, fx);
  kron += kWk[7] * fx;
  gauss += kWg[3] * fx;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXk[j];
    f(center - dx, fx);
    kron += kWk[j] * fx;
    if (j % 2 == 1) gauss += kWg[j / 2] * fx;
    f(center + dx, fx);
    kron += kWk[j] * fx;
    if (j % 2 == 1) gauss += kWg[j / 2] * fx;
  }
  panel.value = half * kron;
  panel.error = std::abs(half) * (kron - gauss).norm();
}

void evaluate_batch(const VectorIntegrand& f, int dim, std::vector<Panel>& batch, Exec exec) {
  const long n = static_cast<long>(batch.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) evaluate(f, dim, batch[i]);
  } else {
    for (long i = 0; i < n; ++i) evaluate(f, dim, batch[i]);
  }
}

}  // namespace

Result integrate(const VectorIntegrand& f, int dim, std::span<const double> breakpoints, const Options& opts) {
  if (breakpoints.size() < 2) throw DomainError("integrate needs at least two breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw DomainError("integration breakpoints must be sorted");

  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] > breakpoints[i]) panels.push_back({breakpoints[i], breakpoints[i + 1], {}, 0.0});
  }
  if (panels.empty()) return {Eigen::VectorXd::Zero(dim), 0.0, 0, true};
  evaluate_batch(f, dim, panels, opts.exec);

  Result res;
  while (true) {
    res.value = Eigen::VectorXd::Zero(dim);
    res.error = 0.0;
    for (const auto& p : panels) {
      res.value += p.value;
      res.error += p.error;
    }
    res.panels = static_cast<int>(panels.size());
    const double target = std::max(opts.abs_tol, opts.rel_tol * res.value.norm());
    if (res.error <= target) {
      res.converged = true;
      return res;
    }
    if (res.panels >= opts.max_panels) return res;

    // Bisect every panel carrying more than its fair share of the error budget.
    const double share = target / static_cast<double>(panels.size());
    std::vector<Panel> next;
    std::vector<Panel> fresh;
    std::vector<std::size_t> fresh_slot;
    next.reserve(panels.size() * 2);
    for (const auto& p : panels) {
      const double mid = 0.5 * (p.a + p.b);
      if (p.error > share && mid > p.a && mid < p.b) {
        fresh_slot.push_back(next.size());
        next.push_back({p.a, mid, {}, 0.0});
        fresh_slot.push_back(next.size());
        next.push_back({mid, p.b, {}, 0.0});
      } else {
        next.push_back(p);
      }
    }
    if (fresh_slot.empty()) return res;  // no panel can be split further
    fresh.reserve(fresh_slot.size());
    for (auto s : fresh_slot) fresh.push_back(next[s]);
    evaluate_batch(f, dim, fresh, opts.exec);
    for (std::size_t i = 0; i < fresh_slot.size(); ++i) next[fresh_slot[i]] = std::move(fresh[i]);
    panels = std::move(next);
  }
}

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
  const std::array<double, 2> bp = {std::min(a, b), std::max(a, b)};
  auto r = integrate([&f](double x, Eigen::Ref<Eigen::VectorXd> out) { out[0] = f(x); }, 1, bp, opts);
  if (a > b) r.value = -r.value;
  return r;
}

}  // namespace hsq::quad

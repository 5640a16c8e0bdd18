#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for vector-valued
// integrands on a finite interval with user breakpoints.
//
// Panels flagged for refinement in one sweep are bisected together and the
// new halves evaluated as a batch; with Exec::parallel the batch is spread
// over OpenMP threads. Panels are kept in left-to-right order and summed in
// that order, so serial and parallel runs give bit-identical results.

#include <functional>
#include <span>

#include <Eigen/Core>

namespace hsq::quad {

enum class Exec { serial, parallel };

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 1 << 16;
  Exec exec = Exec::parallel;
};

struct Result {
  Eigen::VectorXd value;
  double error = 0.0;  // 2-norm of the summed Kronrod-Gauss differences
  int panels = 0;
  bool converged = false;
};

// `f(x, out)` writes the integrand at x into out (size `dim`). Must be safe
// to call concurrently.
using VectorIntegrand = std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>;

// Breakpoints must be sorted and contain at least two points; the integral
// runs from the first to the last.
Result integrate(const VectorIntegrand& f, int dim, std::span<const double> breakpoints,
                 const Options& opts = {});

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts = {});

}  // namespace hsq::quad

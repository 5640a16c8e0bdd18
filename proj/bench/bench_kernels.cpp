// Serial vs OpenMP timings of the data-parallel kernels, with the direct
// Wigner double sum as the reference point.

#include <benchmark/benchmark.h>

#include "hsq/conditional.hpp"
#include "hsq/constants.hpp"
#include "hsq/gaussian.hpp"
#include "hsq/model.hpp"
#include "hsq/runner.hpp"
#include "hsq/spectra.hpp"

using namespace hsq;

namespace {

quad::Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? quad::Exec::serial : quad::Exec::parallel;
}

// Membrane parameter set, conditioned on one atomic excitation.
PhysicalParams membrane() {
  PhysicalParams p;
  p.omega_m = constants::kTwoPi * 1e7;
  p.gamma_m = p.omega_m / 1e4;
  p.mass = 2e-16;
  p.omega_l = omega_from_wavelength(1.54e-6);
  p.power = 2.36e-3;
  p.cavity_length = 1e-3;
  p.kappa = constants::kTwoPi * 2e6;
  p.gamma_a = constants::kTwoPi * 2e5;
  p.g_n = 2e8;
  p.delta_c_tilde = 0.0;
  p.delta_a = -p.omega_m;
  p.temperature = 100.0;
  return p;
}

const ConditionalField& field() {
  static const CovarianceMatrix cm = [] {
    const LinearModel m = linearize(membrane());
    return steady_cm_lyapunov(m.drift, m.diffusion);
  }();
  static const ConditionalField f(cm, 1);
  return f;
}

void BM_WignerDft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  const double hw = 6.0 * std::sqrt(curvature_moments(field()).var_y);
  const auto dual = kernels::sample_dual(field(), hw, n, quad::Exec::serial);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::wigner_dft(dual, hw, n, exec_of(state)));
}
BENCHMARK(BM_WignerDft)->ArgsProduct({{0, 1}, {129, 513}})->Unit(benchmark::kMillisecond);

void BM_WignerDftReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double hw = 6.0 * std::sqrt(curvature_moments(field()).var_y);
  const auto dual = kernels::sample_dual(field(), hw, n, quad::Exec::serial);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::wigner_dft_reference(dual, hw, n));
}
BENCHMARK(BM_WignerDftReference)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_SampleDual(benchmark::State& state) {
  const double hw = 6.0 * std::sqrt(curvature_moments(field()).var_y);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sample_dual(field(), hw, 513, exec_of(state)));
}
BENCHMARK(BM_SampleDual)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FrequencyCm(benchmark::State& state) {
  const PhysicalParams p = membrane();
  const LinearModel m = linearize(p);
  FrequencyCmOptions o;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(steady_cm_frequency(m.drift, NoiseSpectrum::from(p), o));
}
BENCHMARK(BM_FrequencyCm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Lyapunov(benchmark::State& state) {
  const LinearModel m = linearize(membrane());
  for (auto _ : state) benchmark::DoNotOptimize(steady_cm_lyapunov(m.drift, m.diffusion));
}
BENCHMARK(BM_Lyapunov)->Unit(benchmark::kMicrosecond);

void BM_OutputSpectra(benchmark::State& state) {
  const PhysicalParams p = membrane();
  const LinearModel m = linearize(p);
  const auto axis = default_axis(p.omega_m);
  for (auto _ : state)
    benchmark::DoNotOptimize(output_spectra(p, m, axis, NoiseModel::white, exec_of(state)));
}
BENCHMARK(BM_OutputSpectra)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DetuningSweep(benchmark::State& state) {
  RunConfig c;
  c.task = Task::sweep;
  c.params = membrane();
  c.params.temperature = 0.01;
  c.axes = {SweepAxis{"delta_c_tilde", -1.0, 1.0, 20, AxisScale::linear, AxisUnit::omega_m},
            SweepAxis{"delta_a", -2.0, 0.0, 20, AxisScale::linear, AxisUnit::omega_m}};
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(c, exec_of(state)));
}
BENCHMARK(BM_DetuningSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

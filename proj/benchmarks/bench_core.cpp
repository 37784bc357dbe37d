#include "seismon/ground_motion.hpp"
#include "seismon/observer.hpp"
#include "seismon/structure.hpp"

#include <benchmark/benchmark.h>

using namespace seismon;

namespace {

BuildingModel building(int n) {
  BuildingModel m;
  m.story_mass.assign(static_cast<std::size_t>(n), 1e5);
  m.story_stiffness.assign(static_cast<std::size_t>(n), 1e8);
  m.story_height.assign(static_cast<std::size_t>(n), 3.0);
  return m;
}

GroundMotionSpec spec(double duration = 20.0) {
  GroundMotionSpec s;
  s.g0 = 0.01;
  s.omega_g = 6.0 * 3.141592653589793;
  s.xi_g = 0.35;
  s.alpha = 0.12;
  s.duration = duration;
  s.dt = 0.01;
  return s;
}

NoiseModel noise_for(const BuildingModel& model, const StructuralMatrices& mats) {
  const GroundMotionSpec s = spec();
  return make_noise_model(mats, model.ground_influence(), [s](double w) { return kanai_tajimi_psd(w, s); }, 1e-5);
}

SensorLayout every_other(int n) {
  SensorLayout layout;
  for (int k = 1; k <= n; k += 2) layout.measured_dofs.push_back(k);
  return layout;
}

void BM_Covariance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BuildingModel model = building(n);
  const StructuralMatrices mats = assemble_matrices(model);
  const NoiseModel noise = noise_for(model, mats);
  const SensorLayout layout = every_other(n);
  const FeedbackGain gain{Eigen::VectorXd::Constant(layout.size(), 1e7)};
  for (auto _ : state) benchmark::DoNotOptimize(estimation_covariance(mats, layout, gain, noise));
}
BENCHMARK(BM_Covariance)->Arg(3)->Arg(7)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_SimulateResponse(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  BuildingModel model = building(n);
  if (state.range(1)) model.hysteresis.assign(static_cast<std::size_t>(n), HysteresisLaw::bilinear(0.012, 0.1));
  const Record ground = generate_realization(spec(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_response(model, ground));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ground.size()));
}
BENCHMARK(BM_SimulateResponse)->Args({3, 0})->Args({7, 0})->Args({7, 1})->Unit(benchmark::kMillisecond);

void BM_Synthesis(benchmark::State& state) {
  const GroundMotionSpec s = spec(static_cast<double>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_realization(s, ++seed));
}
BENCHMARK(BM_Synthesis)->Arg(20)->Arg(80)->Unit(benchmark::kMicrosecond);

void BM_OptimizeGain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BuildingModel model = building(n);
  const StructuralMatrices mats = assemble_matrices(model);
  const NoiseModel noise = noise_for(model, mats);
  const SensorLayout layout = every_other(n);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_gain(mats, layout, noise, GainObjective::trace_p));
}
BENCHMARK(BM_OptimizeGain)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "dynkf/dynamics.hpp"
#include "dynkf/filter.hpp"
#include "dynkf/motion_filter.hpp"
#include "dynkf/synth.hpp"
#include "dynkf/tracker.hpp"

namespace {

using namespace dynkf;

StateEstimate start_state(MotionOrder order) {
  StateEstimate e;
  const int n = state_dim(order);
  e.mean = Vector::Zero(n);
  e.covariance = Matrix::Identity(n, n);
  return e;
}

void BM_PredictStandard(benchmark::State& state) {
  const auto order = motion_order_from_int(static_cast<int>(state.range(0)));
  const Matrix F = build_transition(order, 0.1).F;
  const Matrix Q = build_process_noise(order, 0.1, 1.0);
  const StateEstimate e = start_state(order);
  for (auto _ : state) benchmark::DoNotOptimize(predict_standard(e, F, Q));
}
BENCHMARK(BM_PredictStandard)->DenseRange(1, 3);

void BM_PredictWeighted(benchmark::State& state) {
  const auto order = motion_order_from_int(static_cast<int>(state.range(0)));
  const Matrix F = build_transition(order, 0.1).F;
  const Matrix Q = build_process_noise(order, 0.1, 1.0);
  const Matrix W = weight_matrix(WeightVector{{1.0, 0.8, 0.5, 0.2}}, order);
  const StateEstimate e = start_state(order);
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict(e, F, W, Q, CovariancePropagation::kTransition));
  }
}
BENCHMARK(BM_PredictWeighted)->DenseRange(1, 3);

void BM_Update(benchmark::State& state) {
  const auto order = MotionOrder::kJerk;
  const Matrix H = build_measurement_matrix(order);
  const Matrix R = build_measurement_noise(0.3);
  const StateEstimate e = start_state(order);
  const Vector z = Vector2(0.2, -0.1);
  for (auto _ : state) benchmark::DoNotOptimize(update(e, z, H, R));
}
BENCHMARK(BM_Update);

void BM_WeightRefresh(benchmark::State& state) {
  DynamicsWindow window(8);
  for (int i = 0; i < 8; ++i) window.push(Vector2(0.1 * i * i, 0.3 * i));
  const DynamicsFactors factors;
  for (auto _ : state) {
    const auto d = dynamics_vector(window);
    benchmark::DoNotOptimize(update_weights((*d)[0], factors));
    benchmark::DoNotOptimize(update_weights((*d)[1], factors));
  }
}
BENCHMARK(BM_WeightRefresh);

SequenceDataset crowd(int objects, int frames) {
  ScenarioSpec spec;
  spec.seed = 3;
  for (int i = 0; i < objects; ++i) {
    ObjectSpec o;
    o.initial.position = Vector2(0.0, 6.0 * i);
    o.initial.velocity = Vector2(3.0 + 0.2 * i, 0.0);
    o.segments = {{RegimeKind::kConstantVelocity, frames, Vector2(3.0 + 0.2 * i, 0.0)}};
    spec.objects.push_back(o);
  }
  return generate(spec).dataset;
}

void BM_TrackerSequence(benchmark::State& state) {
  const SequenceDataset ds = crowd(20, 200);
  TrackerConfig cfg;
  cfg.filter.variant = state.range(0) ? FilterVariant::kDynamic : FilterVariant::kBaseline;
  for (auto _ : state) benchmark::DoNotOptimize(run_tracker(ds, cfg));
  state.SetItemsProcessed(state.iterations() * ds.frame_count());
  state.SetLabel(state.range(0) ? "dynamic" : "baseline");
}
BENCHMARK(BM_TrackerSequence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <jumplab/operators.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace jumplab;

namespace {

std::vector<Vec> points(int dim, int count) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v[k] = g(rng);
    out.push_back(v);
  }
  return out;
}

std::shared_ptr<const RectifiableSet> shared(RectifiableSet s) {
  return std::make_shared<const RectifiableSet>(std::move(s));
}

void BM_KernelEvaluate(benchmark::State& state, Kernel k) {
  const auto xs = points(k.ambient_dim(), 1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.evaluate(xs[i++ & 1023]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_KernelEvaluate, riesz1, make_riesz(1));
BENCHMARK_CAPTURE(BM_KernelEvaluate, riesz2, make_riesz(2));
BENCHMARK_CAPTURE(BM_KernelEvaluate, cauchy5, make_cauchy_power(5));

void BM_CircleExclusionArea(benchmark::State& state) {
  const RectifiableSet c = make_circle(make_vec({0, 0}), 1.0);
  const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  auto one = [](int, const Param&, const Vec&) { return make_vec({1.0}); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_measure(c, 1, one, Region::outside_ball(make_vec({1, 0}), eps)));
  }
}
BENCHMARK(BM_CircleExclusionArea)->DenseRange(1, 7, 3);

void BM_SphereExclusionArea(benchmark::State& state) {
  const RectifiableSet s = make_sphere(make_vec({0, 0, 0}), 1.0);
  const Vec x = s.point(0, make_param({1.1, 2.3}));
  const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  auto one = [](int, const Param&, const Vec&) { return make_vec({1.0}); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_measure(s, 1, one, Region::outside_ball(x, eps)));
  }
}
BENCHMARK(BM_SphereExclusionArea)->DenseRange(1, 3, 2)->Unit(benchmark::kMillisecond);

void BM_TruncatedTransformCircle(benchmark::State& state) {
  const auto c = shared(make_circle(make_vec({0, 0}), 1.0));
  const RadonMeasure m(c, Density::trig(0, 1.0, {0.3}, {}));
  const Transform op(make_riesz(1));
  const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  const Vec x = make_vec({std::cos(0.7), std::sin(0.7)});
  for (auto _ : state) benchmark::DoNotOptimize(truncated_transform(op, m, x, eps));
}
BENCHMARK(BM_TruncatedTransformCircle)->DenseRange(1, 7, 2);

void BM_DoubleLayerSphere(benchmark::State& state) {
  const auto s = shared(make_sphere(make_vec({0, 0, 0}), 1.0));
  const RadonMeasure m(s, Density::constant(1.0));
  const Transform op = Transform::double_layer(2);
  const Vec x = s->point(0, make_param({1.1, 2.3}));
  const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(truncated_transform(op, m, x, eps));
}
BENCHMARK(BM_DoubleLayerSphere)->DenseRange(1, 3, 2)->Unit(benchmark::kMillisecond);

void BM_JumpConstantNumeric(benchmark::State& state, Kernel k, Vec N) {
  for (auto _ : state) benchmark::DoNotOptimize(jump_constant_numeric(k, N));
}
BENCHMARK_CAPTURE(BM_JumpConstantNumeric, riesz1, make_riesz(1), make_vec({0.6, 0.8}))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_JumpConstantNumeric, riesz2, make_riesz(2), make_vec({0, 0.6, 0.8}))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_JumpConstantNumeric, cauchy3, make_cauchy_power(3), make_vec({0.6, 0.8}))
    ->Unit(benchmark::kMillisecond);

void BM_JumpResidualsCircle(benchmark::State& state) {
  const auto c = shared(make_circle(make_vec({0, 0}), 1.0));
  const RadonMeasure m(c, Density::constant(1.0));
  const Transform op(make_riesz(1));
  const SurfacePoint x = c->surface_point(0, make_param({0.7}));
  ExtrapolationConfig cfg;
  cfg.eps0 = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(jump_residuals(op, m, x, 0.5, 0.25, cfg));
}
BENCHMARK(BM_JumpResidualsCircle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

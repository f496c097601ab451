#include <benchmark/benchmark.h>

#include "itmcmc/diagnostics.hpp"
#include "itmcmc/samplers.hpp"
#include "itmcmc/toy.hpp"

using namespace itmcmc;

namespace {

void BM_rwm_step(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto target = make_standard_gaussian(d);
  const Eigen::MatrixXd cov =
      (2.38 * 2.38 / d) * Eigen::MatrixXd::Identity(d, d);
  RngStream rng(1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  for (auto _ : state) {
    auto r = rwm_step(x, cov, target, rng);
    x = std::move(r.state);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_rwm_step)->Arg(1)->Arg(2)->Arg(10);

void BM_am_update(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RngStream rng(2);
  AdaptiveState s = AdaptiveState::initial_zero(d, 0.1);
  for (auto _ : state) {
    s = am_update(s, rng.normal_vector(d));
    benchmark::DoNotOptimize(s.cov);
  }
}
BENCHMARK(BM_am_update)->Arg(2)->Arg(10);

void BM_run_am_step_throughput(benchmark::State& state) {
  const auto target = make_standard_gaussian(2);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(++seed);
    auto t = run_am(target, Eigen::VectorXd::Zero(2),
                    Eigen::MatrixXd::Zero(2, 2), 0.05, 2000, rng);
    benchmark::DoNotOptimize(t.states.back());
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_run_am_step_throughput);

void BM_it_step(benchmark::State& state) {
  const auto target = make_gaussian_mixture(1, 5.0, 1.0);
  const TemperedDensity level(target, 1.0);
  const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(1, 1);
  EmpiricalMeasure hist;
  RngStream hist_rng(3);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd v(1);
    v << 5.0 * hist_rng.normal();
    hist.append(v);
  }
  RngStream rng(4);
  Eigen::VectorXd x(1);
  x << 5.0;
  const double beta = 1.0 - 1.0 / 8.0;
  for (auto _ : state) {
    auto r = it_step(x, hist, cov, level, beta, 0.3, rng);
    x = std::move(r.state);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_it_step);

void BM_toy_exact_marginal(benchmark::State& state) {
  const auto sched = ToySchedule::default_schedule();
  const long long n = state.range(0);
  for (auto _ : state) {
    auto p = toy_exact_marginal(sched, {1.0, 0.0}, n);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_toy_exact_marginal)->Arg(1000)->Arg(10000);

void BM_empirical_tv_prefixes(benchmark::State& state) {
  const std::size_t len = static_cast<std::size_t>(state.range(0));
  EmpiricalMeasure m;
  RngStream rng(5);
  Eigen::VectorXd cur(1);
  cur << 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (rng.uniform01() < 0.5) cur[0] = rng.normal();
    m.append(cur);
  }
  for (auto _ : state) {
    const double tv = m.tv_between_prefixes(len / 2, len);
    benchmark::DoNotOptimize(tv);
  }
}
BENCHMARK(BM_empirical_tv_prefixes)->Arg(1000)->Arg(10000);

void BM_brute_force_it_kernel(benchmark::State& state) {
  RngStream rng(6);
  const auto inst = make_random_it_instance(5, 4.0, 0.3, rng);
  const double beta = 1.0 - 1.0 / inst.temperature;
  for (auto _ : state) {
    auto k = brute_force_it_kernel(inst.pi, inst.theta_star, inst.p_local,
                                   inst.upsilon, beta);
    benchmark::DoNotOptimize(k.matrix);
  }
}
BENCHMARK(BM_brute_force_it_kernel);

}  // namespace

BENCHMARK_MAIN();

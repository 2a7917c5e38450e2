#include <benchmark/benchmark.h>

#include "dpmix/distributions.hpp"
#include "dpmix/dp.hpp"
#include "dpmix/hdp.hpp"
#include "dpmix/measure.hpp"

using namespace dpmix;

namespace {

Eigen::MatrixXd bimodal_data(int n, std::uint64_t seed) {
  RandomSource rng(seed);
  Eigen::MatrixXd y(n, 1);
  for (int i = 0; i < n; ++i) {
    y(i, 0) = (i % 2 == 0 ? -2.0 : 2.0) + rng.normal();
  }
  return y;
}

Eigen::MatrixXd beta_data(int n, std::uint64_t seed) {
  RandomSource rng(seed);
  Eigen::MatrixXd y(n, 1);
  for (int i = 0; i < n; ++i) {
    DistSpec spec = i % 2 == 0 ? DistSpec::beta(2.0, 8.0) : DistSpec::beta(8.0, 2.0);
    y(i, 0) = sample(spec, rng);
  }
  return y;
}

void BM_FitConjugate(benchmark::State& bench) {
  Eigen::MatrixXd y = bimodal_data(static_cast<int>(bench.range(0)), 1);
  for (auto _ : bench) {
    DpState state = initialise(y, default_mixing("normal"), AlphaPrior{}, 3,
                               RandomSource(2));
    FitOptions opts;
    opts.iterations = 50;
    opts.store_samples = false;
    fit(state, opts);
    benchmark::DoNotOptimize(state.alpha);
  }
  bench.SetItemsProcessed(bench.iterations() * bench.range(0) * 50);
}
BENCHMARK(BM_FitConjugate)->Arg(50)->Arg(200)->Arg(1000);

void BM_FitNonConjugate(benchmark::State& bench) {
  Eigen::MatrixXd y = beta_data(static_cast<int>(bench.range(0)), 3);
  for (auto _ : bench) {
    DpState state = initialise(y, default_mixing("beta", 1, 1.0), AlphaPrior{}, 3,
                               RandomSource(4));
    FitOptions opts;
    opts.iterations = 50;
    opts.store_samples = false;
    fit(state, opts);
    benchmark::DoNotOptimize(state.alpha);
  }
  bench.SetItemsProcessed(bench.iterations() * bench.range(0) * 50);
}
BENCHMARK(BM_FitNonConjugate)->Arg(50)->Arg(200);

void BM_PosteriorSummary(benchmark::State& bench) {
  Eigen::MatrixXd y = bimodal_data(200, 5);
  DpState state = initialise(y, default_mixing("normal"), AlphaPrior{}, 3,
                             RandomSource(6));
  FitOptions opts;
  opts.iterations = 500;
  fit(state, opts);
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(-4.0 + 0.04 * i);
  for (auto _ : bench) {
    PosteriorSummaryTable table = posterior_summary(state, grid, 100, 1, 0.95);
    benchmark::DoNotOptimize(table.mean.data());
  }
}
BENCHMARK(BM_PosteriorSummary);

void BM_HdpFit(benchmark::State& bench) {
  std::vector<Eigen::MatrixXd> groups{bimodal_data(100, 7), bimodal_data(100, 8)};
  for (auto _ : bench) {
    HdpState state = hdp_initialise(groups, default_mixing("normal"), AlphaPrior{},
                                    AlphaPrior{}, RandomSource(9));
    hdp_fit(state, 50);
    benchmark::DoNotOptimize(state.gamma);
  }
}
BENCHMARK(BM_HdpFit);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "robustmom/blocking.hpp"
#include "robustmom/covariance.hpp"
#include "robustmom/depth.hpp"
#include "robustmom/mean.hpp"
#include "robustmom/types.hpp"

using namespace robustmom;

namespace {

Dataset gaussian_data(Index n, Index d, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = rng.normal();
  return Dataset::make(std::move(m));
}

void BM_partition_block_means(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const Dataset data = gaussian_data(n, 4, 1);
  for (auto _ : state) {
    const BlockMeans bm = block_means(data, partition(n, 64, RngStream(2)));
    benchmark::DoNotOptimize(bm.means.front());
  }
}
BENCHMARK(BM_partition_block_means)->Arg(2000)->Arg(20000);

void BM_mom_objective(benchmark::State& state) {
  const auto pool_size = static_cast<Index>(state.range(0));
  const Dataset data = gaussian_data(2000, 4, 3);
  const DirectionPool pool = make_direction_pool(4, pool_size, nullptr, RngStream(4));
  const BlockMeans bm = block_means(data, partition(2000, 64, RngStream(5)));
  const Vector y = Vector::Zero(4);
  for (auto _ : state) benchmark::DoNotOptimize(mom_objective(y, bm, pool));
}
BENCHMARK(BM_mom_objective)->Arg(64)->Arg(512);

void BM_lm_mom_estimate(benchmark::State& state) {
  const Dataset data = gaussian_data(2000, 2, 6);
  const DirectionPool pool = make_direction_pool(2, 500, nullptr, RngStream(7));
  for (auto _ : state) {
    const MeanEstimate est = lm_mom_estimate(data, 64, pool, {}, RngStream(8));
    benchmark::DoNotOptimize(est.achieved_eps);
  }
}
BENCHMARK(BM_lm_mom_estimate);

void BM_depth_exact_2d(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const Dataset data = gaussian_data(n, 2, 9);
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pts.push_back(data.values.row(i).transpose());
  const Vector eta = Vector::Zero(2);
  for (auto _ : state) benchmark::DoNotOptimize(depth_exact_2d(pts, eta).depth);
}
BENCHMARK(BM_depth_exact_2d)->Arg(64)->Arg(1000);

void BM_tukey_mom_2d(benchmark::State& state) {
  const Dataset data = gaussian_data(2000, 2, 10);
  for (auto _ : state) {
    const TukeyMomEstimate est = tukey_mom(data, 64, RngStream(11));
    benchmark::DoNotOptimize(est.depth);
  }
}
BENCHMARK(BM_tukey_mom_2d);

void BM_cov_mom_estimate(benchmark::State& state) {
  const Dataset data = gaussian_data(4000, 2, 12);
  const DirectionPool pool = make_direction_pool(2, 500, nullptr, RngStream(13));
  for (auto _ : state) {
    const CovEstimate est = cov_mom_estimate(data, 50, pool, {}, RngStream(14));
    benchmark::DoNotOptimize(est.achieved_eps);
  }
}
BENCHMARK(BM_cov_mom_estimate);

}  // namespace

BENCHMARK_MAIN();

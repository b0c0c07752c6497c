#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "bmrisk/classifier.hpp"
#include "bmrisk/features.hpp"
#include "bmrisk/rng.hpp"
#include "bmrisk/selection.hpp"
#include "bmrisk/wavelet.hpp"

using namespace bmrisk;

namespace {

VolumeImage noise_volume(std::size_t side, std::uint64_t seed) {
  Rng rng(seed);
  GridSize dims{side, side, side};
  std::vector<double> v(dims.voxel_count());
  for (auto& x : v) x = rng.normal(100, 20);
  return VolumeImage(dims, {1, 1, 1}, v);
}

RoiMask ball(std::size_t side) {
  GridSize dims{side, side, side};
  std::vector<std::uint8_t> m(dims.voxel_count());
  const double c = (static_cast<double>(side) - 1) / 2, r = static_cast<double>(side) / 3;
  std::size_t i = 0;
  for (std::size_t z = 0; z < side; ++z)
    for (std::size_t y = 0; y < side; ++y)
      for (std::size_t x = 0; x < side; ++x, ++i)
        m[i] = std::hypot(x - c, y - c, z - c) <= r;
  return RoiMask(dims, m);
}

FeatureMatrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed, std::vector<double>& y) {
  Rng rng(seed);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  y.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.uniform() < 0.3;
    for (std::size_t j = 0; j < p; ++j) rows[i][j] = rng.normal() + (j % 10 == 0 ? y[i] : 0);
  }
  return FeatureMatrix::from_rows(names, rows);
}

void BM_TextureFamily(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto roi = discretize(noise_volume(side, 1), ball(side), 32);
  const auto family = static_cast<TextureFamily>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(texture_features(roi, family));
}
BENCHMARK(BM_TextureFamily)->ArgsProduct({{16, 32}, {0, 1, 2, 3}})->Unit(benchmark::kMillisecond);

void BM_ExtractAll(benchmark::State& state) {
  const auto img = noise_volume(24, 2);
  const auto mask = ball(24);
  const ExtractionConfig cfg{32, state.range(0) ? "haar" : "none"};
  for (auto _ : state) benchmark::DoNotOptimize(extract_all(img, mask, cfg));
}
BENCHMARK(BM_ExtractAll)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const auto img = noise_volume(static_cast<std::size_t>(state.range(0)), 3);
  const auto bank = state.range(1) ? WaveletBank::coif1() : WaveletBank::haar();
  for (auto _ : state) benchmark::DoNotOptimize(decompose(img, bank));
}
BENCHMARK(BM_Decompose)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Mrmr(benchmark::State& state) {
  std::vector<double> y;
  const auto x = random_matrix(300, static_cast<std::size_t>(state.range(0)), 4, y);
  for (auto _ : state) benchmark::DoNotOptimize(mrmr_select(x, y, 30));
}
BENCHMARK(BM_Mrmr)->Arg(400)->Arg(3092)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  std::vector<double> y;
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 30, 5, y);
  const std::vector<int> labels(y.begin(), y.end());
  const ClassifierConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit(x, labels, cfg));
}
BENCHMARK(BM_Fit)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

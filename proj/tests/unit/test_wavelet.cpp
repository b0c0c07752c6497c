#include <cmath>

#include "bmrisk/error.hpp"
#include "bmrisk/rng.hpp"
#include "bmrisk/wavelet.hpp"
#include "doctest.h"
#include "oracles/wavelet_oracle.hpp"

using namespace bmrisk;

namespace {

VolumeImage random_volume(Rng& rng, GridSize dims) {
  std::vector<double> v(dims.voxel_count());
  for (auto& x : v) x = rng.normal(0, 10);
  return VolumeImage(dims, {1, 1, 1}, std::move(v));
}

double energy(std::span<const double> v) {
  double e = 0;
  for (double x : v) e += x * x;
  return e;
}

const std::vector<double>& pick(const WaveletBank& b, char c) { return c == 'L' ? b.low : b.high; }

}  // namespace

TEST_CASE("filter banks are orthonormal quadrature pairs") {
  for (const auto& bank : {WaveletBank::haar(), WaveletBank::coif1()}) {
    const std::size_t n = bank.low.size();
    REQUIRE(bank.high.size() == n);
    double lo_sum = 0, lo_sq = 0, hi_sum = 0;
    for (std::size_t k = 0; k < n; ++k) {
      lo_sum += bank.low[k];
      lo_sq += bank.low[k] * bank.low[k];
      hi_sum += bank.high[k];
      CHECK(bank.high[k] == doctest::Approx((k % 2 ? -1.0 : 1.0) * bank.low[n - 1 - k]));
    }
    CHECK(lo_sum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(lo_sq == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::fabs(hi_sum) < 1e-14);
    // even shifts of the low-pass are orthogonal
    for (std::size_t s = 2; s < n; s += 2) {
      double dot = 0;
      for (std::size_t k = 0; k + s < n; ++k) dot += bank.low[k] * bank.low[k + s];
      CHECK(std::fabs(dot) < 1e-14);
    }
  }
  CHECK(WaveletBank::from_name("coif1").low.size() == 6);
  CHECK_THROWS_AS(WaveletBank::from_name("db4"), ConfigError);
}

TEST_CASE("coif1 matches the published decomposition low-pass") {
  const double expected[6] = {-0.01565572813546454, -0.0727326195128539, 0.38486484686420286,
                              0.8525720202122554,   0.3378976624578092,  -0.0727326195128539};
  const auto bank = WaveletBank::coif1();
  for (std::size_t k = 0; k < 6; ++k) CHECK(std::fabs(bank.low[k] - expected[k]) < 1e-11);  // tabulated to ~12 digits
}

TEST_CASE("constant volume: only LLL carries signal") {
  const VolumeImage img({4, 3, 5}, {1, 1, 1}, std::vector<double>(60, 7.0));
  for (const auto& bank : {WaveletBank::haar(), WaveletBank::coif1()}) {
    const auto bands = decompose(img, bank);
    REQUIRE(bands.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(bands.bands()[i].first == kSubbandLabels[i]);
      for (double v : bands.bands()[i].second.voxels()) {
        if (i == 0) CHECK(v == doctest::Approx(7.0 * 2.0 * std::sqrt(2.0)));
        else CHECK(std::fabs(v) < 1e-12);
      }
    }
  }
}

TEST_CASE("haar on a 2x1x1 volume") {
  const double a = 3.0, b = -1.5;
  const VolumeImage img({2, 1, 1}, {1, 1, 1}, {a, b});
  const auto bands = decompose(img, WaveletBank::haar());
  const double r2 = std::sqrt(2.0);
  // length-1 axes: L multiplies by sqrt2, H gives 0
  for (double v : bands.at("LLL").voxels()) CHECK(v == doctest::Approx(r2 * (a + b)));
  for (double v : bands.at("HLL").voxels()) CHECK(std::fabs(v) == doctest::Approx(r2 * std::fabs(a - b)));
  for (const char* label : {"LLH", "LHL", "LHH", "HLH", "HHL", "HHH"})
    for (double v : bands.at(label).voxels()) CHECK(std::fabs(v) < 1e-15);
}

TEST_CASE("subbands match the direct triple-sum convolution") {
  Rng rng(7);
  for (const auto& bank : {WaveletBank::haar(), WaveletBank::coif1()}) {
    for (int trial = 0; trial < 3; ++trial) {
      const GridSize dims{1 + rng.below(7), 1 + rng.below(7), 1 + rng.below(7)};
      const auto img = random_volume(rng, dims);
      const auto bands = decompose(img, bank);
      for (const auto& [label, band] : bands.bands()) {
        const auto expected = oracle::direct_subband(img, pick(bank, label[0]), pick(bank, label[1]), pick(bank, label[2]));
        double worst = 0;
        for (std::size_t i = 0; i < expected.size(); ++i) worst = std::max(worst, std::fabs(expected[i] - band.voxels()[i]));
        CHECK(worst < 1e-10);
      }
    }
  }
}

TEST_CASE("energy, reconstruction, linearity and shift equivariance") {
  Rng rng(31);
  for (const auto& bank : {WaveletBank::haar(), WaveletBank::coif1()}) {
    for (int trial = 0; trial < 5; ++trial) {
      const GridSize dims{2 + rng.below(8), 2 + rng.below(8), 1 + rng.below(6)};
      const auto x = random_volume(rng, dims);
      const auto y = random_volume(rng, dims);
      const auto bx = decompose(x, bank);

      double total = 0;
      for (const auto& [label, band] : bx.bands()) total += energy(band.voxels());
      CHECK(total == doctest::Approx(8.0 * energy(x.voxels())).epsilon(1e-10));

      const auto back = reconstruct(bx, bank);
      double worst = 0;
      for (std::size_t i = 0; i < x.voxels().size(); ++i) worst = std::max(worst, std::fabs(back.voxels()[i] - x.voxels()[i]));
      CHECK(worst < 1e-10);

      const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
      std::vector<double> combo(x.voxels().size());
      for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * x.voxels()[i] + b * y.voxels()[i];
      const auto bc = decompose(x.with_voxels(combo), bank);
      const auto by = decompose(y, bank);
      worst = 0;
      for (std::size_t s = 0; s < 8; ++s)
        for (std::size_t i = 0; i < combo.size(); ++i)
          worst = std::max(worst, std::fabs(bc.bands()[s].second.voxels()[i] -
                                            (a * bx.bands()[s].second.voxels()[i] + b * by.bands()[s].second.voxels()[i])));
      CHECK(worst < 1e-9);

      // circular shift by (1, 2, 1)
      std::vector<double> shifted(combo.size());
      auto idx = [&](std::size_t i, std::size_t j, std::size_t k) { return x.index(i % dims.nx, j % dims.ny, k % dims.nz); };
      for (std::size_t k = 0; k < dims.nz; ++k)
        for (std::size_t j = 0; j < dims.ny; ++j)
          for (std::size_t i = 0; i < dims.nx; ++i) shifted[idx(i + 1, j + 2, k + 1)] = x.at(i, j, k);
      const auto bs = decompose(x.with_voxels(shifted), bank);
      bool exact = true;
      for (std::size_t s = 0; s < 8; ++s)
        for (std::size_t k = 0; k < dims.nz; ++k)
          for (std::size_t j = 0; j < dims.ny; ++j)
            for (std::size_t i = 0; i < dims.nx; ++i)
              exact = exact && bs.bands()[s].second.voxels()[idx(i + 1, j + 2, k + 1)] == bx.bands()[s].second.at(i, j, k);
      CHECK(exact);
    }
  }
}

TEST_CASE("subband set validation") {
  const VolumeImage img({2, 2, 2}, {1, 1, 1}, std::vector<double>(8, 1.0));
  std::vector<std::pair<std::string, VolumeImage>> few = {{"LLL", img}};
  CHECK_THROWS(SubbandSet(few));
  const auto set = decompose(img, WaveletBank::haar());
  CHECK_THROWS(set.at("XYZ"));
}

TEST_CASE("degenerate reconstructions") {
  for (const auto& bank : {WaveletBank::haar(), WaveletBank::coif1()}) {
    const VolumeImage zero({3, 4, 2}, {1, 1, 1}, std::vector<double>(24, 0.0));
    const auto back = reconstruct(decompose(zero, bank), bank);
    for (double v : back.voxels()) CHECK(v == 0.0);
    const VolumeImage one({1, 1, 1}, {1, 1, 1}, {3.25});
    const auto same = reconstruct(decompose(one, bank), bank);
    CHECK(same.voxels()[0] == doctest::Approx(3.25).epsilon(1e-14));
  }
}

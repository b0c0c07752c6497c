#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "bmrisk/error.hpp"
#include "bmrisk/rng.hpp"
#include "bmrisk/volume_io.hpp"
#include "doctest.h"
#include "oracles/nifti_oracle.hpp"
#include "oracles/temp_dir.hpp"

using namespace bmrisk;

namespace {

VolumeImage random_volume(Rng& rng, GridSize dims, bool float_exact) {
  std::vector<double> v(dims.voxel_count());
  for (auto& x : v) {
    x = rng.normal(10.0, 5.0);
    if (float_exact) x = static_cast<double>(static_cast<float>(x));
  }
  return VolumeImage(dims, {0.5, 0.75, 2.0}, std::move(v), Modality::CT);
}

bool bit_identical(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("VolumeImage validates its invariants") {
  CHECK_THROWS_AS(VolumeImage({2, 2, 1}, {1, 1, 1}, {1, 2, 3}), DataError);
  CHECK_THROWS_AS(VolumeImage({0, 2, 1}, {1, 1, 1}, {}), DataError);
  CHECK_THROWS_AS(VolumeImage({1, 1, 1}, {1, 0, 1}, {1}), DataError);
  CHECK_THROWS_AS(VolumeImage({1, 1, 1}, {1, 1, 1}, {std::numeric_limits<double>::quiet_NaN()}), DataError);
  const VolumeImage ok({2, 1, 1}, {1, 1, 1}, {1, 2});
  CHECK(ok.at(1, 0, 0) == 2.0);
}

TEST_CASE("RAWJSON reads a hand-written 2x2x1 volume in x-fastest order") {
  testutil::TempDir dir;
  {
    std::ofstream h(dir / "v.json");
    h << R"({"dims":[2,2,1],"spacing":[1,1,1],"dtype":"f32","data_file":"v.raw"})";
    std::ofstream r(dir / "v.raw", std::ios::binary);
    const float data[4] = {0.f, 1.f, 2.f, 3.f};
    r.write(reinterpret_cast<const char*>(data), sizeof(data));
  }
  const auto img = read_volume(dir / "v.json", VolumeFormat::RawJson);
  CHECK(img.dims() == GridSize{2, 2, 1});
  REQUIRE(img.voxels().size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(img.voxels()[i] == static_cast<double>(i));
  CHECK(img.at(1, 1, 0) == 3.0);
}

TEST_CASE("write/read round trips are lossless") {
  testutil::TempDir dir;
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const GridSize dims{1 + rng.below(6), 1 + rng.below(6), 1 + rng.below(4)};
    const auto img = random_volume(rng, dims, true);
    write_volume(img, dir / "a.json", VolumeFormat::RawJson);
    const auto back = read_volume(dir / "a.json", VolumeFormat::RawJson);
    CHECK(bit_identical(img.voxels(), back.voxels()));
    CHECK(back.spacing() == img.spacing());
    CHECK(back.modality() == Modality::CT);

    write_volume(img, dir / "a.nii", VolumeFormat::Nifti1);
    const auto nback = read_volume(dir / "a.nii", VolumeFormat::Nifti1);
    CHECK(bit_identical(img.voxels(), nback.voxels()));
    CHECK(nback.dims() == dims);
    CHECK(nback.modality() == Modality::CT);

    const auto wide = random_volume(rng, dims, false);
    write_volume(wide, dir / "w.json", VolumeFormat::RawJson, RawDType::F64);
    CHECK(bit_identical(wide.voxels(), read_volume(dir / "w.json", VolumeFormat::RawJson).voxels()));
  }
}

TEST_CASE("minimal NIfTI-1 from an independent header writer") {
  testutil::TempDir dir;
  auto h = oracle::make_header(4, 4, 2, 2.f, 2.f, 2.f, 16, 32);
  std::vector<float> data(32);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(i) * 0.5f - 3.f;
  oracle::write_nifti(dir / "f.nii", h, data);

  const auto img = read_volume(dir / "f.nii", VolumeFormat::Nifti1);
  CHECK(img.dims() == GridSize{4, 4, 2});
  CHECK(img.spacing() == Spacing{2.0, 2.0, 2.0});
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(img.voxels()[i] == static_cast<double>(data[i]));

  SUBCASE("int16 payload with intensity scaling") {
    auto hi = oracle::make_header(2, 2, 1, 1.f, 1.f, 3.f, 4, 16);
    hi.scl_slope = 2.0f;
    hi.scl_inter = -1.0f;
    oracle::write_nifti(dir / "i.nii", hi, std::vector<std::int16_t>{1, 2, -3, 100});
    const auto iv = read_volume(dir / "i.nii", VolumeFormat::Nifti1);
    CHECK(iv.voxels()[0] == 1.0);
    CHECK(iv.voxels()[2] == -7.0);
    CHECK(iv.voxels()[3] == 199.0);
    CHECK(iv.spacing()[2] == 3.0);
  }
  SUBCASE("rejections") {
    auto bad = h;
    std::memcpy(bad.magic, "ni1\0", 4);
    oracle::write_nifti(dir / "m.nii", bad, data);
    CHECK_THROWS_AS(read_volume(dir / "m.nii", VolumeFormat::Nifti1), DataError);

    auto f64 = oracle::make_header(4, 4, 2, 1.f, 1.f, 1.f, 64, 64);
    oracle::write_nifti(dir / "d.nii", f64, std::vector<double>(32, 1.0));
    CHECK_THROWS_AS(read_volume(dir / "d.nii", VolumeFormat::Nifti1), DataError);

    auto nan = data;
    nan[5] = std::numeric_limits<float>::quiet_NaN();
    oracle::write_nifti(dir / "n.nii", h, nan);
    CHECK_THROWS_AS(read_volume(dir / "n.nii", VolumeFormat::Nifti1), DataError);

    auto low_offset = h;
    low_offset.vox_offset = 348.f;
    oracle::write_nifti(dir / "o.nii", low_offset, data);
    CHECK_THROWS_AS(read_volume(dir / "o.nii", VolumeFormat::Nifti1), DataError);
  }
}

TEST_CASE("RAWJSON error paths") {
  testutil::TempDir dir;
  {
    std::ofstream(dir / "bad.json") << "{ not json";
    std::ofstream(dir / "short.json") << R"({"dims":[2,2,2],"spacing":[1,1,1],"dtype":"f32","data_file":"short.raw"})";
    std::ofstream(dir / "short.raw", std::ios::binary) << "abcd";
    std::ofstream(dir / "type.json") << R"({"dims":[1,1,1],"spacing":[1,1,1],"dtype":"i8","data_file":"short.raw"})";
  }
  CHECK_THROWS_AS(read_volume(dir / "bad.json", VolumeFormat::RawJson), DataError);
  CHECK_THROWS_AS(read_volume(dir / "short.json", VolumeFormat::RawJson), DataError);
  CHECK_THROWS_AS(read_volume(dir / "type.json", VolumeFormat::RawJson), DataError);
  CHECK_THROWS_AS(read_volume(dir / "missing.json", VolumeFormat::RawJson), DataError);
}

TEST_CASE("masks round trip through both formats") {
  testutil::TempDir dir;
  const RoiMask mask({3, 2, 2}, {0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1});
  for (auto fmt : {VolumeFormat::RawJson, VolumeFormat::Nifti1}) {
    const auto path = dir / (fmt == VolumeFormat::RawJson ? "m.json" : "m.nii");
    write_mask(mask, {1, 1, 1}, path, fmt);
    const auto back = read_mask(path, fmt);
    CHECK(back.dims() == mask.dims());
    CHECK(std::equal(back.voxels().begin(), back.voxels().end(), mask.voxels().begin()));
    CHECK(back.foreground_count() == 6);
  }
  CHECK(guess_volume_format("x/y.nii") == VolumeFormat::Nifti1);
  CHECK(guess_volume_format("x/y.json") == VolumeFormat::RawJson);
  CHECK_THROWS_AS(guess_volume_format("x/y.nii.gz"), ConfigError);
}

#include "bmrisk/volume_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "bmrisk/error.hpp"
#include "json.hpp"

namespace bmrisk {

static_assert(std::endian::native == std::endian::little, "bmrisk I/O assumes a little-endian host");

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(VolumeFormat f) { return f == VolumeFormat::RawJson ? "rawjson" : "nifti1"; }

VolumeFormat volume_format_from_string(std::string_view s) {
  if (s == "rawjson" || s == "RAWJSON") return VolumeFormat::RawJson;
  if (s == "nifti1" || s == "nifti" || s == "NIFTI1_MINIMAL") return VolumeFormat::Nifti1;
  throw ConfigError("unknown volume format '" + std::string(s) + "'");
}

VolumeFormat guess_volume_format(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json") return VolumeFormat::RawJson;
  if (ext == ".nii") return VolumeFormat::Nifti1;
  throw ConfigError("cannot infer volume format from '" + path.string() + "'");
}

namespace {

std::vector<char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw DataError("short write to '" + path.string() + "'");
}

template <typename T>
T load(const std::vector<char>& buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof(T));
  return v;
}

template <typename T>
void store(std::vector<char>& buf, std::size_t offset, T v) {
  std::memcpy(buf.data() + offset, &v, sizeof(T));
}

struct RawPayload {
  GridSize dims;
  Spacing spacing{};
  std::vector<double> values;
  Modality modality = Modality::MR;
};

// ---- RAWJSON ---------------------------------------------------------------

RawPayload read_rawjson(const fs::path& path, Modality modality_hint) {
  json header;
  try {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    header = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("malformed RAWJSON header '" + path.string() + "': " + e.what());
  }
  RawPayload out;
  try {
    const auto dims = header.at("dims").get<std::vector<long long>>();
    const auto spacing = header.at("spacing").get<std::vector<double>>();
    if (dims.size() != 3 || spacing.size() != 3) throw DataError("dims and spacing must have 3 entries");
    for (auto d : dims) {
      if (d < 1) throw DataError("dims must be >= 1");
    }
    out.dims = {static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                static_cast<std::size_t>(dims[2])};
    out.spacing = {spacing[0], spacing[1], spacing[2]};
    out.modality = header.contains("modality") ? modality_from_string(header["modality"].get<std::string>())
                                               : modality_hint;
    const auto dtype = header.at("dtype").get<std::string>();
    const auto data_file = path.parent_path() / header.at("data_file").get<std::string>();
    const auto raw = read_file(data_file);
    const std::size_t n = out.dims.voxel_count();
    out.values.resize(n);
    if (dtype == "f32") {
      if (raw.size() != n * sizeof(float)) throw DataError("RAWJSON payload size mismatch in '" + data_file.string() + "'");
      for (std::size_t i = 0; i < n; ++i) out.values[i] = static_cast<double>(load<float>(raw, i * sizeof(float)));
    } else if (dtype == "f64") {
      if (raw.size() != n * sizeof(double)) throw DataError("RAWJSON payload size mismatch in '" + data_file.string() + "'");
      for (std::size_t i = 0; i < n; ++i) out.values[i] = load<double>(raw, i * sizeof(double));
    } else {
      throw DataError("unsupported RAWJSON dtype '" + dtype + "'");
    }
  } catch (const json::exception& e) {
    throw DataError("malformed RAWJSON header '" + path.string() + "': " + e.what());
  }
  return out;
}

void write_rawjson(const GridSize& dims, const Spacing& spacing, std::span<const double> values,
                   std::optional<Modality> modality, const fs::path& path, RawDType dtype) {
  fs::path raw_path = path;
  raw_path.replace_extension(".raw");
  std::vector<char> raw;
  if (dtype == RawDType::F32) {
    raw.resize(values.size() * sizeof(float));
    for (std::size_t i = 0; i < values.size(); ++i) store(raw, i * sizeof(float), static_cast<float>(values[i]));
  } else {
    raw.resize(values.size() * sizeof(double));
    for (std::size_t i = 0; i < values.size(); ++i) store(raw, i * sizeof(double), values[i]);
  }
  json header;
  header["dims"] = {dims.nx, dims.ny, dims.nz};
  header["spacing"] = {spacing[0], spacing[1], spacing[2]};
  header["dtype"] = dtype == RawDType::F32 ? "f32" : "f64";
  header["data_file"] = raw_path.filename().string();
  if (modality) header["modality"] = std::string(to_string(*modality));
  const auto text = header.dump(2) + "\n";
  write_file(path, text.data(), text.size());
  write_file(raw_path, raw.data(), raw.size());
}

// ---- NIfTI-1 ---------------------------------------------------------------

constexpr std::size_t kNiftiHeaderSize = 348;
constexpr std::size_t kNiftiDataOffset = 352;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;

RawPayload read_nifti(const fs::path& path, Modality modality_hint) {
  const auto buf = read_file(path);
  if (buf.size() < kNiftiHeaderSize) throw DataError("NIfTI file too short: '" + path.string() + "'");
  const auto sizeof_hdr = load<std::int32_t>(buf, 0);
  if (sizeof_hdr != 348) {
    throw DataError("unsupported NIfTI header (sizeof_hdr != 348; big-endian or NIfTI-2?)");
  }
  if (std::memcmp(buf.data() + 344, "n+1\0", 4) != 0) {
    throw DataError("unsupported NIfTI magic (only single-file 'n+1' is accepted)");
  }
  std::array<std::int16_t, 8> dim{};
  for (std::size_t i = 0; i < 8; ++i) dim[i] = load<std::int16_t>(buf, 40 + 2 * i);
  if (dim[0] < 3 || dim[0] > 7) throw DataError("NIfTI dim[0] must be in 3..7");
  for (int i = 4; i <= dim[0]; ++i) {
    if (dim[i] > 1) throw DataError("NIfTI volumes with more than 3 non-singleton dimensions are not supported");
  }
  for (int i = 1; i <= 3; ++i) {
    if (dim[i] < 1) throw DataError("NIfTI dim entries must be >= 1");
  }
  const auto datatype = load<std::int16_t>(buf, 70);
  const auto bitpix = load<std::int16_t>(buf, 72);
  std::array<float, 8> pixdim{};
  for (std::size_t i = 0; i < 8; ++i) pixdim[i] = load<float>(buf, 76 + 4 * i);
  const float vox_offset = load<float>(buf, 108);
  const float scl_slope = load<float>(buf, 112);
  const float scl_inter = load<float>(buf, 116);
  if (!(vox_offset >= static_cast<float>(kNiftiDataOffset))) throw DataError("NIfTI vox_offset must be >= 352");

  RawPayload out;
  out.dims = {static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]), static_cast<std::size_t>(dim[3])};
  out.spacing = {std::fabs(static_cast<double>(pixdim[1])), std::fabs(static_cast<double>(pixdim[2])),
                 std::fabs(static_cast<double>(pixdim[3]))};
  std::string descrip(buf.data() + 148, buf.data() + 148 + 80);
  descrip = descrip.c_str();
  out.modality = descrip.find("modality=CT") != std::string::npos   ? Modality::CT
                 : descrip.find("modality=MR") != std::string::npos ? Modality::MR
                                                                    : modality_hint;

  const std::size_t n = out.dims.voxel_count();
  const auto offset = static_cast<std::size_t>(vox_offset);
  std::size_t width = 0;
  if (datatype == kDtInt16 && bitpix == 16) {
    width = 2;
  } else if (datatype == kDtFloat32 && bitpix == 32) {
    width = 4;
  } else {
    throw DataError("unsupported NIfTI datatype " + std::to_string(datatype) + " (int16 and float32 only)");
  }
  if (buf.size() < offset + n * width) throw DataError("NIfTI payload truncated: '" + path.string() + "'");
  const bool scaled = scl_slope != 0.0f && std::isfinite(scl_slope) && !(scl_slope == 1.0f && scl_inter == 0.0f);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = width == 2 ? static_cast<double>(load<std::int16_t>(buf, offset + 2 * i))
                                  : static_cast<double>(load<float>(buf, offset + 4 * i));
    out.values[i] = scaled ? static_cast<double>(scl_slope) * raw + static_cast<double>(scl_inter) : raw;
  }
  return out;
}

void write_nifti(const GridSize& dims, const Spacing& spacing, std::span<const double> values,
                 std::optional<Modality> modality, bool as_int16, const fs::path& path) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (dims[a] > 32767) throw DataError("dimension too large for NIfTI-1");
  }
  const std::size_t width = as_int16 ? 2 : 4;
  std::vector<char> buf(kNiftiDataOffset + values.size() * width, 0);
  store<std::int32_t>(buf, 0, 348);
  store<char>(buf, 38, 'r');
  const std::array<std::int16_t, 8> dim{3,
                                        static_cast<std::int16_t>(dims.nx),
                                        static_cast<std::int16_t>(dims.ny),
                                        static_cast<std::int16_t>(dims.nz),
                                        1, 1, 1, 1};
  for (std::size_t i = 0; i < 8; ++i) store<std::int16_t>(buf, 40 + 2 * i, dim[i]);
  store<std::int16_t>(buf, 70, as_int16 ? kDtInt16 : kDtFloat32);
  store<std::int16_t>(buf, 72, as_int16 ? 16 : 32);
  const std::array<float, 8> pixdim{1.0f, static_cast<float>(spacing[0]), static_cast<float>(spacing[1]),
                                    static_cast<float>(spacing[2]), 1.0f, 1.0f, 1.0f, 1.0f};
  for (std::size_t i = 0; i < 8; ++i) store<float>(buf, 76 + 4 * i, pixdim[i]);
  store<float>(buf, 108, static_cast<float>(kNiftiDataOffset));
  store<float>(buf, 112, 1.0f);
  store<float>(buf, 116, 0.0f);
  store<char>(buf, 123, 2);  // xyzt_units: mm
  if (modality) {
    const std::string descrip = "bmrisk modality=" + std::string(to_string(*modality));
    std::memcpy(buf.data() + 148, descrip.data(), descrip.size());
  }
  std::memcpy(buf.data() + 344, "n+1\0", 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (as_int16) {
      store<std::int16_t>(buf, kNiftiDataOffset + 2 * i, static_cast<std::int16_t>(values[i]));
    } else {
      store<float>(buf, kNiftiDataOffset + 4 * i, static_cast<float>(values[i]));
    }
  }
  write_file(path, buf.data(), buf.size());
}

}  // namespace

VolumeImage read_volume(const fs::path& path, VolumeFormat format, Modality modality_hint) {
  auto p = format == VolumeFormat::RawJson ? read_rawjson(path, modality_hint) : read_nifti(path, modality_hint);
  return VolumeImage(p.dims, p.spacing, std::move(p.values), p.modality);
}

void write_volume(const VolumeImage& img, const fs::path& path, VolumeFormat format, RawDType dtype) {
  if (format == VolumeFormat::RawJson) {
    write_rawjson(img.dims(), img.spacing(), img.voxels(), img.modality(), path, dtype);
  } else {
    if (dtype != RawDType::F32) throw ConfigError("NIfTI output supports float32 only");
    write_nifti(img.dims(), img.spacing(), img.voxels(), img.modality(), false, path);
  }
}

RoiMask read_mask(const fs::path& path, VolumeFormat format) {
  auto p = format == VolumeFormat::RawJson ? read_rawjson(path, Modality::MR) : read_nifti(path, Modality::MR);
  std::vector<std::uint8_t> bits(p.values.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!std::isfinite(p.values[i])) throw DataError("mask contains non-finite values");
    bits[i] = p.values[i] != 0.0 ? 1 : 0;
  }
  return RoiMask(p.dims, std::move(bits));
}

void write_mask(const RoiMask& mask, const Spacing& spacing, const fs::path& path, VolumeFormat format) {
  std::vector<double> values(mask.voxels().begin(), mask.voxels().end());
  if (format == VolumeFormat::RawJson) {
    write_rawjson(mask.dims(), spacing, values, std::nullopt, path, RawDType::F32);
  } else {
    write_nifti(mask.dims(), spacing, values, std::nullopt, true, path);
  }
}

}  // namespace bmrisk

#pragma once

#include <filesystem>
#include <string_view>

#include "bmrisk/volume.hpp"

namespace bmrisk {

/// On-disk volume formats.
///
/// RawJson: `<name>.json` header (dims, spacing, dtype, data_file, optional
/// modality) next to a little-endian `<name>.raw` payload in x-fastest order.
/// dtype "f32" is the interchange default; "f64" is accepted for lossless
/// storage of double-precision intermediates.
///
/// Nifti1: uncompressed single-file NIfTI-1 (348-byte header, magic "n+1\0",
/// vox_offset >= 352), little-endian, datatype int16 or float32. Spacing comes
/// from pixdim[1..3]; qform/sform are ignored.
enum class VolumeFormat { RawJson, Nifti1 };

enum class RawDType { F32, F64 };

std::string_view to_string(VolumeFormat f);
VolumeFormat volume_format_from_string(std::string_view s);

/// Picks the format from the extension: .json -> RawJson, .nii -> Nifti1.
VolumeFormat guess_volume_format(const std::filesystem::path& path);

VolumeImage read_volume(const std::filesystem::path& path, VolumeFormat format,
                        Modality modality_hint = Modality::MR);

/// For RawJson, `path` names the .json header; the payload goes next to it
/// with the same stem and a .raw extension.
void write_volume(const VolumeImage& img, const std::filesystem::path& path, VolumeFormat format,
                  RawDType dtype = RawDType::F32);

/// Masks use the same containers; any nonzero voxel is foreground.
RoiMask read_mask(const std::filesystem::path& path, VolumeFormat format);
void write_mask(const RoiMask& mask, const Spacing& spacing, const std::filesystem::path& path,
                VolumeFormat format);

}  // namespace bmrisk

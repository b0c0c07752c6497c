#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bmrisk/cohort.hpp"
#include "bmrisk/volume.hpp"

namespace bmrisk {

inline constexpr std::string_view kManifestSchema = "bmrisk-cohort/1";

/// Patients -> lesions -> dated imaging, as stored on disk. Image paths are
/// relative to `base_dir`, the manifest's directory.
struct CohortManifest {
  std::vector<MetastasisRecord> records;
  std::filesystem::path base_dir;
};

/// Parses and validates a manifest. Structural problems are DataErrors naming
/// the offending JSON path.
CohortManifest read_manifest(const std::filesystem::path& path);
CohortManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);

/// Serialized with patients in first-seen order and lesions grouped under them.
std::string manifest_to_string(const std::vector<MetastasisRecord>& records);
void write_manifest(const std::vector<MetastasisRecord>& records, const std::filesystem::path& path);

struct LoadedImage {
  VolumeImage image;
  RoiMask mask;
};

/// Source of volumes and masks named by ImageRefs.
class ImageStore {
 public:
  virtual ~ImageStore() = default;
  virtual LoadedImage load(const ImageRef& ref, Modality modality) const = 0;
  /// Content hash of the referenced image and mask; changes whenever either does.
  virtual std::uint64_t fingerprint(const ImageRef& ref) const = 0;
};

/// Reads RAWJSON or NIfTI files (by extension) relative to a base directory.
class FileImageStore final : public ImageStore {
 public:
  explicit FileImageStore(std::filesystem::path base_dir) : base_(std::move(base_dir)) {}
  LoadedImage load(const ImageRef& ref, Modality modality) const override;
  std::uint64_t fingerprint(const ImageRef& ref) const override;

 private:
  std::filesystem::path base_;
};

/// Keyed in-memory volumes and masks.
class MemoryImageStore final : public ImageStore {
 public:
  void put_image(const std::string& key, VolumeImage image);
  void put_mask(const std::string& key, RoiMask mask);
  const VolumeImage& image(const std::string& key) const;
  const RoiMask& mask(const std::string& key) const;
  const std::map<std::string, VolumeImage>& images() const { return images_; }
  const std::map<std::string, RoiMask>& masks() const { return masks_; }

  LoadedImage load(const ImageRef& ref, Modality modality) const override;
  std::uint64_t fingerprint(const ImageRef& ref) const override;

 private:
  std::map<std::string, VolumeImage> images_;
  std::map<std::string, RoiMask> masks_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace bmrisk

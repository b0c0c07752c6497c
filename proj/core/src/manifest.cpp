#include "bmrisk/manifest.hpp"

#include <fstream>
#include <sstream>

#include "bmrisk/error.hpp"
#include "bmrisk/volume_io.hpp"
#include "json.hpp"

namespace bmrisk {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw DataError("manifest " + where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

Date get_date(const json& obj, const char* key, const std::string& where) {
  try {
    return parse_date(get_string(obj, key, where));
  } catch (const DataError& e) {
    fail(where + "." + key, e.what());
  }
}

ImageRef get_ref(const json& obj, const std::string& where) {
  return {get_string(obj, "image", where), get_string(obj, "mask", where)};
}

MetastasisRecord parse_lesion(const json& j, const std::string& patient_id, const std::string& where) {
  MetastasisRecord r;
  r.patient_id = patient_id;
  r.lesion_id = get_string(j, "lesion_id", where);
  const auto& c = field(j, "clinical", where);
  const std::string cw = where + ".clinical";
  r.clinical.rpa_class = get_int(c, "rpa_class", cw);
  r.clinical.eqd = get_number(c, "eqd", cw);
  r.clinical.n_metastases = get_int(c, "n_metastases", cw);
  r.clinical.age = get_number(c, "age", cw);
  r.clinical.sex = get_int(c, "sex", cw);
  r.clinical.primary_site = get_string(c, "primary_site", cw);
  r.clinical.karnofsky = get_number(c, "karnofsky", cw);
  const auto& ecd = field(c, "extracranial_disease", cw);
  if (!ecd.is_boolean()) fail(cw + ".extracranial_disease", "expected a boolean");
  r.clinical.extracranial_disease = ecd.get<bool>();

  const auto& p = field(j, "planning", where);
  const std::string pw = where + ".planning";
  r.planning_mr.date = get_date(p, "date", pw);
  r.planning_mr.ref = get_ref(field(p, "mr", pw), pw + ".mr");
  if (auto it = p.find("ct"); it != p.end() && !it->is_null()) r.planning_ct = get_ref(*it, pw + ".ct");

  const auto& fus = field(j, "followups", where);
  if (!fus.is_array()) fail(where + ".followups", "expected an array");
  for (std::size_t i = 0; i < fus.size(); ++i) {
    const std::string fw = where + ".followups[" + std::to_string(i) + "]";
    r.followups.push_back({get_date(fus[i], "date", fw), get_ref(fus[i], fw)});
  }
  if (auto it = j.find("event"); it != j.end() && !it->is_null()) r.event = get_date(j, "event", where);
  r.censor_date = get_date(j, "censor_date", where);
  try {
    validate_record(r);
  } catch (const DataError& e) {
    fail(where, e.what());
  }
  return r;
}

json ref_json(const ImageRef& ref) { return {{"image", ref.image}, {"mask", ref.mask}}; }

json lesion_json(const MetastasisRecord& r) {
  const auto& c = r.clinical;
  json planning = {{"date", format_date(r.planning_mr.date)}, {"mr", ref_json(r.planning_mr.ref)}};
  if (r.planning_ct) planning["ct"] = ref_json(*r.planning_ct);
  json fus = json::array();
  for (const auto& fu : r.followups) {
    fus.push_back({{"date", format_date(fu.date)}, {"image", fu.ref.image}, {"mask", fu.ref.mask}});
  }
  return {{"lesion_id", r.lesion_id},
          {"clinical",
           {{"rpa_class", c.rpa_class},
            {"eqd", c.eqd},
            {"n_metastases", c.n_metastases},
            {"age", c.age},
            {"sex", c.sex},
            {"primary_site", c.primary_site},
            {"karnofsky", c.karnofsky},
            {"extracranial_disease", c.extracranial_disease}}},
          {"planning", planning},
          {"followups", fus},
          {"event", r.event ? json(format_date(*r.event)) : json(nullptr)},
          {"censor_date", format_date(r.censor_date)}};
}

std::uint64_t hash_file(const fs::path& path, std::uint64_t h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(buf.data(), buf.size(), h);
}

std::uint64_t hash_volume_file(const fs::path& path, std::uint64_t h) {
  h = hash_file(path, h);
  if (guess_volume_format(path) == VolumeFormat::RawJson) {
    std::ifstream in(path);
    json header;
    try {
      in >> header;
    } catch (const json::exception& e) {
      throw DataError("malformed RAWJSON header '" + path.string() + "': " + e.what());
    }
    if (header.contains("data_file") && header["data_file"].is_string()) {
      h = hash_file(path.parent_path() / header["data_file"].get<std::string>(), h);
    }
  }
  return h;
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

CohortManifest parse_manifest(const std::string& text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (get_string(root, "schema", "$") != kManifestSchema) {
    fail("$.schema", "expected '" + std::string(kManifestSchema) + "'");
  }
  const auto& patients = field(root, "patients", "$");
  if (!patients.is_array()) fail("$.patients", "expected an array");
  CohortManifest m;
  m.base_dir = base_dir;
  std::unordered_map<std::string, bool> seen;
  for (std::size_t pi = 0; pi < patients.size(); ++pi) {
    const std::string pw = "$.patients[" + std::to_string(pi) + "]";
    const std::string pid = get_string(patients[pi], "patient_id", pw);
    const auto& lesions = field(patients[pi], "lesions", pw);
    if (!lesions.is_array()) fail(pw + ".lesions", "expected an array");
    for (std::size_t li = 0; li < lesions.size(); ++li) {
      const std::string lw = pw + ".lesions[" + std::to_string(li) + "]";
      auto rec = parse_lesion(lesions[li], pid, lw);
      if (seen[rec.lesion_id]) fail(lw, "duplicate lesion_id '" + rec.lesion_id + "'");
      seen[rec.lesion_id] = true;
      m.records.push_back(std::move(rec));
    }
  }
  return m;
}

CohortManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

std::string manifest_to_string(const std::vector<MetastasisRecord>& records) {
  json patients = json::array();
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& r : records) {
    auto it = slot.find(r.patient_id);
    if (it == slot.end()) {
      it = slot.emplace(r.patient_id, patients.size()).first;
      patients.push_back({{"patient_id", r.patient_id}, {"lesions", json::array()}});
    }
    patients[it->second]["lesions"].push_back(lesion_json(r));
  }
  const json root = {{"schema", kManifestSchema}, {"patients", patients}};
  return root.dump(2) + "\n";
}

void write_manifest(const std::vector<MetastasisRecord>& records, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
  out << manifest_to_string(records);
}

LoadedImage FileImageStore::load(const ImageRef& ref, Modality modality) const {
  const fs::path img = base_ / ref.image;
  const fs::path msk = base_ / ref.mask;
  VolumeImage image = read_volume(img, guess_volume_format(img), modality);
  if (image.modality() != modality) {
    image = VolumeImage(image.dims(), image.spacing(), std::vector<double>(image.voxels().begin(), image.voxels().end()),
                        modality);
  }
  RoiMask mask = read_mask(msk, guess_volume_format(msk));
  require_same_grid(image, mask);
  return {std::move(image), std::move(mask)};
}

std::uint64_t FileImageStore::fingerprint(const ImageRef& ref) const {
  return hash_volume_file(base_ / ref.mask, hash_volume_file(base_ / ref.image, 0xcbf29ce484222325ULL));
}

void MemoryImageStore::put_image(const std::string& key, VolumeImage image) {
  images_.insert_or_assign(key, std::move(image));
}

void MemoryImageStore::put_mask(const std::string& key, RoiMask mask) { masks_.insert_or_assign(key, std::move(mask)); }

const VolumeImage& MemoryImageStore::image(const std::string& key) const {
  auto it = images_.find(key);
  if (it == images_.end()) throw DataError("no image '" + key + "' in memory store");
  return it->second;
}

const RoiMask& MemoryImageStore::mask(const std::string& key) const {
  auto it = masks_.find(key);
  if (it == masks_.end()) throw DataError("no mask '" + key + "' in memory store");
  return it->second;
}

LoadedImage MemoryImageStore::load(const ImageRef& ref, Modality) const {
  const auto& img = image(ref.image);
  const auto& msk = mask(ref.mask);
  require_same_grid(img, msk);
  return {img, msk};
}

std::uint64_t MemoryImageStore::fingerprint(const ImageRef& ref) const {
  const auto& img = image(ref.image);
  const auto& msk = mask(ref.mask);
  std::uint64_t h = fnv1a(img.voxels().data(), img.voxels().size_bytes());
  h = fnv1a(img.spacing().data(), sizeof(double) * 3, h);
  return fnv1a(msk.voxels().data(), msk.voxels().size_bytes(), h);
}

}  // namespace bmrisk

#include "bmrisk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmrisk/error.hpp"
#include "bmrisk/rng.hpp"

namespace bmrisk {

namespace {

namespace fs = std::filesystem;

struct LesionShape {
  std::array<double, 3> centre;
  std::array<double, 3> radii;  // voxels
  double intensity;
};

struct Appearance {
  double growth = 1.0;
  double shift = 0.0;
  double texture = 0.0;
};

double as_float(double v) { return static_cast<double>(static_cast<float>(v)); }

bool inside(const LesionShape& s, double growth, double margin, std::size_t x, std::size_t y, std::size_t z) {
  double q = 0.0;
  const std::array<double, 3> p{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
  for (int a = 0; a < 3; ++a) {
    const double d = (p[a] - s.centre[a]) / (s.radii[a] * growth + margin);
    q += d * d;
  }
  return q <= 1.0;
}

RoiMask ellipsoid_mask(const GridSize& dims, const LesionShape& s, double growth, double margin) {
  std::vector<std::uint8_t> m(dims.voxel_count(), 0);
  std::size_t i = 0;
  for (std::size_t z = 0; z < dims.nz; ++z)
    for (std::size_t y = 0; y < dims.ny; ++y)
      for (std::size_t x = 0; x < dims.nx; ++x, ++i) m[i] = inside(s, growth, margin, x, y, z) ? 1 : 0;
  // the centre voxel always belongs to the lesion
  const auto cx = static_cast<std::size_t>(std::lround(s.centre[0]));
  const auto cy = static_cast<std::size_t>(std::lround(s.centre[1]));
  const auto cz = static_cast<std::size_t>(std::lround(s.centre[2]));
  m[cx + dims.nx * (cy + dims.ny * cz)] = 1;
  return RoiMask(dims, std::move(m));
}

VolumeImage mr_image(Rng& rng, const SynthConfig& cfg, const LesionShape& s, const RoiMask& lesion, const Appearance& a) {
  const auto& d = cfg.dims;
  std::vector<double> v(d.voxel_count());
  std::size_t i = 0;
  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x, ++i) {
        const bool grey = x < 2 || y < 2 || x + 2 >= d.nx || y + 2 >= d.ny;
        double value = grey ? rng.normal(70.0, 6.0) : rng.normal(100.0, 6.0);
        if (lesion.contains(i)) {
          const double checker = ((x + y + z) % 2 == 0) ? 1.0 : -1.0;
          value = rng.normal(s.intensity + a.shift, 8.0) + a.texture * checker;
        }
        v[i] = as_float(value);
      }
  return VolumeImage(d, cfg.spacing, std::move(v), Modality::MR);
}

VolumeImage ct_image(Rng& rng, const SynthConfig& cfg, const RoiMask& lesion) {
  std::vector<double> v(cfg.dims.voxel_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = as_float(lesion.contains(i) ? rng.normal(50.0, 5.0) : rng.normal(35.0, 5.0));
  }
  return VolumeImage(cfg.dims, cfg.spacing, std::move(v), Modality::CT);
}

std::string ext(VolumeFormat f) { return f == VolumeFormat::Nifti1 ? ".nii" : ".json"; }

long uniform_days(Rng& rng, long lo, long hi) { return lo + static_cast<long>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

}  // namespace

SynthCohort synth_cohort(const SynthConfig& cfg) {
  if (cfg.n_lesions < 2) throw ConfigError("synthetic cohorts need at least 2 lesions");
  if (!(cfg.prevalence > 0.0 && cfg.prevalence <= 0.5)) throw ConfigError("prevalence must be in (0, 0.5]");
  if (cfg.effect < 0.0 || !std::isfinite(cfg.effect)) throw ConfigError("effect must be finite and >= 0");
  if (cfg.horizon_days < 30) throw ConfigError("synthetic cohorts need horizon_days >= 30");
  if (cfg.dims.nx < 10 || cfg.dims.ny < 10 || cfg.dims.nz < 8) throw ConfigError("synthetic grid must be at least 10x10x8");

  const auto n = static_cast<std::size_t>(cfg.n_lesions);
  Rng plan(derive_seed(cfg.seed, 0));

  std::vector<int> n_followups(n);
  for (auto& k : n_followups) k = 2 + static_cast<int>(plan.below(3));
  const int total = std::accumulate(n_followups.begin(), n_followups.end(), 0);
  const auto target = static_cast<long>(std::lround(cfg.prevalence * total));
  const long hi = std::max<long>(1, static_cast<long>(n) - 2);
  const auto n_prog = static_cast<std::size_t>(std::clamp<long>(target, std::min<long>(2, hi), hi));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  plan.shuffle(std::span<std::size_t>(order));
  std::vector<bool> progressor(n, false);
  for (std::size_t i = 0; i < n_prog && i < n; ++i) progressor[order[i]] = true;

  SynthCohort out;
  const Date origin = parse_date("2018-01-01");
  const std::string fmt = ext(cfg.format);
  std::size_t lesion = 0;
  int patient_no = 0;
  while (lesion < n) {
    ++patient_no;
    Rng prng(derive_seed(cfg.seed, 1000000 + static_cast<std::uint64_t>(patient_no)));
    const std::size_t in_patient = std::min<std::size_t>(1 + prng.below(3), n - lesion);
    ClinicalCovariates base;
    const double u = prng.uniform();
    base.rpa_class = u < 0.25 ? 1 : (u < 0.8 ? 2 : 3);
    base.n_metastases = static_cast<int>(in_patient + prng.below(6));
    base.age = std::round(std::clamp(prng.normal(62.0, 10.0), 30.0, 90.0));
    base.sex = static_cast<int>(prng.below(2));
    base.primary_site = std::string(kPrimarySites[prng.below(4)]);
    base.karnofsky = 60.0 + 10.0 * static_cast<double>(prng.below(5));
    base.extracranial_disease = prng.uniform() < 0.5;
    char pid[16];
    std::snprintf(pid, sizeof pid, "P%03d", patient_no);

    for (std::size_t k = 0; k < in_patient; ++k, ++lesion) {
      Rng rng(derive_seed(cfg.seed, 1 + lesion));
      MetastasisRecord r;
      r.patient_id = pid;
      char lid[16];
      std::snprintf(lid, sizeof lid, "L%04zu", lesion + 1);
      r.lesion_id = lid;
      r.clinical = base;
      r.clinical.eqd = std::round(rng.uniform(18.0, 30.0) * 10.0) / 10.0;

      const Date planning = add_days(origin, uniform_days(rng, 0, 700));
      r.planning_mr.date = planning;
      std::vector<Date> dates;
      Date t = add_days(planning, uniform_days(rng, 60, 150));
      for (int f = 0; f < n_followups[lesion]; ++f) {
        dates.push_back(t);
        t = add_days(t, uniform_days(rng, cfg.horizon_days, cfg.horizon_days + 60));
      }
      std::size_t hrm_index = dates.size();
      if (progressor[lesion]) {
        hrm_index = static_cast<std::size_t>(rng.below(dates.size()));
        dates.resize(hrm_index + 1);
        r.event = add_days(dates.back(), uniform_days(rng, 15, cfg.horizon_days - 5));
        r.censor_date = add_days(*r.event, uniform_days(rng, 0, 200));
      } else if (rng.uniform() < 0.9) {
        r.censor_date = add_days(dates.back(), uniform_days(rng, cfg.horizon_days, 5 * cfg.horizon_days));
      } else {
        r.censor_date = add_days(dates.back(), uniform_days(rng, 10, cfg.horizon_days - 10));
      }

      LesionShape shape;
      for (int a = 0; a < 3; ++a) shape.centre[static_cast<std::size_t>(a)] = (static_cast<double>(cfg.dims[static_cast<std::size_t>(a)]) - 1.0) / 2.0 + rng.uniform(-1.5, 1.5);
      shape.radii = {rng.uniform(2.5, 4.0), rng.uniform(2.5, 4.0), rng.uniform(1.8, 2.8)};
      shape.intensity = rng.uniform(120.0, 140.0);

      auto emit_mr = [&](const std::string& stem, const Appearance& a) {
        const RoiMask m = ellipsoid_mask(cfg.dims, shape, a.growth, 0.0);
        const ImageRef ref{"images/" + stem + fmt, "masks/" + stem + fmt};
        out.images.put_image(ref.image, mr_image(rng, cfg, shape, m, a));
        out.images.put_mask(ref.mask, m);
        return ref;
      };

      r.planning_mr.ref = emit_mr(r.lesion_id + "-planning-mr", Appearance{});
      if (rng.uniform() < cfg.planning_ct_fraction) {
        const RoiMask ptv = ellipsoid_mask(cfg.dims, shape, 1.0, 1.0);
        const std::string stem = r.lesion_id + "-planning-ct";
        r.planning_ct = ImageRef{"images/" + stem + fmt, "masks/" + stem + fmt};
        out.images.put_image(r.planning_ct->image, ct_image(rng, cfg, ptv));
        out.images.put_mask(r.planning_ct->mask, ptv);
      }
      for (std::size_t f = 0; f < dates.size(); ++f) {
        Appearance a;
        a.growth = rng.uniform(0.85, 1.1);
        a.shift = rng.uniform(-5.0, 5.0);
        if (f == hrm_index) {
          a.growth = (1.0 + 0.45 * cfg.effect) * rng.uniform(0.95, 1.05);
          a.shift = 30.0 * cfg.effect;
          a.texture = 20.0 * cfg.effect;
        }
        r.followups.push_back({dates[f], emit_mr(r.lesion_id + "-fu" + std::to_string(f + 1), a)});
      }
      validate_record(r);
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

void write_synth_cohort(const SynthCohort& cohort, const fs::path& dir) {
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");
  for (const auto& [key, img] : cohort.images.images()) {
    write_volume(img, dir / key, guess_volume_format(key));
  }
  for (const auto& [key, mask] : cohort.images.masks()) {
    const auto& img = cohort.images.image("images/" + key.substr(key.find('/') + 1));
    write_mask(mask, img.spacing(), dir / key, guess_volume_format(key));
  }
  write_manifest(cohort.records, dir / "manifest.json");
}

}  // namespace bmrisk

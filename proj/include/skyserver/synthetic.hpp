#pragma once

// Seeded synthetic catalogs. Output is bit-identical for a given spec on any
// platform: the generator uses mt19937_64 with its own uniform and normal
// transforms rather than the implementation-defined std distributions.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "skyserver/catalog.hpp"

namespace sky {

enum class DensityProfile { Uniform, Clustered };

struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::size_t n_objects = 10000;

  DensityProfile profile = DensityProfile::Clustered;
  int clusters = 50;
  double cluster_scale_arcmin = 5.0;
  double cluster_fraction = 0.5;  // share of objects drawn from clusters

  double frac_primary = 0.8, frac_secondary = 0.1, frac_family = 0.1;
  double frac_star = 0.45, frac_galaxy = 0.45, frac_other = 0.1;

  double mag_mean = 20.0, mag_sigma = 1.5;
  double spectro_fraction = 0.1;
  /// Share of sources replaced by templates that the query suite selects.
  double plant_fraction = 0.02;

  double ra_min = 150.0, ra_max = 200.0, dec_min = -10.0, dec_max = 10.0;

  /// Throws std::invalid_argument when fractions do not sum to 1 within 1e-9
  /// or a parameter is out of range.
  void validate() const;
};

struct SyntheticCatalog {
  std::vector<PhotoObj> photo;
  std::vector<SpecObj> spec;
  std::vector<SpecLine> lines;
  std::vector<Field> fields;
};

SyntheticCatalog generate(const SyntheticSpec& spec);

/// Writes field.csv, photoObj.csv, specObj.csv and specLine.csv in the loader
/// input format (no load_seq column). Throws std::runtime_error when the
/// directory cannot be created or written.
void write_synthetic(const SyntheticCatalog& cat, const std::filesystem::path& dir);

/// Builds all tables and indices directly, bypassing the loader.
Catalog make_catalog(SyntheticCatalog cat);

/// Survey layout used by the generator: runs are 2.5 degree dec stripes
/// split into six camera columns; fields are 0.15 degrees of ra.
struct FieldKey {
  std::int32_t run, camcol, field;
};
FieldKey field_of(double ra_deg, double dec_deg);

}  // namespace sky

#pragma once

// Spatial self-join and the nearby/nearest search family. Every search runs
// cover -> htm_lookup -> exact distance filter.

#include <cstdint>
#include <optional>
#include <vector>

#include "skyserver/catalog.hpp"

namespace sky {

inline constexpr double kNeighborRadiusArcmin = 0.5;

/// All ordered pairs (a, b), a != b, within `radius_arcmin` (inclusive).
/// Objects are partitioned across `threads` workers.
NeighborTable build_neighbors(const PhotoTable& photo, double radius_arcmin = kNeighborRadiusArcmin,
                              unsigned threads = 1);

struct NearbyRow {
  std::int64_t objID;
  double distanceMins;
  std::int32_t type;
  double ra, dec;

  bool operator==(const NearbyRow&) const = default;
};

/// Objects within `radius_arcmin`, ascending by (distance, objID). Throws
/// std::invalid_argument for a non-positive radius and std::out_of_range for
/// an invalid dec.
std::vector<NearbyRow> get_nearby_obj_eq(const PhotoTable& photo, double ra, double dec, double radius_arcmin,
                                         ScanStats* stats = nullptr);
std::optional<NearbyRow> get_nearest_obj_eq(const PhotoTable& photo, double ra, double dec, double radius_arcmin,
                                            ScanStats* stats = nullptr);

/// (x, y, z) need not be unit length; a zero vector throws std::invalid_argument.
std::vector<NearbyRow> get_nearby_obj_xyz(const PhotoTable& photo, double x, double y, double z, double radius_arcmin,
                                          ScanStats* stats = nullptr);
std::optional<NearbyRow> get_nearest_obj_xyz(const PhotoTable& photo, double x, double y, double z,
                                             double radius_arcmin, ScanStats* stats = nullptr);

std::vector<NearbyRow> get_nearby(const PhotoTable& photo, const UnitVector& center, double radius_arcmin,
                                  ScanStats* stats = nullptr);

}  // namespace sky

#include "skyserver/neighbors.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "skyserver/cover.hpp"

namespace sky {
namespace {

Vec3 position(const PhotoObj& o) { return {o.cx, o.cy, o.cz}; }

void check_radius(double radius_arcmin) {
  if (!(radius_arcmin > 0.0)) throw std::invalid_argument("search radius must be positive");
}

}  // namespace

NeighborTable build_neighbors(const PhotoTable& photo, double radius_arcmin, unsigned threads) {
  check_radius(radius_arcmin);
  const auto rows = photo.rows();
  const std::size_t n = rows.size();
  const auto work = [&](std::size_t lo, std::size_t hi, std::vector<Neighbor>& out) {
    for (std::size_t k = lo; k < hi; ++k) {
      const PhotoObj& a = rows[k];
      const Vec3 pa = position(a);
      const auto ranges = cover(make_circle(UnitVector::normalize(pa), radius_arcmin));
      for (const PhotoObj* b : photo.htm_lookup(ranges)) {
        if (b->objID == a.objID) continue;
        const double d = rad_to_arcmin(angular_distance(pa, position(*b)));
        if (d <= radius_arcmin) out.push_back(Neighbor{a.objID, b->objID, d, b->type});
      }
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n / 1000 + 1)));
  std::vector<std::vector<Neighbor>> parts(threads);
  if (threads == 1) {
    work(0, n, parts[0]);
  } else {
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back(work, n * t / threads, n * (t + 1) / threads, std::ref(parts[t]));
    }
    for (auto& w : workers) w.join();
  }
  std::vector<Neighbor> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return NeighborTable(std::move(all), radius_arcmin);
}

std::vector<NearbyRow> get_nearby(const PhotoTable& photo, const UnitVector& center, double radius_arcmin,
                                  ScanStats* stats) {
  check_radius(radius_arcmin);
  const auto ranges = cover(make_circle(center, std::min(radius_arcmin, 10800.0)));
  std::vector<NearbyRow> out;
  for (const PhotoObj* o : photo.htm_lookup(ranges, stats)) {
    const double d = rad_to_arcmin(angular_distance(center.vec(), position(*o)));
    if (d <= radius_arcmin) out.push_back(NearbyRow{o->objID, d, o->type, o->ra, o->dec});
  }
  std::sort(out.begin(), out.end(), [](const NearbyRow& a, const NearbyRow& b) {
    return a.distanceMins != b.distanceMins ? a.distanceMins < b.distanceMins : a.objID < b.objID;
  });
  return out;
}

std::vector<NearbyRow> get_nearby_obj_eq(const PhotoTable& photo, double ra, double dec, double radius_arcmin,
                                         ScanStats* stats) {
  return get_nearby(photo, eq_to_xyz(ra, dec), radius_arcmin, stats);
}

std::optional<NearbyRow> get_nearest_obj_eq(const PhotoTable& photo, double ra, double dec, double radius_arcmin,
                                            ScanStats* stats) {
  auto rows = get_nearby_obj_eq(photo, ra, dec, radius_arcmin, stats);
  if (rows.empty()) return std::nullopt;
  return rows.front();
}

std::vector<NearbyRow> get_nearby_obj_xyz(const PhotoTable& photo, double x, double y, double z, double radius_arcmin,
                                          ScanStats* stats) {
  return get_nearby(photo, UnitVector::normalize(x, y, z), radius_arcmin, stats);
}

std::optional<NearbyRow> get_nearest_obj_xyz(const PhotoTable& photo, double x, double y, double z,
                                             double radius_arcmin, ScanStats* stats) {
  auto rows = get_nearby_obj_xyz(photo, x, y, z, radius_arcmin, stats);
  if (rows.empty()) return std::nullopt;
  return rows.front();
}

}  // namespace sky

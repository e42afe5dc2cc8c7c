#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "skyserver/dictionary.hpp"
#include "skyserver/neighbors.hpp"
#include "skyserver/synthetic.hpp"
#include "support/oracle.hpp"
#include "support/random_points.hpp"

using namespace sky;

namespace {

PhotoObj at(std::int64_t id, double ra, double dec) {
  PhotoObj o;
  o.objID = id;
  o.ra = ra;
  o.dec = dec;
  const UnitVector v = eq_to_xyz(ra, dec);
  o.cx = v.x();
  o.cy = v.y();
  o.cz = v.z();
  o.htmID = locate(v, 20).id();
  o.type = photo_type::kStar;
  return o;
}

const PhotoTable& big_table() {
  static const PhotoTable t = [] {
    SyntheticSpec s;
    s.seed = 11;
    s.n_objects = 100000;
    return PhotoTable(generate(s).photo);
  }();
  return t;
}

void check_same(const std::vector<NearbyRow>& got, const std::vector<testing::ProbeHit>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t k = 0; k < got.size(); ++k) {
    CHECK(got[k].objID == want[k].objID);
    CHECK(std::abs(got[k].distanceMins - want[k].distance) < 1e-9);
  }
}

}  // namespace

TEST_CASE("tiny catalogs") {
  CHECK(build_neighbors(PhotoTable({at(1, 10, 10)})).size() == 0);
  const UnitVector a = eq_to_xyz(10, 10);
  const EquatorialCoord b = xyz_to_eq(offset_point(a, arcmin_to_rad(0.4), 1.0));
  const NeighborTable t = build_neighbors(PhotoTable({at(1, 10, 10), at(2, b.ra_deg(), b.dec_deg())}));
  REQUIRE(t.size() == 2);
  CHECK(t.rows()[0].objID == 1);
  CHECK(t.rows()[0].neighborObjID == 2);
  CHECK(std::abs(t.rows()[0].distanceMins - 0.4) < 1e-9);
  CHECK(t.rows()[1].distanceMins == t.rows()[0].distanceMins);
  CHECK(t.of(2).size() == 1);
  CHECK(t.of(3).empty());

  const NeighborTable twins = build_neighbors(PhotoTable({at(5, 20, 20), at(6, 20, 20)}));
  REQUIRE(twins.size() == 2);
  CHECK(twins.rows()[0].distanceMins == 0.0);
}

TEST_CASE("self-join equals the all-pairs oracle") {
  SyntheticSpec s;
  s.seed = 12;
  s.n_objects = 3000;
  s.clusters = 5;
  s.cluster_fraction = 0.9;
  const PhotoTable photo(generate(s).photo);
  for (unsigned threads : {1u, 3u}) {
    const NeighborTable t = build_neighbors(photo, 0.5, threads);
    const auto want = testing::all_pairs(photo.rows(), 0.5);
    std::vector<Neighbor> got(t.rows().begin(), t.rows().end());
    std::sort(got.begin(), got.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.objID != b.objID ? a.objID < b.objID : a.neighborObjID < b.neighborObjID;
    });
    REQUIRE(got.size() == want.size());
    CHECK(want.size() > 1000);
    for (std::size_t k = 0; k < got.size(); ++k) {
      REQUIRE(got[k].objID == want[k].a);
      REQUIRE(got[k].neighborObjID == want[k].b);
      CHECK(std::abs(got[k].distanceMins - want[k].distance) < 1e-9);
      CHECK(got[k].neighborObjType == photo.find(got[k].neighborObjID)->type);
    }
  }
}

TEST_CASE("neighbor table properties") {
  SyntheticSpec s;
  s.seed = 13;
  s.n_objects = 5000;
  const NeighborTable t = build_neighbors(PhotoTable(generate(s).photo));
  const auto rows = t.rows();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].objID != rows[k].neighborObjID);
    CHECK(rows[k].distanceMins >= 0.0);
    CHECK(rows[k].distanceMins <= 0.5);
    if (k > 0) {
      CHECK(std::tie(rows[k - 1].objID, rows[k - 1].distanceMins) <= std::tie(rows[k].objID, rows[k].distanceMins));
    }
    bool mirrored = false;
    for (const auto& back : t.of(rows[k].neighborObjID)) {
      if (back.neighborObjID == rows[k].objID) mirrored = std::abs(back.distanceMins - rows[k].distanceMins) < 1e-9;
    }
    CHECK(mirrored);
  }
}

TEST_CASE("nearby and nearest") {
  const PhotoTable empty;
  CHECK(get_nearby_obj_eq(empty, 10, 10, 5).empty());
  CHECK_FALSE(get_nearest_obj_eq(empty, 10, 10, 5).has_value());
  CHECK_THROWS_AS(get_nearby_obj_eq(empty, 10, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(get_nearby_obj_eq(empty, 10, 91, 1), std::out_of_range);
  CHECK_THROWS_AS(get_nearby_obj_xyz(empty, 0, 0, 0, 1), std::invalid_argument);

  const PhotoTable small({at(1, 0, 0), at(2, 0.01, 0), at(3, 180, 45), at(4, 359.99, -0.01)});
  const auto whole = get_nearby_obj_eq(small, 0, 0, 10800);
  REQUIRE(whole.size() == 4);
  CHECK(whole[0].objID == 1);
  CHECK(whole[3].objID == 3);
  CHECK(get_nearby_obj_xyz(small, 1, 0, 0, 2) == get_nearby_obj_eq(small, 0, 0, 2));
  CHECK(get_nearby_obj_xyz(small, 2, 0, 0, 2) == get_nearby_obj_xyz(small, 1, 0, 0, 2));
  CHECK_FALSE(get_nearest_obj_eq(small, 90, 0, 30).has_value());
}

TEST_CASE("probes agree with a linear scan") {
  const PhotoTable& photo = big_table();
  testing::Sampler s(14);
  for (int k = 0; k < 100; ++k) {
    const PhotoObj& target = photo.rows()[s.below(photo.size())];
    const double ra = k % 2 ? target.ra : s.uniform(150, 200);
    const double dec = k % 2 ? target.dec : s.uniform(-10, 10);
    const double radius = s.uniform(0.1, 5.0);
    ScanStats st;
    const auto got = get_nearby_obj_eq(photo, ra, dec, radius, &st);
    const auto want = testing::linear_nearby(photo.rows(), ra, dec, radius);
    check_same(got, want);
    CHECK(st.index_used);
    CHECK(st.rows_scanned < photo.size() / 10);

    const auto nearest = get_nearest_obj_eq(photo, ra, dec, radius);
    CHECK(nearest.has_value() == !want.empty());
    if (nearest) CHECK(nearest->objID == want.front().objID);
    if (k % 2) {
      REQUIRE(nearest);
      CHECK(nearest->distanceMins == 0.0);
    }
  }
}

TEST_CASE("xyz probes agree with eq probes") {
  const PhotoTable& photo = big_table();
  testing::Sampler s(15);
  for (int k = 0; k < 1000; ++k) {
    const double ra = s.uniform(150, 200), dec = s.uniform(-10, 10);
    const UnitVector v = eq_to_xyz(ra, dec);
    const double scale = s.uniform(0.5, 3.0);
    const auto a = get_nearby_obj_eq(photo, ra, dec, 1.0);
    const auto b = get_nearby_obj_xyz(photo, v.x() * scale, v.y() * scale, v.z() * scale, 1.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j].objID == b[j].objID);
      CHECK(std::abs(a[j].distanceMins - b[j].distanceMins) < 1e-9);
    }
  }
}

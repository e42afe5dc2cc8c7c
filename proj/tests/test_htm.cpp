#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "skyserver/htm.hpp"
#include "support/random_points.hpp"

using namespace sky;

namespace {

// The documented face layout, written out independently of the library.
const Vec3 kAxis[6] = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
const int kLayout[8][3] = {{1, 5, 2}, {2, 5, 3}, {3, 5, 4}, {4, 5, 1}, {1, 0, 4}, {4, 0, 3}, {3, 0, 2}, {2, 0, 1}};

bool face_signs_nonnegative(int face, const Vec3& p) {
  for (int e = 0; e < 3; ++e) {
    const Vec3& a = kAxis[kLayout[face][e]];
    const Vec3& b = kAxis[kLayout[face][(e + 1) % 3]];
    if (dot(cross(a, b), p) < 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("HtmId validity and depth") {
  CHECK(HtmId(8).depth() == 0);
  CHECK(HtmId(15).depth() == 0);
  CHECK(HtmId(32).depth() == 1);
  CHECK(HtmId((16ull << 40) - 1).depth() == 20);
  CHECK_THROWS_AS(HtmId(7), std::invalid_argument);
  CHECK_THROWS_AS(HtmId(16), std::invalid_argument);
  CHECK_THROWS_AS(HtmId(0), std::invalid_argument);
  CHECK_THROWS_AS(HtmId(16ull << 40), std::invalid_argument);
  CHECK(HtmId(35).parent() == HtmId(8));
  CHECK(HtmId(8).child(3) == HtmId(35));
}

TEST_CASE("locate at depth 0 returns a face") {
  testing::Sampler s(1);
  for (int i = 0; i < 1000; ++i) {
    const auto id = locate(s.sphere_point(), 0).id();
    CHECK(id >= 8);
    CHECK(id <= 15);
  }
  CHECK_THROWS_AS(locate(s.sphere_point(), 21), std::out_of_range);
  CHECK_THROWS_AS(locate(s.sphere_point(), -1), std::out_of_range);
}

TEST_CASE("locate agrees with the plane-sign oracle over all faces") {
  const UnitVector p = UnitVector::normalize(1, 1, 1);
  int expected = -1;
  for (int f = 0; f < 8; ++f) {
    if (face_signs_nonnegative(f, p.vec())) {
      expected = f;
      break;
    }
  }
  REQUIRE(expected == 7);
  CHECK(locate(p, 0).id() == 8u + static_cast<unsigned>(expected));

  testing::Sampler s(2);
  for (int i = 0; i < 10000; ++i) {
    const UnitVector q = s.sphere_point();
    int first = -1;
    for (int f = 0; f < 8 && first < 0; ++f) {
      if (face_signs_nonnegative(f, q.vec())) first = f;
    }
    CHECK(locate(q, 0).id() == 8u + static_cast<unsigned>(first));
  }
}

TEST_CASE("locate is prefix consistent") {
  testing::Sampler s(3);
  for (int i = 0; i < 100000; ++i) {
    const UnitVector p = s.sphere_point();
    const int d = static_cast<int>(s.below(20));
    CHECK((locate(p, d + 1).id() >> 2) == locate(p, d).id());
  }
}

TEST_CASE("vertices of faces are octahedron corners") {
  for (int f = 0; f < 8; ++f) {
    const Trixel t = vertices(HtmId::face(f));
    for (int k = 0; k < 3; ++k) CHECK(t.v[k] == kAxis[kLayout[f][k]]);
  }
}

TEST_CASE("child vertices are on the unit sphere and counter-clockwise") {
  testing::Sampler s(4);
  for (int i = 0; i < 2000; ++i) {
    const Trixel t = vertices(s.trixel(static_cast<int>(s.below(21))));
    for (const auto& v : t.v) CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    CHECK(dot(t.v[0], cross(t.v[1], t.v[2])) > 0.0);
  }
}

TEST_CASE("sampled interior points of a trixel locate back to it") {
  testing::Sampler s(5);
  for (int i = 0; i < 10000; ++i) {
    const int depth = static_cast<int>(s.below(21));
    const HtmId h = s.trixel(depth);
    const Trixel t = vertices(h);
    for (int j = 0; j < 3; ++j) CHECK(locate(s.interior_point(t), depth) == h);
  }
}

TEST_CASE("subtree_range arithmetic") {
  CHECK(subtree_range(HtmId(8), 0) == TrixelRange{HtmId(8), HtmId(8)});
  CHECK(subtree_range(HtmId(8), 1) == TrixelRange{HtmId(32), HtmId(35)});
  CHECK(subtree_range(HtmId(13), 2) == TrixelRange{HtmId(13 * 16), HtmId(14 * 16 - 1)});
  CHECK_THROWS_AS(subtree_range(HtmId(32), 0), std::invalid_argument);
}

TEST_CASE("children's subtree ranges tile the parent's, exhaustively to depth 6") {
  for (int depth = 0; depth < 6; ++depth) {
    const std::uint64_t lo = 8ull << (2 * depth), hi = 16ull << (2 * depth);
    for (std::uint64_t id = lo; id < hi; ++id) {
      const HtmId h(id);
      const TrixelRange whole = subtree_range(h, 6);
      std::uint64_t next = whole.start.id();
      for (int k = 0; k < 4; ++k) {
        const TrixelRange part = subtree_range(h.child(k), 6);
        CHECK(part.start.id() == next);
        next = part.end.id() + 1;
      }
      CHECK(next == whole.end.id() + 1);
    }
  }
}

TEST_CASE("subtree_range equals enumerated descendants") {
  for (std::uint64_t id = 8; id < 16 * 16; ++id) {
    if (!HtmId::is_valid(id)) continue;
    const HtmId h(id);
    std::set<std::uint64_t> desc;
    std::function<void(HtmId)> walk = [&](HtmId n) {
      if (n.depth() == 6) {
        desc.insert(n.id());
        return;
      }
      for (int k = 0; k < 4; ++k) walk(n.child(k));
    };
    walk(h);
    const TrixelRange r = subtree_range(h, 6);
    CHECK(desc.size() == r.end.id() - r.start.id() + 1);
    CHECK(*desc.begin() == r.start.id());
    CHECK(*desc.rbegin() == r.end.id());
  }
}

TEST_CASE("trixel names") {
  CHECK(name_to_id("0") == HtmId(8));
  CHECK(name_to_id("0,0") == HtmId(32));
  CHECK(name_to_id("7,3") == HtmId(63));
  CHECK(name_to_id("3,3,2,0,0,1,0,0,1,3,2,2,2,0").depth() == 13);
  CHECK(id_to_name(HtmId(32)) == "0,0");
  CHECK_THROWS_AS(name_to_id(""), std::invalid_argument);
  CHECK_THROWS_AS(name_to_id("8"), std::invalid_argument);
  CHECK_THROWS_AS(name_to_id("1,4"), std::invalid_argument);
  CHECK_THROWS_AS(name_to_id("1,,2"), std::invalid_argument);
  CHECK_THROWS_AS(name_to_id("1,x"), std::invalid_argument);
  CHECK_THROWS_AS(name_to_id("1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0"), std::invalid_argument);

  testing::Sampler s(6);
  for (int i = 0; i < 10000; ++i) {
    const HtmId h = s.trixel(static_cast<int>(s.below(21)));
    CHECK(name_to_id(id_to_name(h)) == h);
  }
}

TEST_CASE("partition: each point lies in exactly one trixel (sampled, depth <= 4)") {
  testing::Sampler s(7);
  for (int depth = 0; depth <= 4; ++depth) {
    std::vector<std::pair<HtmId, Trixel>> all;
    const std::uint64_t lo = 8ull << (2 * depth), hi = 16ull << (2 * depth);
    for (std::uint64_t id = lo; id < hi; ++id) all.emplace_back(HtmId(id), vertices(HtmId(id)));
    for (int i = 0; i < 500; ++i) {
      const UnitVector p = s.sphere_point();
      const HtmId found = locate(p, depth);
      int strict = 0;
      for (const auto& [id, t] : all) {
        if (trixel_contains(t, p.vec(), -1e-12)) {
          ++strict;
          CHECK(id == found);
        }
      }
      CHECK(strict <= 1);
      CHECK(trixel_contains(vertices(found), p.vec(), 1e-12));
    }
  }
}

TEST_CASE("trixel solid angles tile the sphere") {
  for (int depth = 0; depth <= 3; ++depth) {
    double total = 0.0;
    const std::uint64_t lo = 8ull << (2 * depth), hi = 16ull << (2 * depth);
    for (std::uint64_t id = lo; id < hi; ++id) total += trixel_solid_angle(vertices(HtmId(id)));
    CHECK(total == doctest::Approx(4 * kPi).epsilon(1e-12));
  }
}

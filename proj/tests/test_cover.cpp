#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "skyserver/cover.hpp"
#include "support/random_points.hpp"

using namespace sky;

namespace {

bool covered(const std::vector<TrixelRange>& ranges, HtmId id) {
  return std::any_of(ranges.begin(), ranges.end(), [&](const TrixelRange& r) { return r.contains(id.id()); });
}

}  // namespace

TEST_CASE("whole sky circle") {
  const Area sky_all = make_circle(UnitVector::normalize(0, 0, 1), 10800);
  for (int f = 0; f < 8; ++f) CHECK(classify(HtmId::face(f), sky_all) == Coverage::Full);
  for (int d : {0, 3, 12, 20}) {
    const auto r = cover(sky_all, d);
    REQUIRE(r.size() == 1);
    CHECK(r[0].start.id() == (8ull << (2 * d)));
    CHECK(r[0].end.id() == (16ull << (2 * d)) - 1);
  }
}

TEST_CASE("degenerate circle covers exactly the containing trixel") {
  testing::Sampler s(31);
  for (int i = 0; i < 1000; ++i) {
    const UnitVector p = s.sphere_point();
    const auto r = cover(make_circle(p, 0), 12);
    REQUIRE(r.size() == 1);
    CHECK(r[0].start == locate(p, 12));
    CHECK(r[0].end == locate(p, 12));
  }
}

TEST_CASE("sample cover from the query language") {
  const Area a = parse_area("Circle J2000 12 5.5 60.2 1");
  const auto r = cover(a);
  CHECK(r.size() >= 2);
  CHECK(r.size() <= 10);
  CHECK(is_canonical(r));
  for (const auto& range : r) CHECK(range.depth() == 12);
  testing::Sampler s(32);
  const auto& c = std::get<Circle>(a.shape);
  for (int i = 0; i < 10000; ++i) CHECK(covered(r, locate(s.cap_point(c.center, 1.0), 12)));
}

TEST_CASE("depth resolution") {
  const Area declared = parse_area("CIRCLE J2000 9 10 10 30");
  CHECK(cover(declared, 5).front().depth() == 9);
  const Area plain = parse_area("CIRCLE J2000 10 10 30");
  CHECK(cover(plain, 5).front().depth() == 5);
  CHECK(default_cover_depth(plain) == 10);
  CHECK(default_cover_depth(parse_area("CIRCLE J2000 10 10 0.1")) == 14);
  CHECK(default_cover_depth(parse_area("CIRCLE J2000 10 10 5000")) == 6);
  CHECK_THROWS_AS(cover(plain, 21), std::out_of_range);
  CHECK_THROWS_AS(cover(plain, -1), std::out_of_range);
}

TEST_CASE("range budget") {
  // A thin band along the equator at depth 20 needs far too many ranges.
  const Area band{Convex{{Halfspace{UnitVector::normalize(0, 0, 1), -1e-9},
                          Halfspace{UnitVector::normalize(0, 0, -1), -1e-9}},
                         {}},
                  std::nullopt};
  CHECK_THROWS_AS(cover(band, 20), CoverError);
}

TEST_CASE("classification agrees with sampled membership") {
  testing::Sampler s(33);
  int full = 0, disjoint = 0;
  for (int i = 0; i < 1000; ++i) {
    const int depth = static_cast<int>(s.below(9));
    const HtmId h = s.trixel(depth);
    const Trixel t = vertices(h);
    const UnitVector near = s.interior_point(t, 0.0);
    const double radius = std::exp(s.uniform(std::log(0.5), std::log(8000.0)));
    const Area circle = make_circle(s.cap_point(near, 2 * trixel_scale_arcmin(depth)), radius);
    const Coverage c = classify(t, circle);
    if (c == Coverage::Partial) continue;
    (c == Coverage::Full ? full : disjoint)++;
    for (int j = 0; j < 200; ++j) {
      const bool in = contains(circle, s.interior_point(t, 0.0));
      CHECK(in == (c == Coverage::Full));
    }
  }
  CHECK(full > 50);
  CHECK(disjoint > 50);
}

TEST_CASE("convex and domain covers are sound") {
  testing::Sampler s(34);
  for (int i = 0; i < 100; ++i) {
    const UnitVector c = s.sphere_point();
    const double r = s.uniform(5, 300);
    const Area poly{Convex{{Halfspace{c, std::cos(arcmin_to_rad(r))},
                            Halfspace{s.sphere_point(), s.uniform(-0.3, 0.3)}},
                           {}},
                    std::nullopt};
    const Area dom{Domain{{std::get<Convex>(poly.shape), Convex{{Halfspace{s.sphere_point(), 0.999}}, {}}}},
                   std::nullopt};
    for (const Area* a : {&poly, &dom}) {
      const int depth = default_cover_depth(*a);
      const auto ranges = cover(*a);
      REQUIRE(is_canonical(ranges));
      for (int j = 0; j < 300; ++j) {
        const UnitVector p = s.cap_point(c, r * 1.5);
        if (contains(*a, p)) CHECK(covered(ranges, locate(p, depth)));
      }
    }
  }
}

TEST_CASE("cover is monotone in the radius") {
  testing::Sampler s(35);
  for (int i = 0; i < 100; ++i) {
    const UnitVector c = s.sphere_point();
    const double r = s.uniform(1, 100);
    const auto same_depth_small = cover(make_circle(c, r), 10);
    const auto same_depth_large = cover(make_circle(c, r * 1.5), 10);
    for (const auto& range : same_depth_small) {
      for (auto id = range.start.id(); id <= range.end.id(); ++id) CHECK(covered(same_depth_large, HtmId(id)));
    }
  }
}

TEST_CASE("lift_ranges and is_canonical") {
  const std::vector<TrixelRange> r = {{HtmId(8), HtmId(9)}, {HtmId(12), HtmId(12)}};
  CHECK(is_canonical(r));
  const auto lifted = lift_ranges(r, 2);
  CHECK(lifted[0].start.id() == 128);
  CHECK(lifted[0].end.id() == 159);
  CHECK(lifted[1].start.id() == 192);
  CHECK(lifted[1].end.id() == 207);
  CHECK_FALSE(is_canonical(std::vector<TrixelRange>{{HtmId(8), HtmId(9)}, {HtmId(10), HtmId(11)}}));
  CHECK_FALSE(is_canonical(std::vector<TrixelRange>{{HtmId(12), HtmId(12)}, {HtmId(8), HtmId(9)}}));
}

TEST_CASE("join_ranges") {
  CHECK(join_ranges({}, std::vector<std::uint64_t>{1, 2, 3}).empty());
  const std::vector<TrixelRange> all = {{HtmId(8ull << 40), HtmId((16ull << 40) - 1)}};
  testing::Sampler s(36);
  std::vector<std::uint64_t> ids(1000000);
  for (auto& id : ids) id = (8ull << 40) + s.below(8ull << 40);
  std::sort(ids.begin(), ids.end());
  CHECK(join_ranges(all, ids) == ids);

  const auto ranges = lift_ranges(cover(make_circle(s.sphere_point(), 3000), 12), 20);
  REQUIRE(ranges.size() > 10);
  std::vector<std::uint64_t> expect;
  for (auto id : ids) {
    auto it = std::upper_bound(ranges.begin(), ranges.end(), id,
                               [](std::uint64_t v, const TrixelRange& r) { return v < r.start.id(); });
    if (it != ranges.begin() && std::prev(it)->end.id() >= id) expect.push_back(id);
  }
  CHECK(join_ranges(ranges, ids) == expect);

  std::vector<std::uint64_t> unsorted = {9, 8};
  CHECK_THROWS_AS(join_ranges(all, unsorted), std::invalid_argument);
  const std::vector<TrixelRange> overlap = {{HtmId(8), HtmId(10)}, {HtmId(9), HtmId(11)}};
  CHECK_THROWS_AS(join_ranges(overlap, ids), std::invalid_argument);
}

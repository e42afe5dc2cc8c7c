#include "skyserver/cover.hpp"

#include <algorithm>
#include <cmath>

namespace sky {
namespace {

// Angular slack (radians) applied in favour of Partial.
constexpr double kSlack = 1e-12;

struct Cap {
  Vec3 center;
  double radius;  // radians, [0, pi]
};

Cap circle_cap(const Circle& c) {
  const double r = c.radius_arcmin >= 10800.0 ? kPi : arcmin_to_rad(c.radius_arcmin);
  return Cap{c.center.vec(), r};
}

Cap halfspace_cap(const Halfspace& h) {
  return Cap{h.normal.vec(), std::acos(std::clamp(h.offset, -1.0, 1.0))};
}

struct Edges {
  std::array<Vec3, 3> normal;  // unit normals of the edge planes
};

Edges edge_normals(const Trixel& t) {
  Edges e;
  for (int i = 0; i < 3; ++i) {
    const Vec3 n = cross(t.v[i], t.v[(i + 1) % 3]);
    const double len = n.norm();
    e.normal[i] = {n.x / len, n.y / len, n.z / len};
  }
  return e;
}

// Sound intersection test between a trixel and a closed cap of radius at
// most pi/2: false only when the two certainly do not meet.
bool intersects(const Trixel& t, const Edges& e, const Vec3& c, double radius) {
  for (const auto& v : t.v) {
    if (angular_distance(c, v) <= radius + kSlack) return true;
  }
  if (dot(e.normal[0], c) >= -kSlack && dot(e.normal[1], c) >= -kSlack && dot(e.normal[2], c) >= -kSlack) {
    return true;
  }
  const double reach = radius + kSlack;
  for (int i = 0; i < 3; ++i) {
    const Vec3& m = e.normal[i];
    const double s = dot(c, m);
    if (reach < kPi / 2 && std::abs(s) > std::sin(reach)) continue;
    const Vec3 foot = c - m * s;
    const double len = foot.norm();
    if (len < 1e-12) return true;
    const Vec3& a = t.v[i];
    const Vec3& b = t.v[(i + 1) % 3];
    if (dot(cross(a, foot), m) >= -kSlack * len && dot(cross(foot, b), m) >= -kSlack * len) return true;
  }
  return false;
}

Coverage classify_cap(const Trixel& t, const Edges& e, const Cap& cap) {
  if (cap.radius >= kPi) return Coverage::Full;
  if (cap.radius <= kPi / 2) {
    const bool all_in = std::all_of(t.v.begin(), t.v.end(), [&](const Vec3& v) {
      return angular_distance(cap.center, v) <= cap.radius - kSlack;
    });
    if (all_in) return Coverage::Full;
    return intersects(t, e, cap.center, cap.radius) ? Coverage::Partial : Coverage::Disjoint;
  }
  // Larger than a hemisphere: reason about the (convex) complement cap.
  const Vec3 anti = -cap.center;
  const double comp = kPi - cap.radius;
  if (!intersects(t, e, anti, comp)) return Coverage::Full;
  const bool all_out = std::all_of(t.v.begin(), t.v.end(),
                                   [&](const Vec3& v) { return angular_distance(anti, v) < comp - kSlack; });
  return all_out ? Coverage::Disjoint : Coverage::Partial;
}

Coverage classify_convex(const Trixel& t, const Edges& e, const Convex& convex) {
  bool all_full = true;
  for (const auto& h : convex.halfspaces) {
    const Coverage c = classify_cap(t, e, halfspace_cap(h));
    if (c == Coverage::Disjoint) return Coverage::Disjoint;
    if (c != Coverage::Full) all_full = false;
  }
  return all_full ? Coverage::Full : Coverage::Partial;
}

double bounding_radius_arcmin(const Convex& c) {
  double r = 10800.0;
  for (const auto& h : c.halfspaces) {
    r = std::min(r, rad_to_arcmin(std::acos(std::clamp(h.offset, -1.0, 1.0))));
  }
  return r;
}

}  // namespace

Coverage classify(const Trixel& t, const Area& a) {
  const Edges e = edge_normals(t);
  if (const auto* c = std::get_if<Circle>(&a.shape)) return classify_cap(t, e, circle_cap(*c));
  if (const auto* cv = std::get_if<Convex>(&a.shape)) return classify_convex(t, e, *cv);
  bool all_disjoint = true;
  for (const auto& cv : std::get<Domain>(a.shape).convexes) {
    const Coverage c = classify_convex(t, e, cv);
    if (c == Coverage::Full) return Coverage::Full;
    if (c != Coverage::Disjoint) all_disjoint = false;
  }
  return all_disjoint ? Coverage::Disjoint : Coverage::Partial;
}

Coverage classify(HtmId t, const Area& a) { return classify(vertices(t), a); }

int default_cover_depth(const Area& a) {
  double radius = 0.0;
  if (const auto* c = std::get_if<Circle>(&a.shape)) {
    radius = c->radius_arcmin;
  } else if (const auto* cv = std::get_if<Convex>(&a.shape)) {
    radius = bounding_radius_arcmin(*cv);
  } else {
    for (const auto& cv : std::get<Domain>(a.shape).convexes) radius = std::max(radius, bounding_radius_arcmin(cv));
  }
  for (int d = kMinDefaultCoverDepth; d <= kMaxDefaultCoverDepth; ++d) {
    if (trixel_scale_arcmin(d) <= radius / 4.0) return d;
  }
  return kMaxDefaultCoverDepth;
}

std::vector<TrixelRange> cover(const Area& a, std::optional<int> depth) {
  const int target = a.declared_depth ? *a.declared_depth : depth ? *depth : default_cover_depth(a);
  if (target < 0 || target > kMaxHtmDepth) throw std::out_of_range("cover depth must be 0..20");

  struct Pending {
    std::uint64_t id;
    int depth;
    Trixel trixel;
  };
  std::vector<Pending> stack;
  for (int f = 7; f >= 0; --f) stack.push_back({8u + static_cast<std::uint64_t>(f), 0, face_trixel(f)});

  std::vector<TrixelRange> out;
  const auto emit = [&](std::uint64_t start, std::uint64_t end) {
    if (!out.empty() && out.back().end.id() + 1 == start) {
      out.back().end = HtmId(end);
      return;
    }
    if (out.size() >= kMaxCoverRanges) throw CoverError("cover exceeds the range budget");
    out.push_back(TrixelRange{HtmId(start), HtmId(end)});
  };

  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const Coverage c = classify(p.trixel, a);
    if (c == Coverage::Disjoint) continue;
    if (c == Coverage::Full || p.depth == target) {
      const int shift = 2 * (target - p.depth);
      emit(p.id << shift, ((p.id + 1) << shift) - 1);
      continue;
    }
    const auto kids = subdivide(p.trixel);
    for (int k = 3; k >= 0; --k) {
      stack.push_back({(p.id << 2) | static_cast<std::uint64_t>(k), p.depth + 1, kids[k]});
    }
  }
  return out;
}

std::vector<TrixelRange> lift_ranges(std::span<const TrixelRange> ranges, int target_depth) {
  std::vector<TrixelRange> out;
  out.reserve(ranges.size());
  for (const auto& r : ranges) {
    out.push_back(TrixelRange{subtree_range(r.start, target_depth).start, subtree_range(r.end, target_depth).end});
  }
  return out;
}

bool is_canonical(std::span<const TrixelRange> ranges) {
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].start.depth() != ranges[i].end.depth() || ranges[i].start > ranges[i].end) return false;
    if (i > 0 && ranges[i - 1].end.id() + 1 >= ranges[i].start.id()) return false;
  }
  return true;
}

std::vector<std::uint64_t> join_ranges(std::span<const TrixelRange> ranges, std::span<const std::uint64_t> sorted_ids) {
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].start > ranges[i].end || (i > 0 && ranges[i - 1].end >= ranges[i].start)) {
      throw std::invalid_argument("join_ranges: ranges are not sorted and disjoint");
    }
  }
  std::vector<std::uint64_t> out;
  std::size_t r = 0;
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < sorted_ids.size(); ++i) {
    const std::uint64_t id = sorted_ids[i];
    if (i > 0 && id < prev) throw std::invalid_argument("join_ranges: ids are not sorted");
    prev = id;
    while (r < ranges.size() && ranges[r].end.id() < id) ++r;
    if (r < ranges.size() && id >= ranges[r].start.id()) out.push_back(id);
  }
  return out;
}

}  // namespace sky

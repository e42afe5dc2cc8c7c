#pragma once

// Hierarchical Triangular Mesh: trixel identifiers, point location and the
// prefix-range property of sorted IDs.
//
// Vertex convention (classic HTM layout):
//   corners v0=+z v1=+x v2=+y v3=-x v4=-y v5=-z
//   S0=(v1,v5,v2) S1=(v2,v5,v3) S2=(v3,v5,v4) S3=(v4,v5,v1)   ids  8..11
//   N0=(v1,v0,v4) N1=(v4,v0,v3) N2=(v3,v0,v2) N3=(v2,v0,v1)   ids 12..15
// Each trixel (a,b,c) splits into children
//   0=(a,w2,w1) 1=(b,w0,w2) 2=(c,w1,w0) 3=(w0,w1,w2)
// where w0=mid(b,c), w1=mid(c,a), w2=mid(a,b) (normalized midpoints).

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "skyserver/geometry.hpp"

namespace sky {

inline constexpr int kMaxHtmDepth = 20;

/// Trixel identifier. Valid ids lie in [8*4^depth, 16*4^depth); the depth is
/// implied by the bit width.
class HtmId {
 public:
  /// Throws std::invalid_argument when `id` is not a valid depth <= 20 trixel id.
  explicit HtmId(std::uint64_t id);

  static bool is_valid(std::uint64_t id);
  static HtmId face(int index);  // 0..7

  std::uint64_t id() const { return id_; }
  int depth() const;
  HtmId parent() const;
  HtmId child(int k) const;

  auto operator<=>(const HtmId&) const = default;

 private:
  struct Unchecked {};
  HtmId(Unchecked, std::uint64_t id) : id_(id) {}
  std::uint64_t id_;
};

/// Spherical triangle, counter-clockwise seen from outside the sphere.
struct Trixel {
  std::array<Vec3, 3> v;
};

/// Inclusive interval of same-depth trixel ids.
struct TrixelRange {
  HtmId start;
  HtmId end;

  int depth() const { return start.depth(); }
  bool contains(std::uint64_t id) const { return id >= start.id() && id <= end.id(); }
  bool operator==(const TrixelRange&) const = default;
};

/// Depth of a trixel id without validation (bit-width based).
int htm_depth_of(std::uint64_t id);

/// The depth-0 trixel vertices of face 0..7.
Trixel face_trixel(int face);

/// Children of `t` in child-index order.
std::array<Trixel, 4> subdivide(const Trixel& t);

/// Sign-test point-in-trixel with tolerance `tol` on each edge test.
bool trixel_contains(const Trixel& t, const Vec3& p, double tol = 0.0);

/// Trixel at `depth` containing `p`. A point on an edge goes to the first
/// child (in child-index order) that accepts it within 1e-15.
/// Throws std::out_of_range for depth outside [0, 20].
HtmId locate(const UnitVector& p, int depth);

Trixel vertices(HtmId h);

/// All depth-`target_depth` descendants of `h` as one contiguous range.
/// Throws std::invalid_argument when target_depth < h.depth() or > 20.
TrixelRange subtree_range(HtmId h, int target_depth);

/// Comma form: face 0..7 followed by child digits 0..3, e.g. "3,3,2,0".
/// Throws std::invalid_argument on malformed input.
HtmId name_to_id(std::string_view name);
std::string id_to_name(HtmId h);

/// Nominal trixel edge length at `depth`: 90 degrees halved per level.
double trixel_scale_arcmin(int depth);

/// Solid angle of a spherical triangle in steradians.
double trixel_solid_angle(const Trixel& t);

}  // namespace sky

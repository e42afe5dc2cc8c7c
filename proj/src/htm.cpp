#include "skyserver/htm.hpp"

#include <bit>
#include <charconv>
#include <stdexcept>
#include <string>

namespace sky {
namespace {

constexpr std::array<Vec3, 6> kCorners = {{
    {0.0, 0.0, 1.0},
    {1.0, 0.0, 0.0},
    {0.0, 1.0, 0.0},
    {-1.0, 0.0, 0.0},
    {0.0, -1.0, 0.0},
    {0.0, 0.0, -1.0},
}};

constexpr int kFaces[8][3] = {
    {1, 5, 2}, {2, 5, 3}, {3, 5, 4}, {4, 5, 1},  // S0..S3
    {1, 0, 4}, {4, 0, 3}, {3, 0, 2}, {2, 0, 1},  // N0..N3
};

constexpr double kEdgeTolerance = 1e-15;

Vec3 midpoint(const Vec3& a, const Vec3& b) {
  const Vec3 s = a + b;
  const double n = s.norm();
  return {s.x / n, s.y / n, s.z / n};
}

bool edge_ok(const Vec3& a, const Vec3& b, const Vec3& p, double tol) {
  return dot(cross(a, b), p) >= -tol;
}

}  // namespace

int htm_depth_of(std::uint64_t id) { return (std::bit_width(id) - 4) / 2; }

bool HtmId::is_valid(std::uint64_t id) {
  const int w = std::bit_width(id);
  return w >= 4 && (w % 2) == 0 && (w - 4) / 2 <= kMaxHtmDepth;
}

HtmId::HtmId(std::uint64_t id) : id_(id) {
  if (!is_valid(id)) {
    throw std::invalid_argument("invalid HTM id " + std::to_string(id));
  }
}

HtmId HtmId::face(int index) {
  if (index < 0 || index > 7) throw std::invalid_argument("HTM face index must be 0..7");
  return HtmId(Unchecked{}, 8u + static_cast<std::uint64_t>(index));
}

int HtmId::depth() const { return htm_depth_of(id_); }

HtmId HtmId::parent() const {
  if (depth() == 0) throw std::logic_error("depth-0 trixel has no parent");
  return HtmId(Unchecked{}, id_ >> 2);
}

HtmId HtmId::child(int k) const {
  if (k < 0 || k > 3) throw std::invalid_argument("child index must be 0..3");
  if (depth() >= kMaxHtmDepth) throw std::logic_error("depth-20 trixel has no children");
  return HtmId(Unchecked{}, (id_ << 2) | static_cast<std::uint64_t>(k));
}

Trixel face_trixel(int face) {
  const auto& f = kFaces[face];
  return Trixel{{kCorners[f[0]], kCorners[f[1]], kCorners[f[2]]}};
}

std::array<Trixel, 4> subdivide(const Trixel& t) {
  const auto& [a, b, c] = t.v;
  const Vec3 w0 = midpoint(b, c);
  const Vec3 w1 = midpoint(c, a);
  const Vec3 w2 = midpoint(a, b);
  return {{
      Trixel{{a, w2, w1}},
      Trixel{{b, w0, w2}},
      Trixel{{c, w1, w0}},
      Trixel{{w0, w1, w2}},
  }};
}

bool trixel_contains(const Trixel& t, const Vec3& p, double tol) {
  return edge_ok(t.v[0], t.v[1], p, tol) && edge_ok(t.v[1], t.v[2], p, tol) &&
         edge_ok(t.v[2], t.v[0], p, tol);
}

HtmId locate(const UnitVector& point, int depth) {
  if (depth < 0 || depth > kMaxHtmDepth) throw std::out_of_range("HTM depth must be 0..20");
  const Vec3& p = point.vec();

  // Face tests are exact: edge normals of the octahedron are axis vectors.
  int face = 0;
  while (face < 7 && !trixel_contains(face_trixel(face), p)) ++face;

  std::uint64_t id = 8u + static_cast<std::uint64_t>(face);
  Trixel t = face_trixel(face);
  for (int level = 0; level < depth; ++level) {
    const auto kids = subdivide(t);
    int k = 0;
    while (k < 3 && !trixel_contains(kids[k], p, kEdgeTolerance)) ++k;
    id = (id << 2) | static_cast<std::uint64_t>(k);
    t = kids[k];
  }
  return HtmId(id);
}

Trixel vertices(HtmId h) {
  const int depth = h.depth();
  const std::uint64_t id = h.id();
  Trixel t = face_trixel(static_cast<int>((id >> (2 * depth)) - 8u));
  for (int level = depth - 1; level >= 0; --level) {
    const int k = static_cast<int>((id >> (2 * level)) & 3u);
    t = subdivide(t)[k];
  }
  return t;
}

TrixelRange subtree_range(HtmId h, int target_depth) {
  if (target_depth < h.depth() || target_depth > kMaxHtmDepth) {
    throw std::invalid_argument("subtree_range: target depth must be in [h.depth, 20]");
  }
  const int shift = 2 * (target_depth - h.depth());
  return TrixelRange{HtmId(h.id() << shift), HtmId(((h.id() + 1) << shift) - 1)};
}

HtmId name_to_id(std::string_view name) {
  std::uint64_t id = 0;
  int tokens = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = name.find(',', pos);
    std::string_view tok = name.substr(pos, comma == std::string_view::npos ? name.npos : comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    int digit = -1;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), digit);
    if (tok.empty() || ec != std::errc{} || end != tok.data() + tok.size()) {
      throw std::invalid_argument("malformed trixel name token '" + std::string(tok) + "'");
    }
    if (tokens == 0) {
      if (digit < 0 || digit > 7) throw std::invalid_argument("trixel face must be 0..7");
      id = 8u + static_cast<std::uint64_t>(digit);
    } else {
      if (digit < 0 || digit > 3) throw std::invalid_argument("trixel child digit must be 0..3");
      if (tokens > kMaxHtmDepth) throw std::invalid_argument("trixel name deeper than 20");
      id = (id << 2) | static_cast<std::uint64_t>(digit);
    }
    ++tokens;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return HtmId(id);
}

std::string id_to_name(HtmId h) {
  const int depth = h.depth();
  const std::uint64_t id = h.id();
  std::string out = std::to_string((id >> (2 * depth)) - 8u);
  for (int level = depth - 1; level >= 0; --level) {
    out += ',';
    out += static_cast<char>('0' + ((id >> (2 * level)) & 3u));
  }
  return out;
}

double trixel_scale_arcmin(int depth) { return 5400.0 / static_cast<double>(1ull << depth); }

double trixel_solid_angle(const Trixel& t) {
  // Van Oosterom-Strackee, with the triple product taken on edge differences
  // so that tiny triangles keep their precision.
  const auto& [a, b, c] = t.v;
  const double triple = dot(a, cross(b - a, c - a));
  const double denom = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  return 2.0 * std::atan2(std::abs(triple), denom);
}

}  // namespace sky

#pragma once

// Regions on the unit sphere and the textual area language:
//
//   CIRCLE J2000 [depth] ra dec radius_arcmin
//   CIRCLE CARTESIAN [depth] x y z radius_arcmin
//   CONVEX J2000 depth n ra1 dec1 ... ran decn
//   CONVEX CARTESIAN x1 y1 z1 ... xn yn zn
//   DOMAIN depth k  n1 x y z d ...  n2 x y z d ...  ...  nk x y z d ...
//
// Keywords are case-insensitive and commas separate tokens like whitespace.
// Polygons must be counter-clockwise seen from outside the sphere.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "skyserver/geometry.hpp"

namespace sky {

class AreaParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Points p with normal . p >= offset.
struct Halfspace {
  UnitVector normal;
  double offset = 0.0;

  bool contains(const UnitVector& p) const { return dot(normal, p) >= offset; }
};

struct Circle {
  UnitVector center;
  double radius_arcmin = 0.0;  // [0, 10800]
};

struct Convex {
  std::vector<Halfspace> halfspaces;
  // Polygon corners when the convex was given as a polygon; used only for
  // serialization.
  std::vector<UnitVector> corners;
};

struct Domain {
  std::vector<Convex> convexes;
};

struct Area {
  std::variant<Circle, Convex, Domain> shape;
  std::optional<int> declared_depth;
};

Area make_circle(const UnitVector& center, double radius_arcmin,
                 std::optional<int> declared_depth = std::nullopt);

/// Convex polygon from counter-clockwise corners; each edge becomes an
/// offset-0 halfspace. Throws AreaParseError for fewer than 3 corners,
/// degenerate edges, clockwise or non-convex input.
Convex polygon_convex(const std::vector<UnitVector>& corners);

/// Throws AreaParseError on any grammar violation.
Area parse_area(std::string_view text);

/// Canonical text form that parses back to a structurally equal Area.
/// Throws std::invalid_argument for a convex/domain with neither a declared
/// depth nor polygon corners (no textual production exists for it).
std::string serialize(const Area& area);

bool contains(const Area& area, const UnitVector& p);
bool contains(const Convex& convex, const UnitVector& p);

/// Same shape kind, same declared depth, and all numbers within `tol`.
bool structurally_equal(const Area& a, const Area& b, double tol = 1e-12);

}  // namespace sky

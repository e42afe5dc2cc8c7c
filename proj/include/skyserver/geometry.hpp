#pragma once

// Spherical coordinate primitives shared by every other module.
// Angles are radians internally; degrees and arcminutes appear only at
// API boundaries.

#include <cmath>
#include <numbers>

namespace sky {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kArcminPerRadian = 10800.0 / kPi;

constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }
constexpr double arcmin_to_rad(double arcmin) { return arcmin / kArcminPerRadian; }
constexpr double rad_to_arcmin(double rad) { return rad * kArcminPerRadian; }

/// Plain 3-vector; no normalization invariant.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// A direction on the unit sphere: x^2 + y^2 + z^2 = 1 within 1e-12.
class UnitVector {
 public:
  /// The north pole, +z.
  constexpr UnitVector() : v_{0.0, 0.0, 1.0} {}

  /// Normalizes `v`. Throws std::invalid_argument for a zero or non-finite vector.
  static UnitVector normalize(const Vec3& v);
  static UnitVector normalize(double x, double y, double z) { return normalize(Vec3{x, y, z}); }

  /// Wraps components already known to be unit length (within 1e-12).
  static constexpr UnitVector from_unit(const Vec3& v) { return UnitVector(v); }

  constexpr double x() const { return v_.x; }
  constexpr double y() const { return v_.y; }
  constexpr double z() const { return v_.z; }
  constexpr const Vec3& vec() const { return v_; }
  constexpr UnitVector operator-() const { return UnitVector(-v_); }
  constexpr bool operator==(const UnitVector&) const = default;

 private:
  constexpr explicit UnitVector(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

constexpr double dot(const UnitVector& a, const UnitVector& b) { return dot(a.vec(), b.vec()); }

/// J2000 right ascension / declination. ra is normalized into [0, 360);
/// dec outside [-90, 90] (or any non-finite input) throws std::out_of_range.
class EquatorialCoord {
 public:
  EquatorialCoord(double ra_deg, double dec_deg);

  double ra_deg() const { return rad_to_deg(ra_rad_); }
  double dec_deg() const { return rad_to_deg(dec_rad_); }
  double ra_rad() const { return ra_rad_; }
  double dec_rad() const { return dec_rad_; }

 private:
  struct Radians {};
  EquatorialCoord(Radians, double ra_rad, double dec_rad) : ra_rad_(ra_rad), dec_rad_(dec_rad) {}
  friend EquatorialCoord xyz_to_eq(const UnitVector& v);

  double ra_rad_;
  double dec_rad_;
};

UnitVector eq_to_xyz(const EquatorialCoord& c);
UnitVector eq_to_xyz(double ra_deg, double dec_deg);

/// Inverse of eq_to_xyz. At the poles ra is 0.
EquatorialCoord xyz_to_eq(const UnitVector& v);

/// Great-circle separation in radians, atan2(|a x b|, a . b).
double angular_distance(const Vec3& a, const Vec3& b);
inline double angular_distance(const UnitVector& a, const UnitVector& b) {
  return angular_distance(a.vec(), b.vec());
}

/// Great-circle separation in arcminutes, in [0, 10800].
inline double arc_distance_arcmin(const UnitVector& a, const UnitVector& b) {
  return rad_to_arcmin(angular_distance(a, b));
}

/// Any unit vector orthogonal to `v`; with `v` and their cross product it
/// forms a right-handed tangent frame.
UnitVector orthogonal_to(const UnitVector& v);

/// The point `distance_rad` away from `from` along the great circle whose
/// initial direction is orthogonal_to(from) rotated by `bearing_rad`.
UnitVector offset_point(const UnitVector& from, double distance_rad, double bearing_rad);

}  // namespace sky

#include "skyserver/geometry.hpp"

#include <stdexcept>

namespace sky {

UnitVector UnitVector::normalize(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  }
  return UnitVector(Vec3{v.x / n, v.y / n, v.z / n});
}

EquatorialCoord::EquatorialCoord(double ra_deg, double dec_deg) {
  if (!std::isfinite(ra_deg) || !std::isfinite(dec_deg)) {
    throw std::out_of_range("ra/dec must be finite");
  }
  if (dec_deg < -90.0 || dec_deg > 90.0) {
    throw std::out_of_range("dec out of range [-90, 90]");
  }
  double ra = std::fmod(ra_deg, 360.0);
  if (ra < 0.0) ra += 360.0;
  if (ra >= 360.0) ra = 0.0;
  ra_rad_ = deg_to_rad(ra);
  dec_rad_ = deg_to_rad(dec_deg);
}

UnitVector eq_to_xyz(const EquatorialCoord& c) {
  const double cd = std::cos(c.dec_rad());
  return UnitVector::from_unit(
      Vec3{cd * std::cos(c.ra_rad()), cd * std::sin(c.ra_rad()), std::sin(c.dec_rad())});
}

UnitVector eq_to_xyz(double ra_deg, double dec_deg) {
  return eq_to_xyz(EquatorialCoord(ra_deg, dec_deg));
}

EquatorialCoord xyz_to_eq(const UnitVector& v) {
  const double rho = std::hypot(v.x(), v.y());
  const double dec = std::atan2(v.z(), rho);
  double ra = 0.0;
  if (rho > 1e-15) {
    ra = std::atan2(v.y(), v.x());
    if (ra < 0.0) ra += 2.0 * kPi;
    if (ra >= 2.0 * kPi) ra = 0.0;
  }
  return EquatorialCoord(EquatorialCoord::Radians{}, ra, dec);
}

double angular_distance(const Vec3& a, const Vec3& b) {
  return std::atan2(cross(a, b).norm(), dot(a, b));
}

UnitVector orthogonal_to(const UnitVector& v) {
  // Cross with the axis least aligned with v.
  const double ax = std::abs(v.x()), ay = std::abs(v.y()), az = std::abs(v.z());
  Vec3 axis{0.0, 0.0, 1.0};
  if (ax <= ay && ax <= az) {
    axis = {1.0, 0.0, 0.0};
  } else if (ay <= az) {
    axis = {0.0, 1.0, 0.0};
  }
  return UnitVector::normalize(cross(v.vec(), axis));
}

UnitVector offset_point(const UnitVector& from, double distance_rad, double bearing_rad) {
  const UnitVector u = orthogonal_to(from);
  const Vec3 w = cross(from.vec(), u.vec());
  const Vec3 dir = u.vec() * std::cos(bearing_rad) + w * std::sin(bearing_rad);
  return UnitVector::normalize(from.vec() * std::cos(distance_rad) + dir * std::sin(distance_rad));
}

}  // namespace sky

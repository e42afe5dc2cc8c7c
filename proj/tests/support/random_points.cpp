#include "support/random_points.hpp"

#include <cmath>

namespace sky::testing {

double Sampler::uniform(double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
}

std::uint64_t Sampler::below(std::uint64_t n) { return rng_() % n; }

UnitVector Sampler::sphere_point() {
  const double z = uniform(-1.0, 1.0);
  const double phi = uniform(0.0, 2.0 * kPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return UnitVector::normalize(r * std::cos(phi), r * std::sin(phi), z);
}

UnitVector Sampler::cap_point(const UnitVector& center, double radius_arcmin) {
  const double radius = arcmin_to_rad(radius_arcmin);
  const double cos_d = uniform(std::cos(radius), 1.0);
  const double d = std::acos(std::min(1.0, cos_d));
  return offset_point(center, d, uniform(0.0, 2.0 * kPi));
}

HtmId Sampler::trixel(int depth) {
  const std::uint64_t lo = 8ull << (2 * depth);
  return HtmId(lo + below(lo));
}

UnitVector Sampler::interior_point(const Trixel& t, double margin) {
  const double span = 1.0 - 3.0 * margin;
  double a = uniform(), b = uniform();
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  const double w0 = margin + span * a;
  const double w1 = margin + span * b;
  const double w2 = 1.0 - w0 - w1;
  return UnitVector::normalize(t.v[0] * w0 + t.v[1] * w1 + t.v[2] * w2);
}

}  // namespace sky::testing

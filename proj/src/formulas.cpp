#include "skyserver/formulas.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sky {

double surface_brightness_rho(double radius_arcsec) {
  if (!(radius_arcsec > 0.0)) throw std::domain_error("surface_brightness_rho: radius must be positive");
  return -5.0 * std::log10(radius_arcsec) - 2.5 * std::log10(std::numbers::pi);
}

double line_width_kms(double sigma, double wave) {
  if (!(wave > 0.0)) throw std::domain_error("line_width_kms: wave must be positive");
  if (sigma < 0.0) throw std::domain_error("line_width_kms: sigma must be non-negative");
  return sigma * 300000.0 / wave;
}

double velocity(double rowv, double colv) { return std::sqrt(rowv * rowv + colv * colv); }

bool quasar_color_cut(double u, double g, double r, double i, double z) {
  return (u - g > 2.0 || u > 22.3) && (i >= 0.0 && i <= 19.0) && (g - r > 1.0) &&
         (r - i < 0.08 + 0.42 * (g - r - 0.96) || g - r > 2.26) && (i - z < 0.25);
}

long long round_half_away(double x) { return static_cast<long long>(std::round(x)); }

std::array<long long, 4> color_bin(double u, double g, double r, double i, double z) {
  return {round_half_away(u - g), round_half_away(g - r), round_half_away(r - i), round_half_away(i - z)};
}

}  // namespace sky

#pragma once

// Scalar formulas shared by the query plans and the synthetic generator.

#include <array>

namespace sky {

/// rho = -5 log10(R) - 2.5 log10(pi), R in arcsec. Throws std::domain_error
/// for R <= 0.
double surface_brightness_rho(double radius_arcsec);

/// sigma * 300000 / wave, in km/s. Throws std::domain_error for wave <= 0 or
/// sigma < 0.
double line_width_kms(double sigma, double wave);

double velocity(double rowv, double colv);

bool quasar_color_cut(double u, double g, double r, double i, double z);

/// Round half away from zero, as an integer.
long long round_half_away(double x);

/// (u-g, g-r, r-i, i-z) rounded to integers.
std::array<long long, 4> color_bin(double u, double g, double r, double i, double z);

/// Rows with u+g+r+i+z >= 150 carry bogus (999) magnitudes.
inline bool magnitudes_plausible(double u, double g, double r, double i, double z) {
  return (u + g + r + i + z) < 150.0;
}

}  // namespace sky

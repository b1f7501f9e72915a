#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace fraclab {

struct PowerLaw {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double prefactor = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
};

// Least-squares line through (log x, log y) over pairs with x, y > 0.
inline PowerLaw fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  PowerLaw fit;
  fit.points = n;
  if (n < 2) return fit;
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (den <= 0.0) return fit;
  fit.exponent = (dn * sxy - sx * sy) / den;
  fit.prefactor = std::exp((sy - fit.exponent * sx) / dn);
  return fit;
}

}  // namespace fraclab

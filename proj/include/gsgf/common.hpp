#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gsgf {

using ComplexArray = std::vector<std::complex<double>>;
using RealArray = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Box volume (2*pi)^d.
inline double box_volume(int dim) {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= kTwoPi;
  return v;
}

}  // namespace gsgf

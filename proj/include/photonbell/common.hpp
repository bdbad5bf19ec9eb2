#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace photonbell {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Thrown when a source/detector pair is not connected by the interferometer.
class geometry_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a quantity is undefined because its denominator vanishes
/// (zero total density, zero detector flux, zero amplitude sum).
class degenerate_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Reduce an angle to [0, 2*pi).
inline double wrap_phase(double phase) {
  double r = std::fmod(phase, two_pi);
  if (r < 0.0)
    r += two_pi;
  if (r >= two_pi)
    r = 0.0;
  return r;
}

} // namespace photonbell

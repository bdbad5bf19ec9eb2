#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <photonbell/common.hpp>

namespace photonbell {

/// Node count of the periodic rule. Equally spaced nodes over one period
/// integrate trigonometric polynomials of degree < node count exactly (to
/// roundoff); every integrand in this project has degree <= 4 in omega*t
/// and the theta kernels stay below degree 8.
inline constexpr int period_nodes = 64;

/// Mean of f over one period [0, period), equally spaced rule.
/// Non-finite samples are rejected rather than averaged away.
template <class F>
double periodic_average(F &&f, double period, int nodes = period_nodes) {
  if (!(period > 0.0))
    throw std::invalid_argument("periodic_average: period must be positive");
  const double h = period / nodes;
  double acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double v = f(k * h);
    if (!std::isfinite(v))
      throw std::domain_error("periodic_average: integrand is not finite");
    acc += v;
  }
  return acc / nodes;
}

/// Mean of f over the hidden phase theta in [0, 2*pi).
template <class F> double phase_average(F &&f, int nodes = period_nodes) {
  return periodic_average(std::forward<F>(f), two_pi, nodes);
}

} // namespace photonbell

#pragma once

#include <functional>

#include <photonbell/common.hpp>

namespace photonbell {

/// The four CHSH phase settings: a, a' on the theta_i side, b, b' on the
/// theta_j side. Kept in [0, 2*pi).
struct ChshSetting {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;

  bool operator==(const ChshSetting &) const = default;
};

/// Correlation as a function of the two setting phases (theta_i, theta_j).
using CorrelationFn = std::function<double(double, double)>;

/// S = E(a,b) + E(a,b') + E(a',b) - E(a',b'). |S| <= 2 for any local
/// hidden-variable correlation with +/-1 outcomes; violated means |S| > 2.
struct ChshResult {
  double ab = 0.0;
  double ab_prime = 0.0;
  double a_prime_b = 0.0;
  double a_prime_b_prime = 0.0;
  double s = 0.0;
  bool violated = false;
};

/// Evaluate the CHSH statistic at one setting. Throws std::domain_error
/// if the correlation returns a non-finite value.
ChshResult chsh_statistic(const ChshSetting &setting,
                          const CorrelationFn &corr);

/// A maximizing setting together with its statistic.
struct ViolationSearch {
  ChshSetting setting;
  ChshResult result;
};

/// Exhaustive search of |S| over all settings with phases on the uniform
/// grid k * 2*pi/grid_resolution. Correlations are evaluated once per
/// phase pair; ties resolve to the lexicographically smallest index tuple
/// (a, a', b, b'). Requires grid_resolution >= 8.
ViolationSearch find_max_violation(const CorrelationFn &corr,
                                   int grid_resolution);

} // namespace photonbell

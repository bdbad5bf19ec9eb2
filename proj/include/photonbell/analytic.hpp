#pragma once

#include <optional>
#include <utility>

#include <photonbell/model.hpp>
#include <photonbell/quadrature.hpp>

namespace photonbell {

/// One-period time average <f> = (1/T) int_0^T f(t) dt, T = 2*pi/omega.
/// The integrands of this model are trigonometric polynomials in omega*t,
/// so the one-period mean already equals the long-time limit. Relative
/// quadrature error is at roundoff level (rule exact below degree 64).
template <class F> double time_average(F &&f, double omega) {
  if (!(omega > 0.0))
    throw std::invalid_argument("time_average: omega must be positive");
  return periodic_average(std::forward<F>(f), two_pi / omega);
}

/// Expected number of photons of each state absorbed by one detector over
/// a period, at fixed hidden phase.
struct ExpectedCounts {
  double plus = 0.0;
  double minus = 0.0;
};

/// <(h_+/-(coherent) + h_+/-(theta)) * p_detector> by time quadrature.
/// Both components are nonnegative.
ExpectedCounts expected_counts(Detector detector, double theta,
                               const ExperimentConfig &cfg,
                               DetectorModelKind kind);

/// Expected photon numbers I_1..I_4 at fixed hidden phase (opposite states
/// annihilate during absorption, so each is |E_plus - E_minus|).
struct IntensityQuad {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double i4 = 0.0;
};

/// Closed forms of I_1..I_4 for the Symmetric law:
///   I_1/I_2 = (C/16)|a + b/2 +/- (a + b/2) cos(theta - theta_i)|
///   I_3/I_4 = (C/16)|a + b/2 -/+ (a + b/2) sin(theta - theta_j)|
IntensityQuad intensities_closed_form(double theta,
                                      const ExperimentConfig &cfg);

/// I_1..I_4 through the expected-count quadrature path. For the Symmetric
/// law this agrees with intensities_closed_form to better than 1e-10.
IntensityQuad intensities_quadrature(double theta,
                                     const ExperimentConfig &cfg,
                                     DetectorModelKind kind);

/// Moments of the homodyne difference signals over the hidden phase,
/// theta uniform on [0, 2*pi).
struct ThetaMoments {
  double var12 = 0.0;          ///< Var(I1 - I2)
  double var34 = 0.0;          ///< Var(I3 - I4)
  double cov = 0.0;            ///< Cov(I1 - I2, I3 - I4)
  std::optional<double> rho;   ///< correlation; empty when a variance vanishes
};

/// Variances, covariance and correlation of (I1 - I2, I3 - I4) by phase
/// quadrature. For the Symmetric law:
///   var12 = var34 = C^2 (beta + 2 alpha)^2 / 512,
///   rho   = -sin(theta_i - theta_j).
/// A vanishing variance (e.g. alpha = beta = 0) yields an empty rho
/// rather than NaN.
ThetaMoments theta_moments(const ExperimentConfig &cfg,
                           DetectorModelKind kind);

/// The two nested second moments whose order of averaging does not
/// commute for the intensity signals.
struct AveragingOrderGap {
  double var_theta_of_time_mean = 0.0; ///< Var_theta( E_t(D+) )
  double var_time_of_theta_mean = 0.0; ///< Var_t( E_theta(D+) )
};

/// Var_theta(E_t) vs Var_t(E_theta) of the +-state count at one detector,
/// both by nested quadrature. The two differ for every nondegenerate
/// configuration; discrete counts are insensitive to the order.
AveragingOrderGap averaging_order_gap(const ExperimentConfig &cfg,
                                      DetectorModelKind kind,
                                      Detector detector);

} // namespace photonbell

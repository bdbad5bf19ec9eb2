#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <photonbell/analytic.hpp>
#include <photonbell/model.hpp>

namespace photonbell {

/// Sign convention of the conditional mean of Y.
///
/// IntensityRatio derives it from the intensity quotient,
///   E(Y|theta) = (I3 - I4)/(I3 + I4) = -sin(theta - theta_j),
/// which is the internally consistent choice and the default. PositiveSine
/// flips the sign to E(Y|theta) = +sin(theta - theta_j), the convention
/// sometimes quoted for this setup; it only mirrors the covariance.
enum class YSignConvention { IntensityRatio, PositiveSine };

/// Conditional means of the two homodyne count variables given the hidden
/// phase; both lie in [-1, 1].
struct ConditionalMeans {
  double x = 0.0; ///< E(X | theta) = cos(theta - theta_i)
  double y = 0.0; ///< E(Y | theta), sign per convention
};

/// Ratios (I1 - I2)/(I1 + I2) and (I3 - I4)/(I3 + I4) of the closed-form
/// intensities. Throws degenerate_error when a denominator vanishes
/// (efficiency * (alpha + beta/2) == 0).
ConditionalMeans conditional_expectations(
    double theta, const ExperimentConfig &cfg,
    YSignConvention convention = YSignConvention::IntensityRatio);

/// One trial: the hidden phase it was drawn at and the two +/-1 outcomes.
struct CountSample {
  double theta = 0.0;
  int x = 0;
  int y = 0;
};

/// Sampling plan. Trials are split into fixed-size chunks; chunk c is
/// generated by an engine seeded from (seed, c) alone, so identical
/// (n, seed, chunk) produce bit-identical streams for any worker count.
struct SamplerSpec {
  std::uint64_t n = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t chunk = 65'536;

  bool operator==(const SamplerSpec &) const = default;
};

/// Engine seed of one chunk.
std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk_index);

/// Draw the +/-1 pair at a fixed hidden phase: X = +1 with probability
/// (1 + E(X|theta))/2 and, independently, Y = +1 with probability
/// (1 + E(Y|theta))/2. Conditional independence given theta is the
/// locality condition; each outcome depends only on its local setting.
/// Consumes exactly two engine values (x first).
CountSample sample_trial(double theta, const ConditionalMeans &means,
                         std::mt19937_64 &rng);

/// Running sums of +/-1 trials. Integer-exact, so merging is associative
/// and the result is independent of how work was distributed.
struct CountMoments {
  std::uint64_t n = 0;
  std::int64_t x_sum = 0;
  std::int64_t y_sum = 0;
  std::int64_t xy_sum = 0;

  void add(int x, int y) {
    ++n;
    x_sum += x;
    y_sum += y;
    xy_sum += x * y;
  }
  void merge(const CountMoments &other) {
    n += other.n;
    x_sum += other.x_sum;
    y_sum += other.y_sum;
    xy_sum += other.xy_sum;
  }

  bool operator==(const CountMoments &) const = default;
};

/// Materialized sample stream in chunk order. Per trial the engine
/// consumes three values: theta, then the two outcome draws.
std::vector<CountSample> sample_counts(
    const SamplerSpec &spec, const ExperimentConfig &cfg,
    YSignConvention convention = YSignConvention::IntensityRatio);

/// Accumulated moments of the same stream, chunks distributed over
/// `workers` threads and merged in chunk order. Bit-identical to the
/// single-threaded result for every worker count.
CountMoments accumulate_moments(
    const SamplerSpec &spec, const ExperimentConfig &cfg,
    YSignConvention convention = YSignConvention::IntensityRatio,
    unsigned workers = 1);

/// An estimator value with its standard error.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;

  bool operator==(const Estimate &) const = default;
};

/// Sample mean of X with plug-in standard error sqrt((1 - m^2)/n).
Estimate mean_x_estimate(const CountMoments &m);
/// Sample mean of Y with plug-in standard error.
Estimate mean_y_estimate(const CountMoments &m);

/// Sample covariance mean(XY) - mean(X) mean(Y); for these zero-mean
/// unit-variance +/-1 variables it is also the correlation estimate. The
/// standard error is the plug-in error of the product moment,
/// sqrt((1 - mean(XY)^2)/n). Requires n >= 2.
Estimate covariance_estimate(const CountMoments &m);

/// Covariance of a materialized stream.
Estimate estimate_correlation(std::span<const CountSample> samples);

/// Deterministic target of the covariance estimator: the phase-quadrature
/// value of E_theta[E(X|theta) E(Y|theta)], which conditional independence
/// makes equal to Cov(X, Y). Equals -(1/2) sin(theta_i - theta_j) under
/// the IntensityRatio convention.
double covariance_oracle(
    const ExperimentConfig &cfg,
    YSignConvention convention = YSignConvention::IntensityRatio);

} // namespace photonbell

#include <photonbell/analytic.hpp>

#include <cmath>
#include <vector>

namespace photonbell {

namespace {

// Relative scale below which a standard deviation counts as zero; guards
// the correlation against roundoff residue of identically-constant
// difference signals.
constexpr double degenerate_sd_ratio = 1e-9;

double variance(const std::vector<double> &v, double mean) {
  double acc = 0.0;
  for (double x : v) {
    const double d = x - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(v.size());
}

double mean_of(const std::vector<double> &v) {
  double acc = 0.0;
  for (double x : v)
    acc += x;
  return acc / static_cast<double>(v.size());
}

} // namespace

ExpectedCounts expected_counts(Detector detector, double theta,
                               const ExperimentConfig &cfg,
                               DetectorModelKind kind) {
  const Source coherent = coherent_source_of(detector);
  const DetectorModel model{kind, detector, std::nullopt};

  const auto component = [&](bool plus) {
    return time_average(
        [&](double t) {
          const SignedDensity du = detector_density(detector, Source::U, cfg,
                                                    theta, t);
          const SignedDensity dc =
              detector_density(detector, coherent, cfg, theta, t);
          const double h = plus ? du.plus + dc.plus : du.minus + dc.minus;
          return h * detection_probability(model, cfg, theta, t);
        },
        cfg.omega);
  };

  return {component(true), component(false)};
}

IntensityQuad intensities_closed_form(double theta,
                                      const ExperimentConfig &cfg) {
  const double amp = 0.0625 * cfg.efficiency * (cfg.alpha + 0.5 * cfg.beta);
  const double c = std::cos(theta - cfg.theta_i);
  const double s = std::sin(theta - cfg.theta_j);
  return {std::abs(amp * (1.0 + c)), std::abs(amp * (1.0 - c)),
          std::abs(amp * (1.0 - s)), std::abs(amp * (1.0 + s))};
}

IntensityQuad intensities_quadrature(double theta,
                                     const ExperimentConfig &cfg,
                                     DetectorModelKind kind) {
  const auto intensity = [&](Detector d) {
    const ExpectedCounts e = expected_counts(d, theta, cfg, kind);
    return std::abs(e.plus - e.minus);
  };
  return {intensity(Detector::D1), intensity(Detector::D2),
          intensity(Detector::D3), intensity(Detector::D4)};
}

ThetaMoments theta_moments(const ExperimentConfig &cfg,
                           DetectorModelKind kind) {
  const int nodes = period_nodes;
  std::vector<double> d12(nodes), d34(nodes);
  double scale = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double theta = two_pi * k / nodes;
    const IntensityQuad q = intensities_quadrature(theta, cfg, kind);
    d12[k] = q.i1 - q.i2;
    d34[k] = q.i3 - q.i4;
    scale += q.i1 + q.i2 + q.i3 + q.i4;
  }
  scale /= nodes;

  ThetaMoments m;
  const double m12 = mean_of(d12);
  const double m34 = mean_of(d34);
  m.var12 = variance(d12, m12);
  m.var34 = variance(d34, m34);
  double cov = 0.0;
  for (int k = 0; k < nodes; ++k)
    cov += (d12[k] - m12) * (d34[k] - m34);
  m.cov = cov / nodes;

  const double sd12 = std::sqrt(m.var12);
  const double sd34 = std::sqrt(m.var34);
  if (scale > 0.0 && sd12 > degenerate_sd_ratio * scale &&
      sd34 > degenerate_sd_ratio * scale) {
    // Cauchy-Schwarz holds on the shared nodes, so only roundoff can push
    // the ratio past 1.
    const double r = m.cov / (sd12 * sd34);
    m.rho = std::clamp(r, -1.0, 1.0);
  }
  return m;
}

AveragingOrderGap averaging_order_gap(const ExperimentConfig &cfg,
                                      DetectorModelKind kind,
                                      Detector detector) {
  const Source coherent = coherent_source_of(detector);
  const DetectorModel model{kind, detector, std::nullopt};
  const int nodes = period_nodes;

  const auto plus_rate = [&](double theta, double t) {
    const SignedDensity du =
        detector_density(detector, Source::U, cfg, theta, t);
    const SignedDensity dc = detector_density(detector, coherent, cfg, theta, t);
    return (du.plus + dc.plus) * detection_probability(model, cfg, theta, t);
  };

  // Var over theta of the one-period time mean.
  std::vector<double> time_means(nodes);
  for (int k = 0; k < nodes; ++k) {
    const double theta = two_pi * k / nodes;
    time_means[k] =
        time_average([&](double t) { return plus_rate(theta, t); }, cfg.omega);
  }

  // Var over t of the phase mean.
  std::vector<double> phase_means(nodes);
  const double period = two_pi / cfg.omega;
  for (int k = 0; k < nodes; ++k) {
    const double t = period * k / nodes;
    phase_means[k] =
        phase_average([&](double theta) { return plus_rate(theta, t); });
  }

  return {variance(time_means, mean_of(time_means)),
          variance(phase_means, mean_of(phase_means))};
}

} // namespace photonbell

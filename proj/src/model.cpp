#include <photonbell/model.hpp>

#include <cmath>
#include <string>

#include <photonbell/quadrature.hpp>

namespace photonbell {

namespace {

const char *detector_name(Detector d) {
  switch (d) {
  case Detector::D1: return "D1";
  case Detector::D2: return "D2";
  case Detector::D3: return "D3";
  case Detector::D4: return "D4";
  }
  return "?";
}

const char *source_name(Source s) {
  switch (s) {
  case Source::U: return "u";
  case Source::AlphaI: return "alpha_i";
  case Source::AlphaJ: return "alpha_j";
  }
  return "?";
}

// Oscillation phases of the detector absorption laws. `coherent` and
// `unknown` are the offsets added to the local coherent phase and to the
// hidden phase under the Symmetric and AmplitudeWeighted laws;
// `coherent_only` is the offset used by the CoherentOnly law.
struct OscillationPhases {
  double coherent;
  double unknown;
  double coherent_only;
};

OscillationPhases oscillation_phases(Detector d) {
  switch (d) {
  case Detector::D1: return {pi / 2, pi / 2, pi / 2};
  case Detector::D2: return {pi, 0.0, 0.0};
  case Detector::D3: return {0.0, pi / 2, 0.0};
  case Detector::D4: return {pi / 2, 0.0, pi / 2};
  }
  throw std::invalid_argument("oscillation_phases: bad detector");
}

} // namespace

void ExperimentConfig::validate() const {
  if (!(alpha >= 0.0))
    throw std::invalid_argument("experiment.alpha: must be >= 0");
  if (!(beta >= 0.0))
    throw std::invalid_argument("experiment.beta: must be >= 0");
  if (!(efficiency > 0.0) || efficiency > 1.0)
    throw std::invalid_argument("experiment.efficiency: must be in (0, 1]");
  if (!(omega > 0.0))
    throw std::invalid_argument("experiment.omega: must be > 0");
  if (theta_i < 0.0 || theta_i >= two_pi)
    throw std::invalid_argument("experiment.theta_i: must be in [0, 2*pi)");
  if (theta_j < 0.0 || theta_j >= two_pi)
    throw std::invalid_argument("experiment.theta_j: must be in [0, 2*pi)");
}

double PathSpec::phase_shift() const {
  double shift = 0.0;
  for (SplitterAction a : events)
    if (a == SplitterAction::Reflect)
      shift += pi / 2;
  return shift;
}

double PathSpec::amplitude_factor() const {
  double factor = 1.0;
  for (std::size_t i = 0; i < events.size(); ++i)
    factor *= 0.5;
  return factor;
}

PathSpec path_to_detector(Source source, Detector detector) {
  using A = SplitterAction;
  // Layout: u meets BS3 then BS1 (down) or BS2 (through); alpha_i meets
  // BS1 only; alpha_j meets BS2 only.
  switch (source) {
  case Source::U:
    switch (detector) {
    case Detector::D1: return {source, {A::Reflect, A::Pass}};    // BS3, BS1
    case Detector::D2: return {source, {A::Reflect, A::Reflect}}; // BS3, BS1
    case Detector::D3: return {source, {A::Pass, A::Reflect}};    // BS3, BS2
    case Detector::D4: return {source, {A::Pass, A::Pass}};       // BS3, BS2
    }
    break;
  case Source::AlphaI:
    switch (detector) {
    case Detector::D1: return {source, {A::Reflect}}; // BS1
    case Detector::D2: return {source, {A::Pass}};    // BS1
    default: break;
    }
    break;
  case Source::AlphaJ:
    switch (detector) {
    case Detector::D3: return {source, {A::Pass}};    // BS2
    case Detector::D4: return {source, {A::Reflect}}; // BS2
    default: break;
    }
    break;
  }
  throw geometry_error(std::string("path_to_detector: source ") +
                       source_name(source) + " does not reach " +
                       detector_name(detector));
}

SignedDensity source_density(double t, double source_strength, double omega) {
  const double c = std::cos(omega * t);
  return {0.5 * source_strength * (1.0 + c),
          0.5 * source_strength * (1.0 - c)};
}

SignedDensity spherical_density(double t, double radius,
                                const PhysicalConstants &k) {
  if (!(radius > 0.0))
    throw std::invalid_argument("spherical_density: radius must be positive");
  const double geom =
      k.spherical_strength / (8.0 * pi * radius * radius);
  const double c = std::cos(k.omega * (t - radius / k.signal_speed));
  return {geom * (1.0 + c), geom * (1.0 - c)};
}

double scalar_field(const SignedDensity &d, double field_scale) {
  const double total = d.sum();
  if (!(total > 0.0))
    throw degenerate_error("scalar_field: total density vanishes");
  return field_scale * d.difference() / std::sqrt(total);
}

double mean_intensity(const PhysicalConstants &k, double radius) {
  if (!(radius > 0.0))
    throw std::invalid_argument("mean_intensity: radius must be positive");
  if (k.spherical_strength == 0.0 || k.field_scale == 0.0)
    return 0.0; // dark everywhere; the field itself is undefined pointwise
  return periodic_average(
      [&](double t) {
        const double e = scalar_field(spherical_density(t, radius, k),
                                      k.field_scale);
        return e * e;
      },
      two_pi / k.omega);
}

double absorption_probability(double t, double omega, double efficiency,
                              double psi) {
  return 0.5 * efficiency * (1.0 + std::cos(omega * t + psi));
}

Source coherent_source_of(Detector detector) {
  return (detector == Detector::D1 || detector == Detector::D2)
             ? Source::AlphaI
             : Source::AlphaJ;
}

SignedDensity detector_density(Detector detector, Source source,
                               const ExperimentConfig &cfg, double theta,
                               double t) {
  const PathSpec path = path_to_detector(source, detector);

  double base_amplitude = 0.0;
  double base_phase = 0.0;
  switch (source) {
  case Source::U:
    base_amplitude = 0.5 * cfg.beta;
    base_phase = theta;
    break;
  case Source::AlphaI:
    base_amplitude = 0.5 * cfg.alpha;
    base_phase = cfg.theta_i;
    break;
  case Source::AlphaJ:
    base_amplitude = 0.5 * cfg.alpha;
    base_phase = cfg.theta_j;
    break;
  }

  const double amplitude = base_amplitude * path.amplitude_factor();
  const double c = std::cos(cfg.omega * t + base_phase + path.phase_shift());
  return {amplitude * (1.0 + c), amplitude * (1.0 - c)};
}

double detection_probability(const DetectorModel &model,
                             const ExperimentConfig &cfg, double theta,
                             double t) {
  const OscillationPhases ph = oscillation_phases(model.detector);
  const double coherent_phase =
      (coherent_source_of(model.detector) == Source::AlphaI) ? cfg.theta_i
                                                             : cfg.theta_j;
  const double wt = cfg.omega * t;

  switch (model.kind) {
  case DetectorModelKind::Symmetric:
    return 0.25 * cfg.efficiency *
           (2.0 + std::cos(wt + coherent_phase + ph.coherent) +
            std::cos(wt + theta + ph.unknown));
  case DetectorModelKind::CoherentOnly:
    return 0.5 * cfg.efficiency *
           (1.0 + std::cos(wt + coherent_phase + ph.coherent_only));
  case DetectorModelKind::AmplitudeWeighted: {
    const double total = cfg.alpha + cfg.beta;
    if (!(total > 0.0))
      throw degenerate_error(
          "detection_probability: amplitude-weighted law needs "
          "alpha + beta > 0");
    return 0.5 * cfg.efficiency *
           (1.0 +
            (cfg.alpha * std::cos(wt + coherent_phase + ph.coherent) +
             cfg.beta * std::cos(wt + theta + ph.unknown)) /
                total);
  }
  }
  throw std::invalid_argument("detection_probability: bad model kind");
}

} // namespace photonbell

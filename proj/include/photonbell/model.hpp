#pragma once

#include <optional>
#include <vector>

#include <photonbell/common.hpp>

namespace photonbell {

/// The four photodetectors of the double-homodyne layout. D1/D2 form one
/// homodyne pair (mixed with the coherent reference alpha_i), D3/D4 the
/// other (mixed with alpha_j).
enum class Detector { D1, D2, D3, D4 };

/// Photon sources. U is the source under study with hidden phase theta;
/// AlphaI and AlphaJ are the coherent references with phases theta_i and
/// theta_j.
enum class Source { U, AlphaI, AlphaJ };

/// Constants of the point-source model. Dimensionless simulation units:
/// only phase differences matter, so omega defaults to 1 and the speed of
/// signal propagation enters solely through the retarded time t - r/c.
struct PhysicalConstants {
  double omega = 1.0;             ///< angular frequency (rad/time)
  double source_strength = 1.0;   ///< emission density scale of a source
  double spherical_strength = 1.0;///< density scale of the spherical expansion
  double field_scale = 1.0;       ///< scalar field unit
  double signal_speed = 1.0;      ///< propagation speed
};

/// Free parameters of the double-homodyne experiment.
///
/// Each coherent reference has amplitude alpha/2 at the source; the studied
/// source has amplitude beta/2. `efficiency` bounds every absorption
/// probability. Valid configurations satisfy alpha >= 0, beta >= 0,
/// 0 < efficiency <= 1; phases are kept in [0, 2*pi).
struct ExperimentConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double efficiency = 1.0;
  double theta_i = 0.0;
  double theta_j = 0.0;
  double omega = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const ExperimentConfig &) const = default;
};

/// Expected arrival densities of the two photon states at one point.
/// Both components are nonnegative everywhere; interference lives entirely
/// in their difference.
struct SignedDensity {
  double plus = 0.0;  ///< density of +-state photons
  double minus = 0.0; ///< density of --state photons

  double sum() const { return plus + minus; }
  double difference() const { return plus - minus; }
};

/// One interaction with a beam splitter.
enum class SplitterAction { Pass, Reflect };

/// Declarative path of a source beam through the interferometer. Every
/// splitter interaction halves the expected density; a reflection
/// additionally shifts the phase by pi/2, a pass adds nothing. Path-length
/// (k.x) phase contributions are neglected throughout: the layout is
/// symmetric and only phase differences are observable.
struct PathSpec {
  Source source = Source::U;
  std::vector<SplitterAction> events;

  /// Accumulated phase shift: pi/2 per reflection.
  double phase_shift() const;
  /// Density attenuation: one factor 1/2 per splitter interaction.
  double amplitude_factor() const;
};

/// Beam path from a source to a detector in the three-splitter layout.
/// U reaches all four detectors through two splitters; each coherent
/// reference reaches only its homodyne pair through one splitter.
/// Throws geometry_error for unreachable pairs.
PathSpec path_to_detector(Source source, Detector detector);

/// Which absorption-probability law a detector follows.
///
/// Symmetric:         the detector oscillates with both arriving phases in
///                    equal parts.
/// CoherentOnly:      the detector oscillates with its local coherent
///                    reference only; the hidden phase never enters.
/// AmplitudeWeighted: each arriving phase is weighted by the amplitude of
///                    its source.
enum class DetectorModelKind { Symmetric, CoherentOnly, AmplitudeWeighted };

/// A detector together with the absorption law in force. `psi` is the
/// randomized oscillation phase of the generic absorption law; the three
/// concrete laws fix their phases from theta, theta_i, theta_j and ignore
/// it. It is carried for randomized-phase studies.
struct DetectorModel {
  DetectorModelKind kind = DetectorModelKind::Symmetric;
  Detector detector = Detector::D1;
  std::optional<double> psi;
};

/// Expected density of photons emitted by a harmonically oscillating
/// source at time t: (A_s/2)(1 +/- cos(omega t)).
SignedDensity source_density(double t, double source_strength, double omega);

/// Expected density at distance r from a spherically symmetric source,
/// (A/(8 pi r^2))(1 +/- cos omega(t - r/c)). The sum of both components is
/// exactly A/(4 pi r^2). Throws std::invalid_argument for r <= 0.
SignedDensity spherical_density(double t, double radius,
                                const PhysicalConstants &k);

/// Scalar field carried by a density pair:
/// field_scale * (plus - minus) / sqrt(plus + minus).
/// Throws degenerate_error when the total density vanishes (a dark point).
double scalar_field(const SignedDensity &d, double field_scale);

/// One-period mean of the squared scalar field of a spherical source at
/// distance r; equals field_scale^2 A / (8 pi r^2). Computed by the
/// periodic rule, not transcribed, so it doubles as a consistency check of
/// the field definition. Throws std::invalid_argument for r <= 0.
double mean_intensity(const PhysicalConstants &k, double radius);

/// Generic absorption law of a periodically oscillating detector with
/// free phase psi: (C/2)(1 + cos(omega t + psi)).
double absorption_probability(double t, double omega, double efficiency,
                              double psi);

/// Expected density contributed by `source` at `detector`, with amplitude
/// and phase obtained by composing the beam path (never hard-coded).
/// Throws geometry_error when the pair is not connected.
SignedDensity detector_density(Detector detector, Source source,
                               const ExperimentConfig &cfg, double theta,
                               double t);

/// Absorption probability of the detector under the law selected by
/// `model.kind`. Always in [0, efficiency]. AmplitudeWeighted requires
/// alpha + beta > 0 (degenerate_error otherwise).
double detection_probability(const DetectorModel &model,
                             const ExperimentConfig &cfg, double theta,
                             double t);

/// Local coherent reference of a detector: theta_i for D1/D2, theta_j for
/// D3/D4.
Source coherent_source_of(Detector detector);

} // namespace photonbell

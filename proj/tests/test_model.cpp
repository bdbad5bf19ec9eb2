#include <doctest.h>

#include <cmath>
#include <random>

#include <photonbell/model.hpp>

using namespace photonbell;

namespace {

ExperimentConfig config(double alpha, double beta, double efficiency,
                        double theta_i, double theta_j) {
  return {alpha, beta, efficiency, theta_i, theta_j, 1.0};
}

} // namespace

TEST_CASE("source density splits the emission rate by photon state") {
  const SignedDensity peak = source_density(0.0, 1.0, 1.0);
  CHECK(peak.plus == doctest::Approx(1.0));
  CHECK(peak.minus == doctest::Approx(0.0));

  const SignedDensity trough = source_density(pi, 1.0, 1.0);
  CHECK(trough.plus == doctest::Approx(0.0));
  CHECK(trough.minus == doctest::Approx(1.0));

  const SignedDensity balanced = source_density(pi / 2, 2.0, 1.0);
  CHECK(balanced.plus == doctest::Approx(1.0));
  CHECK(balanced.minus == doctest::Approx(1.0));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const SignedDensity d = source_density(u(rng), 1.5, 2.3);
    CHECK(d.plus >= 0.0);
    CHECK(d.minus >= 0.0);
    CHECK(d.plus <= 1.5);
    CHECK(d.minus <= 1.5);
  }
}

TEST_CASE("spherical density conserves the total across phase") {
  PhysicalConstants k;
  k.spherical_strength = 8 * pi;

  // phase omega(t - r/c) = 0, pi/2, pi at r = 1
  const SignedDensity aligned = spherical_density(1.0, 1.0, k);
  CHECK(aligned.plus == doctest::Approx(2.0));
  CHECK(aligned.minus == doctest::Approx(0.0));

  const SignedDensity quarter = spherical_density(1.0 + pi / 2, 1.0, k);
  CHECK(quarter.plus == doctest::Approx(1.0));
  CHECK(quarter.minus == doctest::Approx(1.0));

  const SignedDensity opposed = spherical_density(1.0 + pi, 1.0, k);
  CHECK(opposed.plus == doctest::Approx(0.0));
  CHECK(opposed.minus == doctest::Approx(2.0));

  // conservation on a (t, r) grid
  k.spherical_strength = 3.7;
  k.omega = 1.9;
  for (int it = 0; it < 25; ++it) {
    for (int ir = 1; ir <= 20; ++ir) {
      const double t = -5.0 + 0.43 * it;
      const double r = 0.25 * ir;
      const SignedDensity d = spherical_density(t, r, k);
      const double expected = k.spherical_strength / (4 * pi * r * r);
      CHECK(d.sum() == doctest::Approx(expected).epsilon(1e-12));
      CHECK(d.plus >= 0.0);
      CHECK(d.minus >= 0.0);
    }
  }

  CHECK_THROWS_AS(spherical_density(0.0, 0.0, k), std::invalid_argument);
  CHECK_THROWS_AS(spherical_density(0.0, -1.0, k), std::invalid_argument);
}

TEST_CASE("scalar field of a spherical source reduces to the cosine form") {
  CHECK(scalar_field({0.4, 0.4}, 3.0) == doctest::Approx(0.0));

  PhysicalConstants k;
  k.spherical_strength = 4 * pi;
  CHECK(scalar_field(spherical_density(1.0, 1.0, k), k.field_scale) ==
        doctest::Approx(1.0)); // phase 0 at r = c = 1

  // general density-quotient form vs the closed cosine form
  k.spherical_strength = 2.6;
  k.field_scale = 1.4;
  k.omega = 0.8;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ut(-10.0, 10.0);
  std::uniform_real_distribution<double> ur(0.1, 5.0);
  for (int i = 0; i < 300; ++i) {
    const double t = ut(rng);
    const double r = ur(rng);
    const SignedDensity d = spherical_density(t, r, k);
    if (!(d.sum() > 0.0))
      continue;
    const double via_densities = scalar_field(d, k.field_scale);
    const double closed =
        k.field_scale * std::sqrt(k.spherical_strength / (4 * pi * r * r)) *
        std::cos(k.omega * (t - r / k.signal_speed));
    const double scale = std::max(std::abs(closed), 1e-3);
    CHECK(std::abs(via_densities - closed) / scale <= 1e-12);
  }

  CHECK_THROWS_AS(scalar_field({0.0, 0.0}, 1.0), degenerate_error);
}

TEST_CASE("mean intensity matches the inverse-square closed form") {
  PhysicalConstants k;
  k.spherical_strength = 8 * pi;
  CHECK(mean_intensity(k, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mean_intensity(k, 2.0) == doctest::Approx(0.25).epsilon(1e-10));

  k.field_scale = 0.0;
  CHECK(mean_intensity(k, 1.0) == 0.0);

  k.field_scale = 1.7;
  k.spherical_strength = 0.9;
  k.omega = 2.2;
  for (double r : {0.3, 1.0, 2.5, 7.0}) {
    const double expected = k.field_scale * k.field_scale *
                            k.spherical_strength / (8 * pi * r * r);
    CHECK(mean_intensity(k, r) == doctest::Approx(expected).epsilon(1e-10));
  }

  CHECK_THROWS_AS(mean_intensity(k, 0.0), std::invalid_argument);
}

TEST_CASE("beam paths compose to the splitter phase table") {
  // u passes two splitters on every branch: density scale 1/4
  const struct {
    Detector detector;
    double phase;
  } u_expected[] = {{Detector::D1, pi / 2},
                    {Detector::D2, pi},
                    {Detector::D3, pi / 2},
                    {Detector::D4, 0.0}};
  for (const auto &e : u_expected) {
    const PathSpec p = path_to_detector(Source::U, e.detector);
    CHECK(p.events.size() == 2);
    CHECK(p.phase_shift() == doctest::Approx(e.phase));
    CHECK(p.amplitude_factor() == doctest::Approx(0.25));
  }

  // each coherent reference sees one splitter: density scale 1/2
  CHECK(path_to_detector(Source::AlphaI, Detector::D1).phase_shift() ==
        doctest::Approx(pi / 2));
  CHECK(path_to_detector(Source::AlphaI, Detector::D2).phase_shift() ==
        doctest::Approx(0.0));
  CHECK(path_to_detector(Source::AlphaJ, Detector::D3).phase_shift() ==
        doctest::Approx(0.0));
  CHECK(path_to_detector(Source::AlphaJ, Detector::D4).phase_shift() ==
        doctest::Approx(pi / 2));
  CHECK(path_to_detector(Source::AlphaI, Detector::D1).amplitude_factor() ==
        doctest::Approx(0.5));

  CHECK_THROWS_AS(path_to_detector(Source::AlphaI, Detector::D3),
                  geometry_error);
  CHECK_THROWS_AS(path_to_detector(Source::AlphaI, Detector::D4),
                  geometry_error);
  CHECK_THROWS_AS(path_to_detector(Source::AlphaJ, Detector::D1),
                  geometry_error);
  CHECK_THROWS_AS(path_to_detector(Source::AlphaJ, Detector::D2),
                  geometry_error);
}

TEST_CASE("detector densities carry the composed amplitude and phase") {
  const ExperimentConfig straight = config(1.0, 8.0, 1.0, 0.0, 0.0);
  const SignedDensity d4 =
      detector_density(Detector::D4, Source::U, straight, 0.0, 0.0);
  CHECK(d4.plus == doctest::Approx(2.0));
  CHECK(d4.minus == doctest::Approx(0.0));

  const ExperimentConfig quad = config(4.0, 1.0, 1.0, 0.0, 0.0);
  const SignedDensity d1 =
      detector_density(Detector::D1, Source::AlphaI, quad, 0.0, 0.0);
  CHECK(d1.plus == doctest::Approx(1.0));
  CHECK(d1.minus == doctest::Approx(1.0));

  // u reaches D2 with a pi phase flip
  const ExperimentConfig cfg = config(1.0, 1.3, 1.0, 0.4, 1.1);
  for (double t : {0.0, 0.3, 1.7, 4.4}) {
    for (double theta : {0.0, 0.9, 2.8}) {
      const SignedDensity d =
          detector_density(Detector::D2, Source::U, cfg, theta, t);
      const double expected_plus =
          (cfg.beta / 8) * (1 + std::cos(cfg.omega * t + theta + pi));
      CHECK(d.plus == doctest::Approx(expected_plus).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(
      detector_density(Detector::D3, Source::AlphaI, cfg, 0.0, 0.0),
      geometry_error);
}

TEST_CASE("detection probability variants and their bound") {
  const ExperimentConfig base = config(1.0, 1.0, 1.0, 0.0, 0.0);

  CHECK(detection_probability({DetectorModelKind::Symmetric, Detector::D1, {}},
                              base, 0.0, 0.0) == doctest::Approx(0.5));
  CHECK(detection_probability(
            {DetectorModelKind::CoherentOnly, Detector::D3, {}}, base, 0.0,
            0.0) == doctest::Approx(1.0));
  CHECK(detection_probability(
            {DetectorModelKind::AmplitudeWeighted, Detector::D2, {}}, base,
            0.0, 0.0) == doctest::Approx(0.5));

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uphase(0.0, two_pi);
  std::uniform_real_distribution<double> uamp(0.0, 3.0);
  std::uniform_real_distribution<double> ueff(0.05, 1.0);
  std::uniform_real_distribution<double> ut(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    ExperimentConfig cfg = config(uamp(rng), uamp(rng), ueff(rng),
                                  uphase(rng), uphase(rng));
    if (cfg.alpha + cfg.beta == 0.0)
      cfg.alpha = 0.5;
    const auto kind = static_cast<DetectorModelKind>(i % 3);
    const auto det = static_cast<Detector>(i % 4);
    const double p =
        detection_probability({kind, det, {}}, cfg, uphase(rng), ut(rng));
    CHECK(p >= 0.0);
    CHECK(p <= cfg.efficiency + 1e-15);
  }

  const ExperimentConfig dark = config(0.0, 0.0, 1.0, 0.0, 0.0);
  CHECK_THROWS_AS(detection_probability(
                      {DetectorModelKind::AmplitudeWeighted, Detector::D1, {}},
                      dark, 0.0, 0.0),
                  degenerate_error);
}

TEST_CASE("generic absorption law") {
  CHECK(absorption_probability(0.0, 1.0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(absorption_probability(0.0, 1.0, 0.6, pi) == doctest::Approx(0.0));
  CHECK(absorption_probability(pi / 2, 1.0, 0.8, 0.0) ==
        doctest::Approx(0.4));
}

TEST_CASE("experiment config validation names the offending field") {
  ExperimentConfig cfg;
  cfg.alpha = -0.1;
  CHECK_THROWS_WITH_AS(cfg.validate(), "experiment.alpha: must be >= 0",
                       std::invalid_argument);
  cfg = ExperimentConfig{};
  cfg.efficiency = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig{};
  cfg.efficiency = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig{};
  cfg.theta_i = two_pi;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig{};
  CHECK_NOTHROW(cfg.validate());
}

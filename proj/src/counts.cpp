#include <photonbell/counts.hpp>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <photonbell/quadrature.hpp>

namespace photonbell {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform double in [0, 1) from the top 53 bits; fixed mapping keeps the
// stream identical across standard libraries.
double canonical_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void check_spec(const SamplerSpec &spec) {
  if (spec.chunk == 0)
    throw std::invalid_argument("sampler.chunk: must be >= 1");
}

std::uint64_t chunk_count_of(const SamplerSpec &spec) {
  return (spec.n + spec.chunk - 1) / spec.chunk;
}

template <class PerTrial>
void run_chunk(const SamplerSpec &spec, const ExperimentConfig &cfg,
               YSignConvention convention, std::uint64_t chunk_index,
               PerTrial &&per_trial) {
  std::mt19937_64 rng(chunk_seed(spec.seed, chunk_index));
  const std::uint64_t begin = chunk_index * spec.chunk;
  const std::uint64_t count = std::min(spec.chunk, spec.n - begin);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double theta = two_pi * canonical_double(rng());
    const ConditionalMeans means =
        conditional_expectations(theta, cfg, convention);
    per_trial(sample_trial(theta, means, rng));
  }
}

} // namespace

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk_index) {
  return splitmix64(seed ^ splitmix64(chunk_index));
}

ConditionalMeans conditional_expectations(double theta,
                                          const ExperimentConfig &cfg,
                                          YSignConvention convention) {
  const IntensityQuad q = intensities_closed_form(theta, cfg);
  const double sum_x = q.i1 + q.i2;
  const double sum_y = q.i3 + q.i4;
  if (!(sum_x > 0.0) || !(sum_y > 0.0))
    throw degenerate_error(
        "conditional_expectations: total detector flux vanishes "
        "(efficiency * (alpha + beta/2) == 0)");
  ConditionalMeans m{(q.i1 - q.i2) / sum_x, (q.i3 - q.i4) / sum_y};
  if (convention == YSignConvention::PositiveSine)
    m.y = -m.y;
  return m;
}

CountSample sample_trial(double theta, const ConditionalMeans &means,
                         std::mt19937_64 &rng) {
  const double ux = canonical_double(rng());
  const double uy = canonical_double(rng());
  return {theta, ux < 0.5 * (1.0 + means.x) ? +1 : -1,
          uy < 0.5 * (1.0 + means.y) ? +1 : -1};
}

std::vector<CountSample> sample_counts(const SamplerSpec &spec,
                                       const ExperimentConfig &cfg,
                                       YSignConvention convention) {
  check_spec(spec);
  std::vector<CountSample> out;
  out.reserve(spec.n);
  const std::uint64_t chunks = chunk_count_of(spec);
  for (std::uint64_t c = 0; c < chunks; ++c)
    run_chunk(spec, cfg, convention, c,
              [&](const CountSample &s) { out.push_back(s); });
  return out;
}

CountMoments accumulate_moments(const SamplerSpec &spec,
                                const ExperimentConfig &cfg,
                                YSignConvention convention,
                                unsigned workers) {
  check_spec(spec);
  if (workers == 0)
    throw std::invalid_argument("workers: must be >= 1");
  if (spec.n > 0)
    conditional_expectations(0.0, cfg, convention); // reject degenerate once

  const std::uint64_t chunks = chunk_count_of(spec);
  std::vector<CountMoments> partial(chunks);

  const auto worker = [&](std::atomic<std::uint64_t> &next) {
    for (std::uint64_t c = next.fetch_add(1); c < chunks;
         c = next.fetch_add(1)) {
      CountMoments acc;
      run_chunk(spec, cfg, convention, c,
                [&](const CountSample &s) { acc.add(s.x, s.y); });
      partial[c] = acc;
    }
  };

  std::atomic<std::uint64_t> next{0};
  if (workers == 1 || chunks <= 1) {
    worker(next);
  } else {
    std::vector<std::thread> pool;
    const unsigned spawn = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, chunks));
    pool.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w)
      pool.emplace_back(worker, std::ref(next));
    for (auto &t : pool)
      t.join();
  }

  CountMoments total;
  for (const CountMoments &p : partial)
    total.merge(p); // integer sums: order-independent, merged in order anyway
  return total;
}

namespace {

Estimate mean_estimate(std::int64_t sum, std::uint64_t n) {
  if (n == 0)
    throw std::invalid_argument("estimate: no samples");
  const double mean = static_cast<double>(sum) / static_cast<double>(n);
  const double var = std::max(0.0, 1.0 - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

} // namespace

Estimate mean_x_estimate(const CountMoments &m) {
  return mean_estimate(m.x_sum, m.n);
}

Estimate mean_y_estimate(const CountMoments &m) {
  return mean_estimate(m.y_sum, m.n);
}

Estimate covariance_estimate(const CountMoments &m) {
  if (m.n < 2)
    throw std::invalid_argument("covariance_estimate: need n >= 2");
  const double n = static_cast<double>(m.n);
  const double mx = static_cast<double>(m.x_sum) / n;
  const double my = static_cast<double>(m.y_sum) / n;
  const double mxy = static_cast<double>(m.xy_sum) / n;
  const double var_xy = std::max(0.0, 1.0 - mxy * mxy);
  return {mxy - mx * my, std::sqrt(var_xy / n), m.n};
}

Estimate estimate_correlation(std::span<const CountSample> samples) {
  CountMoments m;
  for (const CountSample &s : samples)
    m.add(s.x, s.y);
  return covariance_estimate(m);
}

double covariance_oracle(const ExperimentConfig &cfg,
                         YSignConvention convention) {
  return phase_average([&](double theta) {
    const ConditionalMeans m = conditional_expectations(theta, cfg, convention);
    return m.x * m.y;
  });
}

} // namespace photonbell

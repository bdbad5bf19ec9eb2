#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include <photonbell/chsh.hpp>
#include <photonbell/counts.hpp>
#include <photonbell/model.hpp>

namespace photonbell {

/// Thrown on malformed configuration; the message names the offending
/// field.
class config_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { Json, Csv };
enum class CorrelationSource { Analytic, Empirical };

struct ChshSpec {
  CorrelationSource source = CorrelationSource::Analytic;
  ChshSetting setting{0.0, pi / 2, 3 * pi / 4, pi / 4};

  bool operator==(const ChshSpec &) const = default;
};

/// Sweep over the phase difference delta = theta_i - theta_j.
struct SweepSpec {
  double start = 0.0;
  double stop = two_pi;
  double step = pi / 16;

  bool operator==(const SweepSpec &) const = default;
};

struct OutputSpec {
  OutputFormat format = OutputFormat::Json;
  std::string path; ///< empty: $PHOTONBELL_OUT_DIR/<run_id>.<ext>, else stdout

  bool operator==(const OutputSpec &) const = default;
};

/// Full run configuration; round-trips losslessly through JSON.
struct RunConfig {
  ExperimentConfig experiment{1.0, 1.0, 1.0, pi / 2, 0.0, 1.0};
  DetectorModelKind model = DetectorModelKind::Symmetric;
  SamplerSpec sampler;
  unsigned workers = 1;
  YSignConvention y_convention = YSignConvention::IntensityRatio;
  int grid = 16;
  ChshSpec chsh;
  SweepSpec sweep;
  OutputSpec output;

  bool operator==(const RunConfig &) const = default;
};

RunConfig parse_config(const nlohmann::json &j);
RunConfig load_config(const std::filesystem::path &path);
nlohmann::json config_to_json(const RunConfig &cfg);

/// Field-by-field validation; throws config_error naming the field.
void validate(const RunConfig &cfg);

/// One named result. `path_tag` records which computational path produced
/// it: "closed-form", "quadrature" or "monte-carlo". Degenerate entries
/// carry no numeric value.
struct ScalarResult {
  std::string name;
  double value = 0.0;
  std::string path_tag;
  std::optional<double> se;
  bool degenerate = false;
};

/// One sweep row at delta = theta_i - theta_j.
struct SweepRow {
  double delta = 0.0;
  double rho_closed = 0.0;
  std::optional<double> rho_quadrature;
  double cov_mc = 0.0;
  double cov_se = 0.0;
};

struct ResultRecord {
  std::string run_id;
  std::string command;
  RunConfig config;
  std::vector<ScalarResult> scalars;
  std::vector<SweepRow> rows;
  std::vector<std::string> notes;

  const ScalarResult *find(const std::string &name) const;
};

/// Phase moments of the selected detector law, the closed-form reference
/// values, and the worst quadrature-vs-closed-form deviation.
ResultRecord run_analytic(const RunConfig &cfg);

/// Monte Carlo count estimates (E(X), E(Y), Cov) with standard errors,
/// next to the deterministic phase-quadrature oracle.
ResultRecord run_simulate(const RunConfig &cfg);

/// CHSH statistic at the configured setting plus an exhaustive grid
/// search, over the analytic or the empirical correlation.
ResultRecord run_chsh(const RunConfig &cfg);

/// Rows of (delta, rho closed form, rho quadrature, Monte Carlo
/// covariance) over the configured delta range.
ResultRecord run_sweep(const RunConfig &cfg);

nlohmann::json record_to_json(const ResultRecord &record);
std::string record_to_csv(const ResultRecord &record);

/// Serialize per `spec` and write to the resolved destination. Returns
/// the path written, or "-" when the record went to stdout.
std::string write_record(const ResultRecord &record, const OutputSpec &spec);

/// Annotation attached to every simulate/empirical-chsh record. States
/// that conditionally independent +/-1 counts cap the covariance at
/// (1/2)|sin(theta_i - theta_j)|, so the intensity correlation
/// -sin(theta_i - theta_j) is not reachable by the count statistic.
extern const char *const count_covariance_note;

} // namespace photonbell

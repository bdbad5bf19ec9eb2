#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include <photonbell/harness.hpp>

using namespace photonbell;
using nlohmann::json;

namespace {

std::string without_run_id(const ResultRecord &rec) {
  std::istringstream in(record_to_csv(rec));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# run_id:", 0) != 0)
      out << line << '\n';
  return out.str();
}

} // namespace

TEST_CASE("run configuration round-trips through JSON") {
  RunConfig cfg;
  cfg.experiment = {0.7, 1.9, 0.4, 1.234, 5.678, 2.0};
  cfg.model = DetectorModelKind::AmplitudeWeighted;
  cfg.sampler = {12'345, 987, 100};
  cfg.workers = 3;
  cfg.y_convention = YSignConvention::PositiveSine;
  cfg.grid = 24;
  cfg.chsh.source = CorrelationSource::Empirical;
  cfg.chsh.setting = {0.1, 0.2, 0.3, 0.4};
  cfg.sweep = {0.5, 2.5, 0.25};
  cfg.output = {OutputFormat::Csv, "out/results.csv"};

  CHECK(parse_config(config_to_json(cfg)) == cfg);
  CHECK(parse_config(config_to_json(RunConfig{})) == RunConfig{});
}

TEST_CASE("malformed configuration names the offending field") {
  CHECK_THROWS_WITH_AS(parse_config(json{{"experimnt", json::object()}}),
                       "config.experimnt: unknown field", config_error);
  CHECK_THROWS_WITH_AS(
      parse_config(json{{"experiment", {{"alpha", "big"}}}}),
      "experiment.alpha: expected a number", config_error);
  CHECK_THROWS_AS(parse_config(json{{"model", "lopsided"}}), config_error);
  CHECK_THROWS_AS(parse_config(json{{"sampler", {{"seed", -4}}}}),
                  config_error);

  RunConfig bad;
  bad.experiment.alpha = -1.0;
  CHECK_THROWS_AS(validate(bad), config_error);
  bad = RunConfig{};
  bad.grid = 4;
  CHECK_THROWS_WITH_AS(validate(bad), "grid: must be >= 8", config_error);
  bad = RunConfig{};
  bad.sweep = {2.0, 1.0, 0.5};
  CHECK_THROWS_WITH_AS(validate(bad), "sweep: empty range (stop < start)",
                       config_error);
}

TEST_CASE("analytic run reports the moments with path tags") {
  const ResultRecord rec = run_analytic(RunConfig{});
  CHECK(rec.command == "analytic");

  const ScalarResult *rho = rec.find("rho");
  REQUIRE(rho != nullptr);
  CHECK_FALSE(rho->degenerate);
  CHECK(rho->value == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(rho->path_tag == "quadrature");

  const ScalarResult *var12 = rec.find("var12");
  REQUIRE(var12 != nullptr);
  CHECK(var12->value == doctest::Approx(9.0 / 512).epsilon(1e-9));

  const ScalarResult *closed = rec.find("var12_closed");
  REQUIRE(closed != nullptr);
  CHECK(closed->path_tag == "closed-form");
  CHECK(closed->value == doctest::Approx(9.0 / 512));

  const ScalarResult *dev = rec.find("quad_vs_closed_max_dev");
  REQUIRE(dev != nullptr);
  CHECK(dev->value <= 1e-10);
}

TEST_CASE("degenerate correlation is marked, never NaN") {
  RunConfig cfg;
  cfg.experiment.alpha = 0.0;
  cfg.experiment.beta = 0.0;
  const ResultRecord rec = run_analytic(cfg);

  const ScalarResult *rho = rec.find("rho");
  REQUIRE(rho != nullptr);
  CHECK(rho->degenerate);

  const std::string payload = record_to_json(rec).dump();
  CHECK(payload.find("nan") == std::string::npos);
  CHECK(payload.find("\"degenerate\":true") != std::string::npos);
  CHECK(record_to_csv(rec).find("rho,degenerate") != std::string::npos);
}

TEST_CASE("simulate run carries estimates, the oracle and the annotation") {
  RunConfig cfg;
  cfg.sampler = {100'000, 11, 8192};
  cfg.workers = 2;
  const ResultRecord rec = run_simulate(cfg);

  const ScalarResult *cov = rec.find("cov_xy");
  REQUIRE(cov != nullptr);
  CHECK(cov->path_tag == "monte-carlo");
  REQUIRE(cov->se.has_value());

  const ScalarResult *oracle = rec.find("cov_oracle");
  REQUIRE(oracle != nullptr);
  CHECK(oracle->path_tag == "quadrature");
  CHECK(oracle->value == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::abs(cov->value - oracle->value) <= 4 * *cov->se);

  REQUIRE(!rec.notes.empty());
  CHECK(rec.notes.front() == count_covariance_note);

  // identical configuration, identical record apart from the run id
  CHECK(without_run_id(rec) == without_run_id(run_simulate(cfg)));

  RunConfig tiny = cfg;
  tiny.sampler.n = 1;
  CHECK_THROWS_AS(run_simulate(tiny), config_error);
}

TEST_CASE("chsh run over the analytic correlation") {
  RunConfig cfg;
  cfg.grid = 16;
  const ResultRecord rec = run_chsh(cfg);

  const ScalarResult *s = rec.find("s");
  REQUIRE(s != nullptr);
  CHECK(s->value == doctest::Approx(2.828427).epsilon(1e-6));
  CHECK(rec.find("violated")->value == 1.0);
  CHECK(rec.find("best_s") != nullptr);
  CHECK(std::abs(rec.find("best_s")->value) >= 2 * std::sqrt(2.0) - 1e-9);

  RunConfig flat;
  flat.chsh.setting = {0.0, 0.0, 0.0, 0.0};
  const ResultRecord zero = run_chsh(flat);
  CHECK(zero.find("s")->value == doctest::Approx(0.0));
  CHECK(zero.find("violated")->value == 0.0);
}

TEST_CASE("chsh run over the empirical correlation stays classical") {
  RunConfig cfg;
  cfg.chsh.source = CorrelationSource::Empirical;
  cfg.grid = 8;
  cfg.sampler = {20'000, 3, 4096};
  cfg.workers = 2;
  const ResultRecord rec = run_chsh(cfg);

  CHECK(std::abs(rec.find("best_s")->value) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
  CHECK(rec.find("best_violated")->value == 0.0);
  CHECK(rec.find("s")->path_tag == "monte-carlo");
  REQUIRE(!rec.notes.empty());
  CHECK(rec.notes.front() == count_covariance_note);
}

TEST_CASE("sweep rows follow the closed form across the range") {
  RunConfig cfg;
  cfg.sweep = {0.0, pi, pi / 2};
  cfg.sampler = {4'000, 17, 1024};
  const ResultRecord rec = run_sweep(cfg);

  REQUIRE(rec.rows.size() == 3);
  CHECK(rec.rows[0].rho_closed == doctest::Approx(0.0));
  CHECK(rec.rows[1].rho_closed == doctest::Approx(-1.0));
  CHECK(rec.rows[2].rho_closed == doctest::Approx(0.0).epsilon(1e-12));
  for (const SweepRow &row : rec.rows) {
    REQUIRE(row.rho_quadrature.has_value());
    CHECK(std::abs(*row.rho_quadrature - row.rho_closed) <= 1e-9);
    CHECK(std::abs(row.cov_mc - (-0.5) * std::sin(row.delta)) <=
          5 * std::max(row.cov_se, 1e-3));
  }

  RunConfig wide;
  wide.sweep = {0.3, 0.5, 9.0}; // step larger than the range
  wide.sampler = {2'000, 17, 1024};
  const ResultRecord single = run_sweep(wide);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.rows[0].delta == doctest::Approx(0.3));
}

TEST_CASE("records serialize to parseable JSON and CSV") {
  RunConfig cfg;
  cfg.sweep = {0.0, pi, pi / 2};
  cfg.sampler = {2'000, 5, 512};
  const ResultRecord rec = run_sweep(cfg);

  const json j = record_to_json(rec);
  CHECK(j.at("command") == "sweep");
  CHECK(j.at("config").at("experiment").at("alpha") == 1.0);
  CHECK(j.at("rows").size() == 3);
  CHECK(j.at("notes").size() == 1);

  const std::string csv = record_to_csv(rec);
  CHECK(csv.find("# config: {") != std::string::npos);
  CHECK(csv.find("delta,rho_closed,rho_quadrature,cov_mc,cov_se\n") !=
        std::string::npos);
  CHECK(csv.find("# note: ") != std::string::npos);

  const ResultRecord analytic = run_analytic(RunConfig{});
  const std::string scalar_csv = record_to_csv(analytic);
  CHECK(scalar_csv.find("name,value,se,path\n") != std::string::npos);
  CHECK(scalar_csv.find(",quadrature\n") != std::string::npos);

  // a parsed config echo reproduces the config
  const std::string echo_line = "# config: ";
  const auto pos = scalar_csv.find(echo_line);
  REQUIRE(pos != std::string::npos);
  const auto end = scalar_csv.find('\n', pos);
  const std::string echo =
      scalar_csv.substr(pos + echo_line.size(), end - pos - echo_line.size());
  CHECK(parse_config(json::parse(echo)) == analytic.config);
}

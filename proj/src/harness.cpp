#include <photonbell/harness.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include <photonbell/analytic.hpp>

namespace photonbell {

using nlohmann::json;

const char *const count_covariance_note =
    "count model: with X, Y conditionally independent given theta and "
    "conditional means E(X|theta) = cos(theta - theta_i), E(Y|theta) = "
    "-sin(theta - theta_j), the covariance is -(1/2) sin(theta_i - theta_j); "
    "the intensity correlation -sin(theta_i - theta_j) is not attainable by "
    "this count statistic, whose magnitude is capped at 1/2.";

namespace {

constexpr const char *out_dir_env = "PHOTONBELL_OUT_DIR";

// ---------------------------------------------------------------- enums

std::string to_string(DetectorModelKind k) {
  switch (k) {
  case DetectorModelKind::Symmetric: return "symmetric";
  case DetectorModelKind::CoherentOnly: return "coherent-only";
  case DetectorModelKind::AmplitudeWeighted: return "amplitude-weighted";
  }
  return "?";
}

DetectorModelKind model_from_string(const std::string &s) {
  if (s == "symmetric") return DetectorModelKind::Symmetric;
  if (s == "coherent-only") return DetectorModelKind::CoherentOnly;
  if (s == "amplitude-weighted") return DetectorModelKind::AmplitudeWeighted;
  throw config_error("model: expected symmetric | coherent-only | "
                     "amplitude-weighted, got '" + s + "'");
}

std::string to_string(YSignConvention c) {
  return c == YSignConvention::IntensityRatio ? "intensity-ratio"
                                              : "positive-sine";
}

YSignConvention convention_from_string(const std::string &s) {
  if (s == "intensity-ratio") return YSignConvention::IntensityRatio;
  if (s == "positive-sine") return YSignConvention::PositiveSine;
  throw config_error(
      "y_convention: expected intensity-ratio | positive-sine, got '" + s +
      "'");
}

std::string to_string(CorrelationSource s) {
  return s == CorrelationSource::Analytic ? "analytic" : "empirical";
}

CorrelationSource source_from_string(const std::string &s) {
  if (s == "analytic") return CorrelationSource::Analytic;
  if (s == "empirical") return CorrelationSource::Empirical;
  throw config_error("chsh.source: expected analytic | empirical, got '" + s +
                     "'");
}

std::string to_string(OutputFormat f) {
  return f == OutputFormat::Json ? "json" : "csv";
}

OutputFormat format_from_string(const std::string &s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  throw config_error("output.format: expected json | csv, got '" + s + "'");
}

// ------------------------------------------------------- strict parsing

void check_keys(const json &j, const std::string &scope,
                std::initializer_list<const char *> allowed) {
  if (!j.is_object())
    throw config_error(scope + ": expected an object");
  for (const auto &item : j.items()) {
    bool known = false;
    for (const char *k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw config_error(scope + "." + item.key() + ": unknown field");
  }
}

double get_double(const json &j, const std::string &scope, const char *key,
                  double fallback) {
  if (!j.contains(key))
    return fallback;
  const json &v = j.at(key);
  if (!v.is_number())
    throw config_error(scope + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_u64(const json &j, const std::string &scope,
                      const char *key, std::uint64_t fallback) {
  if (!j.contains(key))
    return fallback;
  const json &v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw config_error(scope + "." + key +
                       ": expected a nonnegative integer");
  if (v.is_number_integer() && v.get<std::int64_t>() < 0)
    throw config_error(scope + "." + key +
                       ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

int get_int(const json &j, const std::string &scope, const char *key,
            int fallback) {
  if (!j.contains(key))
    return fallback;
  const json &v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw config_error(scope + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string get_string(const json &j, const std::string &scope,
                       const char *key, const std::string &fallback) {
  if (!j.contains(key))
    return fallback;
  const json &v = j.at(key);
  if (!v.is_string())
    throw config_error(scope + "." + key + ": expected a string");
  return v.get<std::string>();
}

// ------------------------------------------------------------- run ids

std::string make_run_id(const std::string &command) {
  static std::atomic<unsigned> counter{0};
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  std::ostringstream id;
  id << command << '-' << stamp << '-' << counter.fetch_add(1);
  return id.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --------------------------------------------------------- correlations

CorrelationFn analytic_correlation(const RunConfig &cfg) {
  return [cfg](double a, double b) {
    ExperimentConfig e = cfg.experiment;
    e.theta_i = wrap_phase(a);
    e.theta_j = wrap_phase(b);
    const ThetaMoments m = theta_moments(e, cfg.model);
    if (!m.rho)
      throw degenerate_error(
          "chsh: analytic correlation degenerate (zero variance)");
    return *m.rho;
  };
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return chunk_seed(seed, salt ^ 0x706265ULL);
}

CorrelationFn empirical_correlation(const RunConfig &cfg) {
  return [cfg](double a, double b) {
    ExperimentConfig e = cfg.experiment;
    e.theta_i = wrap_phase(a);
    e.theta_j = wrap_phase(b);
    SamplerSpec spec = cfg.sampler;
    // decorrelate phase pairs while keeping the run reproducible
    std::uint64_t pair_bits;
    static_assert(sizeof pair_bits == sizeof a);
    std::memcpy(&pair_bits, &e.theta_i, sizeof pair_bits);
    std::uint64_t b_bits;
    std::memcpy(&b_bits, &e.theta_j, sizeof b_bits);
    spec.seed = mix_seed(cfg.sampler.seed, pair_bits ^ (b_bits * 0x9E3779B97F4A7C15ULL));
    const CountMoments m =
        accumulate_moments(spec, e, cfg.y_convention, cfg.workers);
    return covariance_estimate(m).mean;
  };
}

void append_chsh_scalars(ResultRecord &rec, const ChshSetting &setting,
                         const ChshResult &r, const std::string &prefix,
                         const std::string &path_tag) {
  rec.scalars.push_back({prefix + "a", setting.a, path_tag, {}, false});
  rec.scalars.push_back({prefix + "a_prime", setting.a_prime, path_tag, {}, false});
  rec.scalars.push_back({prefix + "b", setting.b, path_tag, {}, false});
  rec.scalars.push_back({prefix + "b_prime", setting.b_prime, path_tag, {}, false});
  rec.scalars.push_back({prefix + "e_ab", r.ab, path_tag, {}, false});
  rec.scalars.push_back({prefix + "e_ab_prime", r.ab_prime, path_tag, {}, false});
  rec.scalars.push_back({prefix + "e_a_prime_b", r.a_prime_b, path_tag, {}, false});
  rec.scalars.push_back(
      {prefix + "e_a_prime_b_prime", r.a_prime_b_prime, path_tag, {}, false});
  rec.scalars.push_back({prefix + "s", r.s, path_tag, {}, false});
  rec.scalars.push_back(
      {prefix + "violated", r.violated ? 1.0 : 0.0, path_tag, {}, false});
}

} // namespace

// ------------------------------------------------------------ config IO

RunConfig parse_config(const json &j) {
  check_keys(j, "config",
             {"experiment", "model", "sampler", "workers", "y_convention",
              "grid", "chsh", "sweep", "output"});
  RunConfig cfg;

  if (j.contains("experiment")) {
    const json &e = j.at("experiment");
    check_keys(e, "experiment",
               {"alpha", "beta", "efficiency", "theta_i", "theta_j", "omega"});
    cfg.experiment.alpha = get_double(e, "experiment", "alpha", cfg.experiment.alpha);
    cfg.experiment.beta = get_double(e, "experiment", "beta", cfg.experiment.beta);
    cfg.experiment.efficiency =
        get_double(e, "experiment", "efficiency", cfg.experiment.efficiency);
    cfg.experiment.theta_i =
        wrap_phase(get_double(e, "experiment", "theta_i", cfg.experiment.theta_i));
    cfg.experiment.theta_j =
        wrap_phase(get_double(e, "experiment", "theta_j", cfg.experiment.theta_j));
    cfg.experiment.omega = get_double(e, "experiment", "omega", cfg.experiment.omega);
  }

  if (j.contains("model"))
    cfg.model = model_from_string(get_string(j, "config", "model", ""));

  if (j.contains("sampler")) {
    const json &s = j.at("sampler");
    check_keys(s, "sampler", {"n", "seed", "chunk"});
    cfg.sampler.n = get_u64(s, "sampler", "n", cfg.sampler.n);
    cfg.sampler.seed = get_u64(s, "sampler", "seed", cfg.sampler.seed);
    cfg.sampler.chunk = get_u64(s, "sampler", "chunk", cfg.sampler.chunk);
  }

  if (j.contains("workers")) {
    const std::uint64_t w = get_u64(j, "config", "workers", cfg.workers);
    if (w == 0 || w > 4096)
      throw config_error("workers: must be in [1, 4096]");
    cfg.workers = static_cast<unsigned>(w);
  }

  if (j.contains("y_convention"))
    cfg.y_convention =
        convention_from_string(get_string(j, "config", "y_convention", ""));

  cfg.grid = get_int(j, "config", "grid", cfg.grid);

  if (j.contains("chsh")) {
    const json &c = j.at("chsh");
    check_keys(c, "chsh", {"source", "setting"});
    if (c.contains("source"))
      cfg.chsh.source = source_from_string(get_string(c, "chsh", "source", ""));
    if (c.contains("setting")) {
      const json &s = c.at("setting");
      check_keys(s, "chsh.setting", {"a", "a_prime", "b", "b_prime"});
      cfg.chsh.setting.a =
          wrap_phase(get_double(s, "chsh.setting", "a", cfg.chsh.setting.a));
      cfg.chsh.setting.a_prime = wrap_phase(
          get_double(s, "chsh.setting", "a_prime", cfg.chsh.setting.a_prime));
      cfg.chsh.setting.b =
          wrap_phase(get_double(s, "chsh.setting", "b", cfg.chsh.setting.b));
      cfg.chsh.setting.b_prime = wrap_phase(
          get_double(s, "chsh.setting", "b_prime", cfg.chsh.setting.b_prime));
    }
  }

  if (j.contains("sweep")) {
    const json &s = j.at("sweep");
    check_keys(s, "sweep", {"start", "stop", "step"});
    cfg.sweep.start = get_double(s, "sweep", "start", cfg.sweep.start);
    cfg.sweep.stop = get_double(s, "sweep", "stop", cfg.sweep.stop);
    cfg.sweep.step = get_double(s, "sweep", "step", cfg.sweep.step);
  }

  if (j.contains("output")) {
    const json &o = j.at("output");
    check_keys(o, "output", {"format", "path"});
    if (o.contains("format"))
      cfg.output.format =
          format_from_string(get_string(o, "output", "format", ""));
    cfg.output.path = get_string(o, "output", "path", cfg.output.path);
  }

  return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw config_error("config: cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw config_error("config: invalid JSON in '" + path.string() +
                       "': " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const RunConfig &cfg) {
  return json{
      {"experiment",
       {{"alpha", cfg.experiment.alpha},
        {"beta", cfg.experiment.beta},
        {"efficiency", cfg.experiment.efficiency},
        {"theta_i", cfg.experiment.theta_i},
        {"theta_j", cfg.experiment.theta_j},
        {"omega", cfg.experiment.omega}}},
      {"model", to_string(cfg.model)},
      {"sampler",
       {{"n", cfg.sampler.n},
        {"seed", cfg.sampler.seed},
        {"chunk", cfg.sampler.chunk}}},
      {"workers", cfg.workers},
      {"y_convention", to_string(cfg.y_convention)},
      {"grid", cfg.grid},
      {"chsh",
       {{"source", to_string(cfg.chsh.source)},
        {"setting",
         {{"a", cfg.chsh.setting.a},
          {"a_prime", cfg.chsh.setting.a_prime},
          {"b", cfg.chsh.setting.b},
          {"b_prime", cfg.chsh.setting.b_prime}}}}},
      {"sweep",
       {{"start", cfg.sweep.start},
        {"stop", cfg.sweep.stop},
        {"step", cfg.sweep.step}}},
      {"output",
       {{"format", to_string(cfg.output.format)},
        {"path", cfg.output.path}}}};
}

void validate(const RunConfig &cfg) {
  try {
    cfg.experiment.validate();
  } catch (const std::invalid_argument &e) {
    throw config_error(e.what());
  }
  if (cfg.sampler.chunk == 0)
    throw config_error("sampler.chunk: must be >= 1");
  if (cfg.workers == 0)
    throw config_error("workers: must be >= 1");
  if (cfg.grid < 8)
    throw config_error("grid: must be >= 8");
  if (!(cfg.sweep.step > 0.0))
    throw config_error("sweep.step: must be > 0");
  if (cfg.sweep.stop < cfg.sweep.start)
    throw config_error("sweep: empty range (stop < start)");
}

// --------------------------------------------------------------- runs

const ScalarResult *ResultRecord::find(const std::string &name) const {
  for (const ScalarResult &s : scalars)
    if (s.name == name)
      return &s;
  return nullptr;
}

ResultRecord run_analytic(const RunConfig &cfg) {
  validate(cfg);
  ResultRecord rec{make_run_id("analytic"), "analytic", cfg, {}, {}, {}};

  const ThetaMoments m = theta_moments(cfg.experiment, cfg.model);
  rec.scalars.push_back({"var12", m.var12, "quadrature", {}, false});
  rec.scalars.push_back({"var34", m.var34, "quadrature", {}, false});
  rec.scalars.push_back({"cov", m.cov, "quadrature", {}, false});
  if (m.rho)
    rec.scalars.push_back({"rho", *m.rho, "quadrature", {}, false});
  else
    rec.scalars.push_back({"rho", 0.0, "quadrature", {}, true});

  const double delta = cfg.experiment.theta_i - cfg.experiment.theta_j;
  rec.scalars.push_back({"rho_closed", -std::sin(delta), "closed-form", {}, false});
  if (cfg.model == DetectorModelKind::Symmetric) {
    const double amp =
        cfg.experiment.efficiency * (cfg.experiment.beta + 2.0 * cfg.experiment.alpha);
    rec.scalars.push_back(
        {"var12_closed", amp * amp / 512.0, "closed-form", {}, false});
  }

  // Worst deviation of the quadrature intensities from the closed forms,
  // probed off the moment nodes.
  double max_dev = 0.0;
  const int probes = 63;
  for (int k = 0; k < probes; ++k) {
    const double theta = two_pi * (k + 0.5) / probes;
    const IntensityQuad a =
        intensities_quadrature(theta, cfg.experiment, DetectorModelKind::Symmetric);
    const IntensityQuad b = intensities_closed_form(theta, cfg.experiment);
    max_dev = std::max({max_dev, std::abs(a.i1 - b.i1), std::abs(a.i2 - b.i2),
                        std::abs(a.i3 - b.i3), std::abs(a.i4 - b.i4)});
  }
  rec.scalars.push_back(
      {"quad_vs_closed_max_dev", max_dev, "quadrature", {}, false});

  if (!m.rho)
    rec.notes.push_back("rho is degenerate: a homodyne difference signal has "
                        "zero variance for this configuration");
  return rec;
}

ResultRecord run_simulate(const RunConfig &cfg) {
  validate(cfg);
  if (cfg.sampler.n < 2)
    throw config_error("sampler.n: need at least 2 trials");
  ResultRecord rec{make_run_id("simulate"), "simulate", cfg, {}, {}, {}};

  const CountMoments m = accumulate_moments(cfg.sampler, cfg.experiment,
                                            cfg.y_convention, cfg.workers);
  const Estimate ex = mean_x_estimate(m);
  const Estimate ey = mean_y_estimate(m);
  const Estimate cov = covariance_estimate(m);
  rec.scalars.push_back(
      {"n", static_cast<double>(m.n), "monte-carlo", {}, false});
  rec.scalars.push_back({"e_x", ex.mean, "monte-carlo", ex.se, false});
  rec.scalars.push_back({"e_y", ey.mean, "monte-carlo", ey.se, false});
  rec.scalars.push_back({"cov_xy", cov.mean, "monte-carlo", cov.se, false});
  rec.scalars.push_back({"cov_oracle",
                         covariance_oracle(cfg.experiment, cfg.y_convention),
                         "quadrature", {}, false});
  rec.notes.push_back(count_covariance_note);
  return rec;
}

ResultRecord run_chsh(const RunConfig &cfg) {
  validate(cfg);
  const bool empirical = cfg.chsh.source == CorrelationSource::Empirical;
  if (empirical && cfg.sampler.n < 2)
    throw config_error("sampler.n: empirical correlation needs at least 2 "
                       "trials");
  ResultRecord rec{make_run_id("chsh"), "chsh", cfg, {}, {}, {}};

  const CorrelationFn corr =
      empirical ? empirical_correlation(cfg) : analytic_correlation(cfg);
  const std::string tag = empirical ? "monte-carlo" : "quadrature";

  const ChshResult at_setting = chsh_statistic(cfg.chsh.setting, corr);
  append_chsh_scalars(rec, cfg.chsh.setting, at_setting, "", tag);

  const ViolationSearch best = find_max_violation(corr, cfg.grid);
  append_chsh_scalars(rec, best.setting, best.result, "best_", tag);

  if (empirical)
    rec.notes.push_back(count_covariance_note);
  return rec;
}

ResultRecord run_sweep(const RunConfig &cfg) {
  validate(cfg);
  if (cfg.sampler.n < 2)
    throw config_error("sampler.n: need at least 2 trials");
  ResultRecord rec{make_run_id("sweep"), "sweep", cfg, {}, {}, {}};
  rec.notes.push_back(count_covariance_note);

  // Half-step slack keeps the intended endpoint when it lands on the
  // grid up to roundoff.
  const double slack = 0.5 * cfg.sweep.step;
  std::uint64_t row = 0;
  for (double delta = cfg.sweep.start; delta <= cfg.sweep.stop + slack;
       delta = cfg.sweep.start + cfg.sweep.step * static_cast<double>(++row)) {
    ExperimentConfig e = cfg.experiment;
    e.theta_i = wrap_phase(cfg.experiment.theta_j + delta);

    SweepRow r;
    r.delta = delta;
    r.rho_closed = -std::sin(delta);
    r.rho_quadrature = theta_moments(e, cfg.model).rho;

    SamplerSpec spec = cfg.sampler;
    spec.seed = mix_seed(cfg.sampler.seed, row);
    const CountMoments m =
        accumulate_moments(spec, e, cfg.y_convention, cfg.workers);
    const Estimate cov = covariance_estimate(m);
    r.cov_mc = cov.mean;
    r.cov_se = cov.se;
    rec.rows.push_back(r);
  }
  return rec;
}

// ------------------------------------------------------------- output

json record_to_json(const ResultRecord &record) {
  json results = json::array();
  for (const ScalarResult &s : record.scalars) {
    json item{{"name", s.name}, {"path", s.path_tag}};
    if (s.degenerate) {
      item["value"] = nullptr;
      item["degenerate"] = true;
    } else {
      item["value"] = s.value;
    }
    if (s.se)
      item["se"] = *s.se;
    results.push_back(std::move(item));
  }

  json rows = json::array();
  for (const SweepRow &r : record.rows) {
    json item{{"delta", r.delta},
              {"rho_closed", r.rho_closed},
              {"cov_mc", r.cov_mc},
              {"cov_se", r.cov_se}};
    if (r.rho_quadrature)
      item["rho_quadrature"] = *r.rho_quadrature;
    else
      item["rho_quadrature"] = nullptr;
    rows.push_back(std::move(item));
  }

  json j{{"run_id", record.run_id},
         {"command", record.command},
         {"config", config_to_json(record.config)},
         {"results", results},
         {"notes", record.notes}};
  if (!record.rows.empty() || record.command == "sweep")
    j["rows"] = rows;
  return j;
}

std::string record_to_csv(const ResultRecord &record) {
  std::ostringstream out;
  out << "# run_id: " << record.run_id << '\n';
  out << "# command: " << record.command << '\n';
  out << "# config: " << config_to_json(record.config).dump() << '\n';
  for (const std::string &note : record.notes)
    out << "# note: " << note << '\n';

  if (record.command == "sweep") {
    out << "delta,rho_closed,rho_quadrature,cov_mc,cov_se\n";
    for (const SweepRow &r : record.rows) {
      out << format_double(r.delta) << ',' << format_double(r.rho_closed)
          << ',';
      if (r.rho_quadrature)
        out << format_double(*r.rho_quadrature);
      else
        out << "degenerate";
      out << ',' << format_double(r.cov_mc) << ',' << format_double(r.cov_se)
          << '\n';
    }
    return out.str();
  }

  out << "name,value,se,path\n";
  for (const ScalarResult &s : record.scalars) {
    out << s.name << ',';
    if (s.degenerate)
      out << "degenerate";
    else
      out << format_double(s.value);
    out << ',';
    if (s.se)
      out << format_double(*s.se);
    out << ',' << s.path_tag << '\n';
  }
  return out.str();
}

std::string write_record(const ResultRecord &record, const OutputSpec &spec) {
  std::string payload;
  if (spec.format == OutputFormat::Json)
    payload = record_to_json(record).dump(2) + "\n";
  else
    payload = record_to_csv(record);

  std::filesystem::path dest;
  if (!spec.path.empty()) {
    dest = spec.path;
  } else if (const char *dir = std::getenv(out_dir_env); dir && *dir) {
    dest = std::filesystem::path(dir) /
           (record.run_id + (spec.format == OutputFormat::Json ? ".json" : ".csv"));
  } else {
    std::cout << payload;
    return "-";
  }

  if (dest.has_parent_path())
    std::filesystem::create_directories(dest.parent_path());
  std::ofstream out(dest);
  if (!out)
    throw std::runtime_error("output: cannot write '" + dest.string() + "'");
  out << payload;
  return dest.string();
}

} // namespace photonbell

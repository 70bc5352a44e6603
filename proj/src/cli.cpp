#include "growfs/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

namespace growfs::cli {
namespace {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

Range parse_range(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError("--range expects LO,HI");
  try {
    return {std::stod(parts[0]), std::stod(parts[1])};
  } catch (const std::exception&) {
    throw ConfigError("--range expects two numbers, got '" + text + "'");
  }
}

Transform parse_transform(const std::string& text) {
  if (text == "raw") return Transform::raw;
  if (text == "growth") return Transform::log_diff_pct;
  throw ConfigError("--transform expects raw|growth, got '" + text + "'");
}

// Uniform double in [0,1) from the top 53 bits; portable across standard libraries.
double unit_uniform(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

TimeSeries load_series(const ExperimentConfig& config) {
  TimeSeries series;
  if (!config.synth.empty()) {
    auto spec = synthetic_spec_from_json(read_json_file(config.synth));
    if (config.seed) spec.seed = *config.seed;
    series = generate(spec);
  } else if (!config.input.empty()) {
    series = load_csv(config.input, config.column);
  } else {
    throw ConfigError("run needs --input PATH or --synth SPEC");
  }
  if (config.transform == Transform::log_diff_pct) series = growth_rate(series);
  series.validate();
  return series;
}

Range data_range(const TimeSeries& series) {
  const auto [lo, hi] = std::minmax_element(series.values.begin(), series.values.end());
  if (*hi > *lo) return {*lo, *hi};
  return {*lo - 1.0, *hi + 1.0};
}

}  // namespace

void apply_json(const nlohmann::json& doc, ExperimentConfig& c) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "mode") c.mode = parse_mode(value.get<std::string>());
      else if (key == "expert" || key == "experts") {
        c.experts = value.is_array() ? value.get<std::vector<std::string>>() : split(value.get<std::string>(), ',');
      } else if (key == "ridge") c.ridge = value.get<double>();
      else if (key == "loss") c.loss = parse_loss_kind(value.get<std::string>());
      else if (key == "range") {
        const auto r = value.get<std::vector<double>>();
        if (r.size() != 2) throw ConfigError("config 'range' must be [lo, hi]");
        c.range = Range{r[0], r[1]};
      } else if (key == "tau") c.tau = value.get<long>();
      else if (key == "m") c.m = value.get<long>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "eta") c.eta = value.get<double>();
      else if (key == "input") c.input = value.get<std::string>();
      else if (key == "column") c.column = value.get<std::string>();
      else if (key == "transform") c.transform = parse_transform(value.get<std::string>());
      else if (key == "synth") c.synth = value.get<std::string>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "output") c.output = value.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunArtifacts execute(const ExperimentConfig& config) {
  if (!config.m) throw ConfigError("run needs a switch budget --m");
  if (*config.m < 0) throw ConfigError("--m must be nonnegative");
  std::vector<ExpertSpec> specs;
  try {
    for (const auto& e : config.experts) specs.push_back(ExpertSpec::parse(e, config.ridge));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const TimeSeries series = load_series(config);
  const long n = series.size();
  const LossFunction loss(config.loss, config.range.value_or(data_range(series)));

  AggregatorConfig agg;
  agg.mode = config.mode;
  agg.tau = config.tau;
  const long q_n = config.mode == Mode::growing ? ensemble_size(n, config.tau) : static_cast<long>(specs.size());
  const long m = std::min(*config.m, std::max(0L, n - 1));

  bool alpha_tuned = false;
  bool eta_tuned = false;
  if (!config.alpha || !config.eta) {
    if (n < 2 || m >= n - 1) {
      throw std::invalid_argument("automatic tuning needs n >= 2 and m < n-1; pass --alpha and --eta explicitly");
    }
    const Tuning tuned = corollary1_tuning(n, m, q_n);
    alpha_tuned = !config.alpha;
    eta_tuned = !config.eta;
    agg.alpha = config.alpha.value_or(tuned.alpha);
    agg.eta = config.eta.value_or(tuned.eta);
  } else {
    agg.alpha = *config.alpha;
    agg.eta = *config.eta;
  }
  agg.validate();

  RunResult result = run(series, agg, specs, loss);
  RegretReport rep = report(result, m);
  return {std::move(result), std::move(rep), loss, alpha_tuned, eta_tuned};
}

void write_outputs(const ExperimentConfig& config, const RunArtifacts& a) {
  const auto& run = a.run;
  const long m = a.report.m_used;
  const auto best_fixed = best_prefix_losses(run.expert_losses, 0);
  const auto best_m = best_prefix_losses(run.expert_losses, m);

  const std::string csv_path = config.output + ".csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write '" + csv_path + "'");
  csv << "t,y,p_hat,loss,cum_loss,cum_regret_vs_best_fixed,cum_regret_vs_best_m\n";
  double cum = 0.0;
  for (const auto& step : run.steps) {
    cum += step.loss;
    const auto k = static_cast<std::size_t>(step.t - 1);
    csv << step.t << ',' << fmt12(run.outcomes[k]) << ',' << fmt12(step.forecast) << ',' << fmt12(step.loss) << ','
        << fmt12(cum) << ',' << fmt12(cum - best_fixed[k]) << ',' << fmt12(cum - best_m[k]) << '\n';
  }

  const std::string weights_path = config.output + ".weights.jsonl";
  std::ofstream weights(weights_path, std::ios::binary);
  if (!weights) throw std::runtime_error("cannot write '" + weights_path + "'");
  for (const auto& step : run.steps) {
    const nlohmann::json line = {{"t", step.t}, {"q", step.weights.size()}, {"weights", step.weights.weights}};
    weights << line.dump() << '\n';
  }

  nlohmann::json doc = to_json(a.report);
  std::vector<std::string> experts;
  for (const auto& e : run.experts) experts.push_back(e.to_string());
  doc["config"] = {{"mode", to_string(run.config.mode)},
                   {"experts", experts},
                   {"tau", run.config.tau},
                   {"loss", to_string(a.loss.kind())},
                   {"range", {a.loss.range().lo, a.loss.range().hi}},
                   {"alpha_source", a.alpha_tuned ? "corollary1" : "override"},
                   {"eta_source", a.eta_tuned ? "corollary1" : "override"}};
  const std::string report_path = config.output + ".report.json";
  std::ofstream rep(report_path, std::ios::binary);
  if (!rep) throw std::runtime_error("cannot write '" + report_path + "'");
  rep << doc.dump(2) << '\n';
}

namespace {

int cmd_run(const ExperimentConfig& config, std::ostream& out) {
  const auto artifacts = execute(config);
  write_outputs(config, artifacts);
  const auto& r = artifacts.report;
  out << "n=" << r.n << " q_n=" << r.q_n << " alpha=" << fmt12(r.alpha) << " eta=" << fmt12(r.eta) << '\n'
      << "forecaster_loss=" << fmt12(r.forecaster_cum_loss) << " oracle_loss=" << fmt12(r.oracle_loss)
      << " tracking_regret=" << fmt12(r.tracking_regret) << '\n'
      << "wrote " << config.output << ".csv, " << config.output << ".weights.jsonl, " << config.output
      << ".report.json\n";
  return kOk;
}

struct VerifyOptions {
  long n = 6;
  long tau = 2;
  std::optional<double> alpha;
  std::optional<double> eta;
  long trials = 25;
  std::uint64_t seed = 1;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  if (o.n < 1 || o.tau < 1 || o.trials < 1) throw ConfigError("verify needs n, tau, trials >= 1");
  if (o.alpha && !(*o.alpha >= 0.0 && *o.alpha <= 1.0)) throw ConfigError("--alpha must lie in [0,1]");
  if (o.eta && !(*o.eta > 0.0)) throw ConfigError("--eta must be positive");

  const double count = oracle_sequence_count(LossMatrix::growing(o.n, o.tau));
  if (count > kSequenceGuard) {
    err << "error: n=" << o.n << ", tau=" << o.tau << " needs " << static_cast<long long>(count)
        << " sequences, over the enumeration limit of " << static_cast<long long>(kSequenceGuard)
        << "; use a smaller --n or a larger --tau\n";
    return kFailure;
  }

  double max_diff = 0.0;
  for (long k = 0; k < o.trials; ++k) {
    std::mt19937_64 engine(o.seed * 1000003ULL + static_cast<std::uint64_t>(k));
    AggregatorConfig cfg;
    cfg.mode = Mode::growing;
    cfg.tau = o.tau;
    cfg.alpha = o.alpha.value_or(unit_uniform(engine));
    cfg.eta = o.eta.value_or(2.0 * (1.0 - unit_uniform(engine)));
    auto losses = LossMatrix::growing(o.n, o.tau);
    for (long t = 1; t <= o.n; ++t) {
      for (long i = 1; i <= losses.live(t); ++i) losses.set(i, t, unit_uniform(engine));
    }
    const auto marginals = sequence_ewaf_oracle(losses, cfg);
    const auto weights = growing_weights(losses, cfg);
    for (std::size_t t = 0; t < weights.size(); ++t) {
      for (std::size_t i = 0; i < weights[t].size(); ++i) {
        max_diff = std::max(max_diff, std::abs(weights[t][i] - marginals[t][i]));
      }
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", max_diff);
  const bool ok = max_diff <= 1e-10;
  out << "trials=" << o.trials << " n=" << o.n << " tau=" << o.tau << " max_abs_diff=" << buf
      << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kFailure;
}

struct BoundOptions {
  long n = 0;
  long m = 0;
  std::optional<long> tau;
  std::optional<long> q;
  std::optional<double> alpha;
  std::optional<double> eta;
};

int cmd_bound(const BoundOptions& o, std::ostream& out) {
  if (o.n < 1) throw ConfigError("bound needs --n >= 1");
  if (o.m < 0 || (o.n >= 2 && o.m > o.n - 1)) throw ConfigError("bound needs 0 <= m <= n-1");
  if (o.tau.has_value() == o.q.has_value()) throw ConfigError("bound needs exactly one of --tau or --q");
  const long q_n = o.q ? *o.q : ensemble_size(o.n, *o.tau);
  auto finite = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json doc = {{"n", o.n}, {"m", o.m}, {"q_n", q_n}};
  if (o.n >= 2) {
    const auto tuned = corollary1_tuning(o.n, o.m, q_n);
    doc["corollary1"] = {{"alpha_hat", tuned.alpha}, {"eta_hat", finite(tuned.eta)}, {"bound", finite(tuned.bound)}};
  }
  if (o.alpha || o.eta) {
    if (!(o.alpha && o.eta)) throw ConfigError("theorem bound needs both --alpha and --eta");
    doc["theorem2_bound"] = finite(theorem2_bound(o.n, o.m, q_n, *o.alpha, *o.eta));
  }
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& output,
              std::ostream& out) {
  auto spec = synthetic_spec_from_json(read_json_file(spec_path));
  if (seed) spec.seed = *seed;
  const auto series = generate(spec);
  std::ofstream file;
  if (!output.empty()) {
    file.open(output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + output + "'");
  }
  std::ostream& sink = output.empty() ? out : file;
  sink << "y\n";
  for (double v : series.values) sink << fmt12(v) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Growing-ensemble fixed-shares forecasting and tracking-regret tools", "growfs"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run an aggregator over a series and report tracking regret");
  std::string config_path;
  std::optional<std::string> mode, experts, loss, range, input, column, transform, synth, output;
  std::optional<double> ridge, alpha, eta;
  std::optional<long> tau, m;
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("--config", config_path, "JSON file mirroring these flags; flags override it");
  run_cmd->add_option("--mode", mode, "ewaf | fixed | growing (default growing)");
  run_cmd->add_option("--expert", experts, "ar:P | mean | last; comma-separated list for static modes");
  run_cmd->add_option("--ridge", ridge, "ridge term for AR experts (default 1e-6)");
  run_cmd->add_option("--loss", loss, "squared | absolute (default squared)");
  run_cmd->add_option("--range", range, "LO,HI normalization range (default: data min,max)");
  run_cmd->add_option("--tau", tau, "epoch length (default 1)");
  run_cmd->add_option("--m", m, "switch budget of the comparator sequence");
  run_cmd->add_option("--alpha", alpha, "share rate (default: tuned from n, m, q_n)");
  run_cmd->add_option("--eta", eta, "learning rate (default: tuned from n, m, q_n)");
  run_cmd->add_option("--input", input, "CSV input with a header row");
  run_cmd->add_option("--column", column, "CSV column to read (default y)");
  run_cmd->add_option("--transform", transform, "raw | growth (default raw)");
  run_cmd->add_option("--synth", synth, "synthetic spec JSON to use instead of --input");
  run_cmd->add_option("--seed", seed, "seed override for --synth");
  run_cmd->add_option("--output", output, "output path prefix (default run)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Check growing fixed shares against sequence-space weighting");
  verify_cmd->alias("verify-equivalence");
  VerifyOptions vo;
  verify_cmd->add_option("--n", vo.n, "series length");
  verify_cmd->add_option("--tau", vo.tau, "epoch length");
  verify_cmd->add_option("--alpha", vo.alpha, "share rate (default: random per trial)");
  verify_cmd->add_option("--eta", vo.eta, "learning rate (default: random per trial in (0,2])");
  verify_cmd->add_option("--trials", vo.trials, "random loss matrices to check");
  verify_cmd->add_option("--seed", vo.seed, "base seed");

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "Evaluate the tracking-regret bound and its tuning");
  BoundOptions bo;
  bound_cmd->add_option("--n", bo.n, "horizon")->required();
  bound_cmd->add_option("--m", bo.m, "switch budget")->required();
  bound_cmd->add_option("--tau", bo.tau, "epoch length (q_n = 1 + n / tau)");
  bound_cmd->add_option("--q", bo.q, "final ensemble size, instead of --tau");
  bound_cmd->add_option("--alpha", bo.alpha, "share rate for the bound");
  bound_cmd->add_option("--eta", bo.eta, "learning rate for the bound");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a piecewise-AR series as CSV");
  std::string spec_path;
  std::optional<std::uint64_t> synth_seed;
  std::string synth_output;
  synth_cmd->add_option("--spec", spec_path, "synthetic spec JSON")->required();
  synth_cmd->add_option("--seed", synth_seed, "seed override");
  synth_cmd->add_option("--output", synth_output, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*run_cmd) {
      ExperimentConfig config;
      if (!config_path.empty()) apply_json(read_json_file(config_path), config);
      try {
        if (mode) config.mode = parse_mode(*mode);
        if (experts) config.experts = split(*experts, ',');
        if (ridge) config.ridge = *ridge;
        if (loss) config.loss = parse_loss_kind(*loss);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      if (range) config.range = parse_range(*range);
      if (tau) config.tau = *tau;
      if (m) config.m = *m;
      if (alpha) config.alpha = *alpha;
      if (eta) config.eta = *eta;
      if (input) config.input = *input;
      if (column) config.column = *column;
      if (transform) config.transform = parse_transform(*transform);
      if (synth) config.synth = *synth;
      if (seed) config.seed = *seed;
      if (output) config.output = *output;
      if (config.tau < 1) throw ConfigError("--tau must be >= 1");
      return cmd_run(config, out);
    }
    if (*verify_cmd) return cmd_verify(vo, out, err);
    if (*bound_cmd) return cmd_bound(bo, out);
    if (*synth_cmd) return cmd_synth(spec_path, synth_seed, synth_output, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace growfs::cli

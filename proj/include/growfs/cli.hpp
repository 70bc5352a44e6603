#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "growfs/data.hpp"
#include "growfs/ensemble.hpp"
#include "growfs/expert.hpp"
#include "growfs/loss.hpp"
#include "growfs/regret.hpp"

namespace growfs::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,      // module error, missing file, verification failure
  kConfigError = 2,  // malformed flags or config file
};

/// Settings for one `run`; fields left empty are resolved once the series is
/// loaded (range from the data, alpha/eta by the corollary tuning).
struct ExperimentConfig {
  Mode mode = Mode::growing;
  std::vector<std::string> experts = {"ar:1"};
  double ridge = 1e-6;
  LossKind loss = LossKind::squared;
  std::optional<Range> range;
  long tau = 1;
  std::optional<long> m;
  std::optional<double> alpha;
  std::optional<double> eta;
  std::string input;
  std::string column = "y";
  Transform transform = Transform::raw;
  std::string synth;  // alternative input: synthetic spec JSON
  std::optional<std::uint64_t> seed;
  std::string output = "run";
};

/// Applies keys of a JSON config document onto `config`. Throws
/// std::invalid_argument on unknown keys or bad values.
void apply_json(const nlohmann::json& doc, ExperimentConfig& config);

struct RunArtifacts {
  RunResult run;
  RegretReport report;
  LossFunction loss;
  bool alpha_tuned = false;
  bool eta_tuned = false;
};

/// Loads the series, resolves defaults, runs the aggregator and builds the
/// regret report. Does not write files.
RunArtifacts execute(const ExperimentConfig& config);

/// Writes <output>.csv, <output>.weights.jsonl and <output>.report.json.
void write_outputs(const ExperimentConfig& config, const RunArtifacts& artifacts);

/// Entry point for the `growfs` tool.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace growfs::cli

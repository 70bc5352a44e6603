#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "growfs/ensemble.hpp"
#include "growfs/loss_matrix.hpp"

namespace growfs {

/// Expert indices i_1..i_n (1-based).
struct ExpertSequence {
  std::vector<long> experts;

  long size() const { return static_cast<long>(experts.size()); }
  /// Number of t with i_{t+1} != i_t.
  long switches() const;
};

/// Cumulative loss of a sequence against a loss matrix; throws if the
/// sequence uses an unavailable expert or is not anchored on a starting expert.
double sequence_loss(const LossMatrix& losses, const ExpertSequence& sequence);

struct BestSequence {
  double loss = 0.0;
  ExpertSequence path;
};

/// Minimum cumulative loss over valid sequences with at most m switches.
/// Valid means i_1 <= losses.initial() and i_t <= live(t). Ties prefer the
/// lower expert index, then fewer switches. m larger than n-1 is clamped.
BestSequence best_sequence(const LossMatrix& losses, long m);

/// Element t-1 is the best loss over the prefix y_1..y_t with at most m switches.
std::vector<double> best_prefix_losses(const LossMatrix& losses, long m);

/// Element m is the best loss with at most m switches, for m = 0..m_max
/// (m_max clamped to n-1). One pass instead of one call per budget.
std::vector<double> best_losses_by_budget(const LossMatrix& losses, long m_max);

/// Thrown when the sequence enumeration would exceed its size guard.
class EnumerationGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSequenceGuard = 1e6;

/// Number of sequences the sequence-space oracle enumerates for this matrix.
double oracle_sequence_count(const LossMatrix& losses);

/// Exponential weighting over whole expert sequences by brute-force
/// enumeration. Element t is the normalized marginal distribution of the
/// expert used at step t+1 under the sequence weights after t losses, for
/// t = 0..n. Sequence prior weights follow the switch-counting recursion
/// (ratio alpha/a + (1-alpha)·[stay], where a is the number of experts usable
/// at the next step); a growing ensemble can use 1 + floor((s-1)/tau) experts
/// at step s.
std::vector<std::vector<double>> sequence_ewaf_oracle(const LossMatrix& losses, const AggregatorConfig& cfg,
                                                      double guard = kSequenceGuard);

/// Natural-log binary entropy with 0 ln 0 = 0. Throws outside [0,1].
double binary_entropy(double p);

/// (m/eta) ln q_n - (1/eta) ln(alpha^m (1-alpha)^(n-m)) + eta n / 8.
/// Returns +infinity when alpha in {0,1} makes the log term diverge.
double theorem2_bound(long n, long m, long q_n, double alpha, double eta);

struct Tuning {
  double alpha = 0.0;
  double eta = 0.0;
  double bound = 0.0;
};

/// Smallest eta the tuning will return (reached only when m = 0).
inline constexpr double kMinTunedEta = 1e-6;

/// alpha = m/(n-1), eta = sqrt(8 S / n), bound = sqrt(n S / 2) with
/// S = (n-1) H(alpha) - ln(1-alpha) + m ln q_n. For m = n-1 the share rate
/// is 1 and eta and the bound are +infinity.
Tuning corollary1_tuning(long n, long m, long q_n);

struct RegretReport {
  long n = 0;
  long q_n = 0;
  long m_used = 0;
  double alpha = 0.0;
  double eta = 0.0;
  double forecaster_cum_loss = 0.0;
  double oracle_loss = 0.0;
  ExpertSequence oracle_path;
  double tracking_regret = 0.0;
  /// Only defined for growing runs.
  std::optional<double> theorem2_bound;
  Tuning corollary1;
};

RegretReport report(const RunResult& run, long m);

nlohmann::json to_json(const RegretReport& report);

}  // namespace growfs

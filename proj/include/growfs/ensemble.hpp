#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "growfs/data.hpp"
#include "growfs/expert.hpp"
#include "growfs/loss.hpp"
#include "growfs/loss_matrix.hpp"

namespace growfs {

enum class Mode { ewaf, fixed_shares, growing };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

struct AggregatorConfig {
  double eta = 1.0;    // learning rate
  double alpha = 0.0;  // share rate
  long tau = 1;        // epoch length (growing mode)
  Mode mode = Mode::growing;
  // The birth weight is fixed to alpha / q: a newborn enters with prior
  // weight 0 and receives its first mass from the share term.

  void validate() const;
};

/// Normalized expert weights. Sum is 1 up to rounding after every update.
struct WeightVector {
  std::vector<double> weights;

  static WeightVector uniform(std::size_t q);
  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
  double sum() const;
};

struct StepResult {
  long t = 0;
  double forecast = 0.0;
  std::vector<double> expert_forecasts;
  std::vector<double> expert_losses;
  double loss = 0.0;
  WeightVector weights;  // posterior, after the update at t
};

// Building blocks over raw losses; the oracles and regret checks drive these
// directly with synthetic loss matrices.

/// v_i = w_i exp(-eta * loss_i).
std::vector<double> exponential_update(std::span<const double> weights, std::span<const double> losses,
                                       double eta);
/// w'_i = (1 - alpha) v_i + (alpha / q) sum(v), unnormalized.
std::vector<double> share_update(std::span<const double> v, double alpha);
/// Scales to unit sum; throws std::logic_error when the total is not positive.
WeightVector normalize(std::vector<double> weights);

/// Weight-convex combination sum_i w_i f_i / sum_i w_i.
double weighted_forecast(const WeightVector& weights, std::span<const double> forecasts);

StepResult ewaf_step(const WeightVector& weights, std::span<const double> forecasts, double y,
                     const LossFunction& loss, const AggregatorConfig& cfg);
StepResult fixed_shares_step(const WeightVector& weights, std::span<const double> forecasts, double y,
                             const LossFunction& loss, const AggregatorConfig& cfg);
/// `weights` must have q_t entries; at an epoch boundary the last (newborn)
/// entry must be 0.
StepResult growing_step(const WeightVector& weights, std::span<const double> forecasts, double y, long t,
                        const LossFunction& loss, const AggregatorConfig& cfg);

/// Posterior weights of the growing forecaster after each step of a loss
/// matrix; element t holds w_t (element 0 is the initial vector (1)).
std::vector<WeightVector> growing_weights(const LossMatrix& losses, const AggregatorConfig& cfg);

/// Cumulative mixture loss sum_t sum_i w_{i,t-1} ℓ(i,t) of the growing
/// forecaster on a loss matrix (its loss when ℓ is linear in the forecast).
double growing_mixture_loss(const LossMatrix& losses, const AggregatorConfig& cfg);

struct RunResult {
  AggregatorConfig config;
  std::vector<ExpertSpec> experts;
  std::vector<double> outcomes;
  std::vector<StepResult> steps;
  LossMatrix expert_losses = LossMatrix::fixed(0, 1);

  long n() const { return static_cast<long>(steps.size()); }
  double cumulative_loss() const;
};

/// Runs an aggregator over a series. Growing mode takes exactly one expert
/// spec and spawns a copy at every epoch boundary t = kτ, trained on
/// y_{(k-1)τ+1}..y_{t-1}. Static modes run one expert per spec, all trained
/// from y_1.
RunResult run(const TimeSeries& series, const AggregatorConfig& cfg, std::span<const ExpertSpec> experts,
              const LossFunction& loss);

}  // namespace growfs

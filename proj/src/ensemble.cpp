#include "growfs/ensemble.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace growfs {
namespace {

void check_sizes(const WeightVector& weights, std::span<const double> forecasts) {
  if (weights.size() != forecasts.size()) {
    throw std::invalid_argument("got " + std::to_string(forecasts.size()) + " forecasts for " +
                                std::to_string(weights.size()) + " weights");
  }
  if (weights.size() == 0) throw std::invalid_argument("empty ensemble");
}

std::vector<double> expert_losses(std::span<const double> forecasts, double y, const LossFunction& loss) {
  std::vector<double> out(forecasts.size());
  for (std::size_t i = 0; i < forecasts.size(); ++i) out[i] = loss(forecasts[i], y);
  return out;
}

StepResult shared_step(const WeightVector& weights, std::span<const double> forecasts, double y, long t,
                       const LossFunction& loss, double eta, double alpha) {
  check_sizes(weights, forecasts);
  StepResult step;
  step.t = t;
  step.forecast = weighted_forecast(weights, forecasts);
  step.expert_forecasts.assign(forecasts.begin(), forecasts.end());
  step.expert_losses = expert_losses(forecasts, y, loss);
  step.loss = loss(step.forecast, y);
  step.weights = normalize(share_update(exponential_update(weights.weights, step.expert_losses, eta), alpha));
  return step;
}

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "ewaf") return Mode::ewaf;
  if (name == "fixed" || name == "fixed_shares") return Mode::fixed_shares;
  if (name == "growing") return Mode::growing;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected ewaf|fixed|growing)");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::ewaf: return "ewaf";
    case Mode::fixed_shares: return "fixed";
    case Mode::growing: return "growing";
  }
  return "?";
}

void AggregatorConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive and finite");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  if (tau < 1) throw std::invalid_argument("tau must be >= 1");
}

WeightVector WeightVector::uniform(std::size_t q) {
  if (q == 0) throw std::invalid_argument("empty ensemble");
  return {std::vector<double>(q, 1.0 / static_cast<double>(q))};
}

double WeightVector::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::vector<double> exponential_update(std::span<const double> weights, std::span<const double> losses,
                                       double eta) {
  if (weights.size() != losses.size()) throw std::invalid_argument("weights and losses differ in length");
  std::vector<double> v(weights.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = weights[i] * std::exp(-eta * losses[i]);
  return v;
}

std::vector<double> share_update(std::span<const double> v, double alpha) {
  if (v.empty()) throw std::invalid_argument("empty ensemble");
  const double pool = alpha * std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = (1.0 - alpha) * v[i] + pool;
  return w;
}

WeightVector normalize(std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) throw std::logic_error("weight vector collapsed to zero");
  for (double& w : weights) w /= total;
  return {std::move(weights)};
}

double weighted_forecast(const WeightVector& weights, std::span<const double> forecasts) {
  check_sizes(weights, forecasts);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    num += weights[i] * forecasts[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw std::logic_error("weight vector collapsed to zero");
  return num / den;
}

StepResult ewaf_step(const WeightVector& weights, std::span<const double> forecasts, double y,
                     const LossFunction& loss, const AggregatorConfig& cfg) {
  cfg.validate();
  check_sizes(weights, forecasts);
  StepResult step;
  step.forecast = weighted_forecast(weights, forecasts);
  step.expert_forecasts.assign(forecasts.begin(), forecasts.end());
  step.expert_losses = expert_losses(forecasts, y, loss);
  step.loss = loss(step.forecast, y);
  step.weights = normalize(exponential_update(weights.weights, step.expert_losses, cfg.eta));
  return step;
}

StepResult fixed_shares_step(const WeightVector& weights, std::span<const double> forecasts, double y,
                             const LossFunction& loss, const AggregatorConfig& cfg) {
  cfg.validate();
  return shared_step(weights, forecasts, y, 0, loss, cfg.eta, cfg.alpha);
}

StepResult growing_step(const WeightVector& weights, std::span<const double> forecasts, double y, long t,
                        const LossFunction& loss, const AggregatorConfig& cfg) {
  cfg.validate();
  if (t < 1) throw std::invalid_argument("growing_step: t must be >= 1");
  const long q = ensemble_size(t, cfg.tau);
  if (static_cast<long>(forecasts.size()) != q || static_cast<long>(weights.size()) != q) {
    throw std::invalid_argument("growing_step at t=" + std::to_string(t) + " expects " + std::to_string(q) +
                                " experts, got " + std::to_string(forecasts.size()) + " forecasts and " +
                                std::to_string(weights.size()) + " weights");
  }
  if (t % cfg.tau == 0 && weights.weights.back() != 0.0) {
    throw std::invalid_argument("growing_step: newborn expert must enter with prior weight 0");
  }
  return shared_step(weights, forecasts, y, t, loss, cfg.eta, cfg.alpha);
}

std::vector<WeightVector> growing_weights(const LossMatrix& losses, const AggregatorConfig& cfg) {
  cfg.validate();
  if (!losses.is_growing() || losses.tau() != cfg.tau) {
    throw std::invalid_argument("growing_weights needs a growing loss matrix with the configured tau");
  }
  std::vector<WeightVector> out;
  out.reserve(static_cast<std::size_t>(losses.n() + 1));
  out.push_back({{1.0}});
  for (long t = 1; t <= losses.n(); ++t) {
    std::vector<double> prior = out.back().weights;
    prior.resize(static_cast<std::size_t>(losses.live(t)), 0.0);
    out.push_back(normalize(share_update(exponential_update(prior, losses.row(t), cfg.eta), cfg.alpha)));
  }
  return out;
}

double growing_mixture_loss(const LossMatrix& losses, const AggregatorConfig& cfg) {
  const auto weights = growing_weights(losses, cfg);
  double total = 0.0;
  for (long t = 1; t <= losses.n(); ++t) {
    const auto row = losses.row(t);
    const auto& prior = weights[static_cast<std::size_t>(t - 1)].weights;
    for (std::size_t i = 0; i < prior.size(); ++i) total += prior[i] * row[i];
  }
  return total;
}

double RunResult::cumulative_loss() const {
  double total = 0.0;
  for (const auto& s : steps) total += s.loss;
  return total;
}

RunResult run(const TimeSeries& series, const AggregatorConfig& cfg, std::span<const ExpertSpec> experts,
              const LossFunction& loss) {
  cfg.validate();
  series.validate();
  if (experts.empty()) throw std::invalid_argument("run needs at least one expert spec");
  if (cfg.mode == Mode::growing && experts.size() != 1) {
    throw std::invalid_argument("growing mode spawns copies of a single expert spec");
  }

  const long n = series.size();
  const Range range = loss.range();
  RunResult result;
  result.config = cfg;
  result.experts.assign(experts.begin(), experts.end());
  result.outcomes = series.values;
  result.steps.reserve(static_cast<std::size_t>(n));

  std::vector<Expert> live;
  WeightVector weights;
  if (cfg.mode == Mode::growing) {
    result.expert_losses = LossMatrix::growing(n, cfg.tau);
    live.push_back(Expert::spawn(experts.front(), 0, 1, {}, range));
    weights = {{1.0}};
  } else {
    result.expert_losses = LossMatrix::fixed(n, static_cast<long>(experts.size()));
    for (const auto& spec : experts) live.push_back(Expert::spawn(spec, 0, 1, {}, range));
    weights = WeightVector::uniform(live.size());
  }

  std::vector<double> forecasts;
  for (long t = 1; t <= n; ++t) {
    if (cfg.mode == Mode::growing && ensemble_size(t, cfg.tau) > static_cast<long>(live.size())) {
      // epoch boundary t = kτ: train on the previous epoch's observations so far
      const long window_start = t - cfg.tau + 1;
      const std::span<const double> history(series.values.data() + (window_start - 1),
                                            static_cast<std::size_t>(t - window_start));
      live.push_back(Expert::spawn(experts.front(), t - 1, window_start, history, range));
      weights.weights.push_back(0.0);
    }

    forecasts.clear();
    for (const auto& e : live) forecasts.push_back(e.predict());
    const double y = series.at(t);

    StepResult step;
    switch (cfg.mode) {
      case Mode::ewaf: step = ewaf_step(weights, forecasts, y, loss, cfg); break;
      case Mode::fixed_shares: step = fixed_shares_step(weights, forecasts, y, loss, cfg); break;
      case Mode::growing: step = growing_step(weights, forecasts, y, t, loss, cfg); break;
    }
    step.t = t;
    for (std::size_t i = 0; i < step.expert_losses.size(); ++i) {
      result.expert_losses.set(static_cast<long>(i) + 1, t, step.expert_losses[i]);
    }
    weights = step.weights;
    result.steps.push_back(std::move(step));

    for (auto& e : live) e.observe(y);
  }
  return result;
}

}  // namespace growfs

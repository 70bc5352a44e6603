#include "growfs/regret.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace growfs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  double value = kInf;
  long index = -1;

  bool better_than(const Candidate& other) const {
    return value < other.value || (value == other.value && index >= 0 && (other.index < 0 || index < other.index));
  }
};

// Forward DP over (step, expert, switches used). Calls `visit(t, layer)` with
// the value layer after each step; fills `pred` when non-null.
template <class Visit>
void run_dp(const LossMatrix& losses, long m, std::vector<std::vector<std::int32_t>>* pred, Visit&& visit) {
  const long n = losses.n();
  const auto budget = static_cast<std::size_t>(m + 1);
  std::vector<std::vector<double>> layer(budget);
  std::vector<std::vector<double>> next(budget);

  const long q1 = losses.live(1);
  for (auto& row : layer) row.assign(static_cast<std::size_t>(q1), kInf);
  for (long i = 0; i < std::min(losses.initial(), q1); ++i) layer[0][static_cast<std::size_t>(i)] = losses.at(i + 1, 1);
  if (pred) {
    pred->assign(static_cast<std::size_t>(n), {});
    (*pred)[0].assign(budget * static_cast<std::size_t>(q1), -1);
  }
  visit(1L, layer);

  for (long t = 2; t <= n; ++t) {
    const auto row = losses.row(t);
    const auto q = row.size();
    const auto prev_q = layer[0].size();
    if (pred) (*pred)[static_cast<std::size_t>(t - 1)].assign(budget * q, -1);
    for (std::size_t s = 0; s < budget; ++s) {
      // two best predecessors in layer s-1, ordered by (value, index)
      Candidate first, second;
      if (s > 0) {
        for (std::size_t j = 0; j < prev_q; ++j) {
          const Candidate c{layer[s - 1][j], static_cast<long>(j)};
          if (c.value == kInf) continue;
          if (c.better_than(first)) {
            second = first;
            first = c;
          } else if (c.better_than(second)) {
            second = c;
          }
        }
      }
      next[s].assign(q, kInf);
      for (std::size_t i = 0; i < q; ++i) {
        Candidate best;
        if (i < prev_q && layer[s][i] != kInf) best = {layer[s][i], static_cast<long>(i)};
        const Candidate& sw = (first.index == static_cast<long>(i)) ? second : first;
        if (sw.index >= 0 && sw.better_than(best)) best = sw;
        if (best.index < 0) continue;
        next[s][i] = best.value + row[i];
        if (pred) (*pred)[static_cast<std::size_t>(t - 1)][s * q + i] = static_cast<std::int32_t>(best.index);
      }
    }
    std::swap(layer, next);
    visit(t, layer);
  }
}

long clamp_budget(const LossMatrix& losses, long m) {
  if (m < 0) throw std::invalid_argument("switch budget m must be nonnegative");
  return std::min(m, std::max(0L, losses.n() - 1));
}

// Experts usable at step s (they carry weight when forecasting y_s).
long usable(const LossMatrix& losses, long s) {
  return losses.is_growing() ? ensemble_size(s - 1, losses.tau()) : losses.initial();
}

}  // namespace

long ExpertSequence::switches() const {
  long count = 0;
  for (std::size_t t = 1; t < experts.size(); ++t) count += experts[t] != experts[t - 1];
  return count;
}

double sequence_loss(const LossMatrix& losses, const ExpertSequence& sequence) {
  if (sequence.size() != losses.n()) throw std::invalid_argument("sequence length differs from loss matrix");
  if (losses.n() > 0 && (sequence.experts[0] < 1 || sequence.experts[0] > losses.initial())) {
    throw std::invalid_argument("sequence must start from an initially available expert");
  }
  double total = 0.0;
  for (long t = 1; t <= losses.n(); ++t) total += losses.at(sequence.experts[static_cast<std::size_t>(t - 1)], t);
  return total;
}

BestSequence best_sequence(const LossMatrix& losses, long m) {
  m = clamp_budget(losses, m);
  BestSequence best;
  if (losses.n() == 0) return best;

  std::vector<std::vector<std::int32_t>> pred;
  std::vector<std::vector<double>> final_layer;
  run_dp(losses, m, &pred, [&](long t, const auto& layer) {
    if (t == losses.n()) final_layer = layer;
  });

  // lowest value, then lowest expert index, then fewest switches
  long best_i = -1;
  long best_s = -1;
  double best_value = kInf;
  const auto q = static_cast<long>(final_layer[0].size());
  for (long i = 0; i < q; ++i) {
    for (long s = 0; s <= m; ++s) {
      const double v = final_layer[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
      if (v < best_value) {
        best_value = v;
        best_i = i;
        best_s = s;
      }
    }
  }

  best.loss = best_value;
  best.path.experts.assign(static_cast<std::size_t>(losses.n()), 0);
  long i = best_i;
  long s = best_s;
  for (long t = losses.n(); t >= 1; --t) {
    best.path.experts[static_cast<std::size_t>(t - 1)] = i + 1;
    if (t == 1) break;
    const auto q_t = static_cast<long>(losses.row(t).size());
    const long j = pred[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(s * q_t + i)];
    if (j != i) --s;
    i = j;
  }
  return best;
}

std::vector<double> best_prefix_losses(const LossMatrix& losses, long m) {
  m = clamp_budget(losses, m);
  std::vector<double> out;
  if (losses.n() == 0) return out;
  out.reserve(static_cast<std::size_t>(losses.n()));
  run_dp(losses, m, nullptr, [&](long, const auto& layer) {
    // layers beyond the prefix's t-1 possible switches stay infinite
    double v = kInf;
    for (const auto& row : layer) v = std::min(v, *std::min_element(row.begin(), row.end()));
    out.push_back(v);
  });
  return out;
}

std::vector<double> best_losses_by_budget(const LossMatrix& losses, long m_max) {
  m_max = clamp_budget(losses, m_max);
  std::vector<double> out(static_cast<std::size_t>(m_max + 1), 0.0);
  if (losses.n() == 0) return out;
  run_dp(losses, m_max, nullptr, [&](long t, const auto& layer) {
    if (t != losses.n()) return;
    double running = kInf;
    for (std::size_t s = 0; s < layer.size(); ++s) {
      running = std::min(running, *std::min_element(layer[s].begin(), layer[s].end()));
      out[s] = running;
    }
  });
  return out;
}

double oracle_sequence_count(const LossMatrix& losses) {
  double count = static_cast<double>(losses.initial());
  for (long s = 2; s <= losses.n() + 1; ++s) count *= static_cast<double>(usable(losses, s));
  return count;
}

std::vector<std::vector<double>> sequence_ewaf_oracle(const LossMatrix& losses, const AggregatorConfig& cfg,
                                                      double guard) {
  cfg.validate();
  if (losses.is_growing() && losses.tau() != cfg.tau) {
    throw std::invalid_argument("loss matrix and configuration disagree on tau");
  }
  const double count = oracle_sequence_count(losses);
  if (count > guard) {
    throw EnumerationGuardError("sequence enumeration would visit " + std::to_string(static_cast<long long>(count)) +
                                " sequences (limit " + std::to_string(static_cast<long long>(guard)) +
                                "); use a smaller n or a larger tau");
  }

  const long n = losses.n();
  std::vector<std::vector<double>> marginals(static_cast<std::size_t>(n + 1));
  for (long t = 0; t <= n; ++t) marginals[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(usable(losses, t + 1)), 0.0);

  // Depth-first over positions 1..n+1. prior[s] = φ_0(i_1..i_s);
  // discount[t] = exp(-eta * loss of i_1..i_t).
  std::vector<long> seq(static_cast<std::size_t>(n + 2), 0);
  std::vector<double> prior(static_cast<std::size_t>(n + 2), 0.0);
  std::vector<double> discount(static_cast<std::size_t>(n + 1), 1.0);

  auto leaf = [&] {
    const double weight = prior[static_cast<std::size_t>(n + 1)];
    for (long t = 0; t <= n; ++t) {
      const double phi_t = weight * discount[static_cast<std::size_t>(t)];
      marginals[static_cast<std::size_t>(t)][static_cast<std::size_t>(seq[static_cast<std::size_t>(t + 1)] - 1)] += phi_t;
    }
  };

  auto descend = [&](auto&& self, long s) -> void {
    if (s > n + 1) {
      leaf();
      return;
    }
    const long a = usable(losses, s);
    for (long i = 1; i <= a; ++i) {
      const auto us = static_cast<std::size_t>(s);
      seq[us] = i;
      if (s == 1) {
        prior[us] = 1.0 / static_cast<double>(a);
      } else {
        const double stay = (i == seq[us - 1]) ? 1.0 : 0.0;
        prior[us] = prior[us - 1] * (cfg.alpha / static_cast<double>(a) + (1.0 - cfg.alpha) * stay);
      }
      if (s <= n) discount[us] = discount[us - 1] * std::exp(-cfg.eta * losses.at(i, s));
      self(self, s + 1);
    }
  };
  descend(descend, 1);

  for (auto& marginal : marginals) {
    double total = 0.0;
    for (double v : marginal) total += v;
    if (!(total > 0.0)) throw std::logic_error("sequence weights collapsed to zero");
    for (double& v : marginal) v /= total;
  }
  return marginals;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binary_entropy: p must lie in [0,1]");
  auto term = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
  return term(p) + term(1.0 - p);
}

double theorem2_bound(long n, long m, long q_n, double alpha, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("theorem2_bound: eta must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("theorem2_bound: alpha must lie in [0,1]");
  if (n < 1 || m < 0 || q_n < 1) throw std::invalid_argument("theorem2_bound: need n >= 1, m >= 0, q_n >= 1");
  // ln(alpha^m (1-alpha)^(n-m)) with 0 ln 0 = 0 for a vanishing exponent
  auto weighted_log = [](double count, double base) -> double {
    if (count == 0.0) return 0.0;
    return base > 0.0 ? count * std::log(base) : -kInf;
  };
  const double log_prior = weighted_log(static_cast<double>(m), alpha) +
                           weighted_log(static_cast<double>(n - m), 1.0 - alpha);
  if (log_prior == -kInf) return kInf;
  return static_cast<double>(m) / eta * std::log(static_cast<double>(q_n)) - log_prior / eta +
         eta * static_cast<double>(n) / 8.0;
}

Tuning corollary1_tuning(long n, long m, long q_n) {
  if (n < 2) throw std::invalid_argument("corollary1_tuning: need n >= 2");
  if (m < 0 || m > n - 1) throw std::invalid_argument("corollary1_tuning: need 0 <= m <= n-1");
  if (q_n < 1) throw std::invalid_argument("corollary1_tuning: need q_n >= 1");
  Tuning out;
  out.alpha = static_cast<double>(m) / static_cast<double>(n - 1);
  if (m == n - 1) {
    out.eta = kInf;
    out.bound = kInf;
    return out;
  }
  const double complexity = static_cast<double>(n - 1) * binary_entropy(out.alpha) - std::log1p(-out.alpha) +
                            static_cast<double>(m) * std::log(static_cast<double>(q_n));
  out.eta = std::max(std::sqrt(8.0 * complexity / static_cast<double>(n)), kMinTunedEta);
  out.bound = std::sqrt(static_cast<double>(n) * complexity / 2.0);
  return out;
}

RegretReport report(const RunResult& run, long m) {
  if (run.n() == 0) throw std::invalid_argument("report needs a completed run");
  if (m < 0) throw std::invalid_argument("switch budget m must be nonnegative");
  RegretReport r;
  r.n = run.n();
  r.q_n = run.expert_losses.final_size();
  r.m_used = std::min(m, r.n - 1);
  r.alpha = run.config.alpha;
  r.eta = run.config.eta;
  r.forecaster_cum_loss = run.cumulative_loss();
  const auto best = best_sequence(run.expert_losses, r.m_used);
  r.oracle_loss = best.loss;
  r.oracle_path = best.path;
  r.tracking_regret = r.forecaster_cum_loss - r.oracle_loss;
  if (run.config.mode == Mode::growing) r.theorem2_bound = theorem2_bound(r.n, r.m_used, r.q_n, r.alpha, r.eta);
  if (r.n >= 2) r.corollary1 = corollary1_tuning(r.n, r.m_used, r.q_n);
  return r;
}

nlohmann::json to_json(const RegretReport& r) {
  auto finite_or_null = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json doc;
  doc["n"] = r.n;
  doc["q_n"] = r.q_n;
  doc["m_used"] = r.m_used;
  doc["alpha"] = r.alpha;
  doc["eta"] = r.eta;
  doc["forecaster_cum_loss"] = r.forecaster_cum_loss;
  doc["oracle_loss"] = r.oracle_loss;
  doc["oracle_path"] = r.oracle_path.experts;
  doc["oracle_switches"] = r.oracle_path.switches();
  doc["tracking_regret"] = r.tracking_regret;
  doc["theorem2_bound"] = r.theorem2_bound ? finite_or_null(*r.theorem2_bound) : nlohmann::json(nullptr);
  doc["corollary1"] = {{"alpha_hat", r.corollary1.alpha},
                       {"eta_hat", finite_or_null(r.corollary1.eta)},
                       {"bound", finite_or_null(r.corollary1.bound)}};
  return doc;
}

}  // namespace growfs

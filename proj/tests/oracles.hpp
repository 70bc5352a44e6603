#pragma once

// Brute-force references used only by the test suites. Nothing here calls the
// dynamic program or the fixed-shares recursion it checks.

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "growfs/loss_matrix.hpp"

namespace growfs::testing {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline LossMatrix random_growing_losses(long n, long tau, std::mt19937_64& rng) {
  auto lm = LossMatrix::growing(n, tau);
  for (long t = 1; t <= n; ++t) {
    for (long i = 1; i <= lm.live(t); ++i) lm.set(i, t, uniform01(rng));
  }
  return lm;
}

/// Calls visit(sequence) for every valid comparator sequence: i_1 among the
/// initial experts and i_t <= live(t).
inline void for_each_sequence(const LossMatrix& lm, const std::function<void(const std::vector<long>&)>& visit) {
  std::vector<long> seq(static_cast<std::size_t>(lm.n()));
  std::function<void(long)> rec = [&](long t) {
    if (t > lm.n()) {
      visit(seq);
      return;
    }
    const long limit = t == 1 ? lm.initial() : lm.live(t);
    for (long i = 1; i <= limit; ++i) {
      seq[static_cast<std::size_t>(t - 1)] = i;
      rec(t + 1);
    }
  };
  if (lm.n() > 0) rec(1);
}

inline double count_sequences(const LossMatrix& lm) {
  double count = lm.n() > 0 ? static_cast<double>(lm.initial()) : 1.0;
  for (long t = 2; t <= lm.n(); ++t) count *= static_cast<double>(lm.live(t));
  return count;
}

inline long count_switches(const std::vector<long>& seq) {
  long s = 0;
  for (std::size_t t = 1; t < seq.size(); ++t) s += seq[t] != seq[t - 1];
  return s;
}

/// Minimum loss over valid sequences with at most m switches, summed in time order.
inline double enumerate_best(const LossMatrix& lm, long m) {
  double best = std::numeric_limits<double>::infinity();
  for_each_sequence(lm, [&](const std::vector<long>& seq) {
    if (count_switches(seq) > m) return;
    double total = 0.0;
    for (long t = 1; t <= lm.n(); ++t) total += lm.at(seq[static_cast<std::size_t>(t - 1)], t);
    if (total < best) best = total;
  });
  return best;
}

}  // namespace growfs::testing

#pragma once

#include <span>
#include <vector>

namespace growfs {

/// Number of experts alive after step t of a growing ensemble with epoch
/// length tau: 1 + floor(t / tau).
long ensemble_size(long t, long tau);

/// Expert-by-time losses ℓ(i,t) in [0,1], stored only where expert i exists.
/// Indices are 1-based in both i and t.
///
/// For a growing ensemble expert i has an entry at step t iff i <= q_t; the
/// expert born at an epoch boundary t = kτ records the loss of the forecast it
/// made with data up to t-1. A fixed ensemble has every expert at every step.
class LossMatrix {
 public:
  static LossMatrix growing(long n, long tau);
  static LossMatrix fixed(long n, long experts);

  long n() const { return static_cast<long>(rows_.size()); }
  /// Epoch length, or 0 for a fixed ensemble.
  long tau() const { return tau_; }
  bool is_growing() const { return tau_ > 0; }

  /// Experts with a loss entry at step t.
  long live(long t) const;
  /// Experts a comparator sequence may start from.
  long initial() const { return is_growing() ? 1 : fixed_size_; }
  /// q_n.
  long final_size() const { return n() == 0 ? initial() : live(n()); }

  bool available(long i, long t) const { return t >= 1 && t <= n() && i >= 1 && i <= live(t); }
  double at(long i, long t) const;
  void set(long i, long t, double loss);
  std::span<const double> row(long t) const;

 private:
  LossMatrix(long n, long tau, long fixed_size);

  long tau_;
  long fixed_size_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace growfs

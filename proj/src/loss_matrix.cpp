#include "growfs/loss_matrix.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace growfs {

long ensemble_size(long t, long tau) {
  if (tau < 1) throw std::invalid_argument("epoch length tau must be >= 1");
  if (t < 0) throw std::invalid_argument("time index must be nonnegative");
  return 1 + t / tau;
}

LossMatrix::LossMatrix(long n, long tau, long fixed_size) : tau_(tau), fixed_size_(fixed_size) {
  if (n < 0) throw std::invalid_argument("loss matrix length must be nonnegative");
  rows_.resize(static_cast<std::size_t>(n));
  const double unset = std::numeric_limits<double>::quiet_NaN();
  for (long t = 1; t <= n; ++t) rows_[static_cast<std::size_t>(t - 1)].assign(static_cast<std::size_t>(live(t)), unset);
}

LossMatrix LossMatrix::growing(long n, long tau) {
  if (tau < 1) throw std::invalid_argument("epoch length tau must be >= 1");
  return LossMatrix(n, tau, 0);
}

LossMatrix LossMatrix::fixed(long n, long experts) {
  if (experts < 1) throw std::invalid_argument("a fixed ensemble needs at least one expert");
  return LossMatrix(n, 0, experts);
}

long LossMatrix::live(long t) const {
  if (t < 1 || t > n()) throw std::out_of_range("loss matrix step " + std::to_string(t) + " out of range");
  return is_growing() ? ensemble_size(t, tau_) : fixed_size_;
}

double LossMatrix::at(long i, long t) const {
  if (!available(i, t)) {
    throw std::out_of_range("expert " + std::to_string(i) + " unavailable at step " + std::to_string(t));
  }
  return rows_[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i - 1)];
}

void LossMatrix::set(long i, long t, double loss) {
  if (!available(i, t)) {
    throw std::out_of_range("expert " + std::to_string(i) + " unavailable at step " + std::to_string(t));
  }
  if (!(loss >= 0.0 && loss <= 1.0)) throw std::invalid_argument("losses must lie in [0,1]");
  rows_[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i - 1)] = loss;
}

std::span<const double> LossMatrix::row(long t) const {
  live(t);
  return rows_[static_cast<std::size_t>(t - 1)];
}

}  // namespace growfs

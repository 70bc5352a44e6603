#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "growfs/loss.hpp"

namespace growfs {

enum class ExpertKind { ar, mean, last_value };

struct ExpertSpec {
  ExpertKind kind = ExpertKind::ar;
  int order = 1;         // AR order p; ignored by mean/last_value
  double ridge = 1e-6;   // Tikhonov term added to the normal equations

  /// Parses "ar:P", "mean" or "last". Throws std::invalid_argument.
  static ExpertSpec parse(std::string_view text, double ridge = 1e-6);
  std::string to_string() const;
  void validate() const;
};

/// One-step-ahead forecaster trained on y_{window_start}, y_{window_start+1}, ...
///
/// AR experts keep the sufficient statistics of the regression
/// (1, y_{s-1}, ..., y_{s-p}) -> y_s over their window and re-solve the ridge
/// normal equations on every predict. Cold start: with no observations the
/// forecast is the range midpoint, with fewer than p+1 observations it is the
/// running window mean.
class Expert {
 public:
  /// `history` must hold exactly y_{window_start}..y_{birth_time}, i.e.
  /// birth_time - window_start + 1 values (empty when birth_time < window_start).
  static Expert spawn(const ExpertSpec& spec, long birth_time, long window_start,
                      std::span<const double> history, Range range);

  void observe(double y);
  double predict() const;

  /// Ridge solution (intercept, coef_1..coef_p); empty for non-AR experts or
  /// before the first regression pair.
  std::vector<double> coefficients() const;

  /// Normal equations (Gram + ridge*I, cross-moments) as currently accumulated.
  Eigen::MatrixXd regularized_gram() const;
  Eigen::VectorXd cross_moments() const { return cross_; }

  const ExpertSpec& spec() const { return spec_; }
  long birth_time() const { return birth_time_; }
  long window_start() const { return window_start_; }
  /// Number of observations ingested since window_start.
  long count() const { return count_; }
  /// Index of the last ingested observation.
  long last_index() const { return window_start_ + count_ - 1; }

 private:
  Expert(const ExpertSpec& spec, long birth_time, long window_start, Range range);

  Eigen::VectorXd regressors() const;

  ExpertSpec spec_;
  long birth_time_;
  long window_start_;
  Range range_;
  long count_ = 0;
  double sum_ = 0.0;
  double last_ = 0.0;
  std::deque<double> lags_;  // most recent first, at most p entries
  Eigen::MatrixXd gram_;
  Eigen::VectorXd cross_;
};

}  // namespace growfs

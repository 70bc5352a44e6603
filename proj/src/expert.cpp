#include "growfs/expert.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace growfs {

ExpertSpec ExpertSpec::parse(std::string_view text, double ridge) {
  ExpertSpec spec;
  spec.ridge = ridge;
  if (text == "mean") {
    spec.kind = ExpertKind::mean;
    spec.order = 0;
  } else if (text == "last" || text == "last_value") {
    spec.kind = ExpertKind::last_value;
    spec.order = 0;
  } else if (text.starts_with("ar:")) {
    const auto digits = text.substr(3);
    int order = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (ec != std::errc{} || end != digits.data() + digits.size()) {
      throw std::invalid_argument("bad AR order in expert '" + std::string(text) + "'");
    }
    spec.kind = ExpertKind::ar;
    spec.order = order;
  } else {
    throw std::invalid_argument("unknown expert '" + std::string(text) + "' (expected ar:P|mean|last)");
  }
  spec.validate();
  return spec;
}

std::string ExpertSpec::to_string() const {
  switch (kind) {
    case ExpertKind::ar: return "ar:" + std::to_string(order);
    case ExpertKind::mean: return "mean";
    case ExpertKind::last_value: return "last";
  }
  return "?";
}

void ExpertSpec::validate() const {
  if (kind == ExpertKind::ar && order < 1) throw std::invalid_argument("AR expert needs order >= 1");
  if (!(ridge > 0.0) || !std::isfinite(ridge)) throw std::invalid_argument("ridge must be positive");
}

Expert::Expert(const ExpertSpec& spec, long birth_time, long window_start, Range range)
    : spec_(spec), birth_time_(birth_time), window_start_(window_start), range_(range) {
  if (spec_.kind == ExpertKind::ar) {
    const int dim = spec_.order + 1;
    gram_ = Eigen::MatrixXd::Zero(dim, dim);
    cross_ = Eigen::VectorXd::Zero(dim);
  }
}

Expert Expert::spawn(const ExpertSpec& spec, long birth_time, long window_start,
                     std::span<const double> history, Range range) {
  spec.validate();
  if (window_start < 1) throw std::invalid_argument("spawn: window_start must be >= 1");
  if (birth_time < window_start - 1) {
    throw std::invalid_argument("spawn: birth_time precedes window_start");
  }
  const auto expected = static_cast<std::size_t>(birth_time - window_start + 1);
  if (history.size() != expected) {
    throw std::invalid_argument("spawn: history must cover y_" + std::to_string(window_start) + "..y_" +
                                std::to_string(birth_time) + " (" + std::to_string(expected) +
                                " values), got " + std::to_string(history.size()));
  }
  Expert expert(spec, birth_time, window_start, range);
  for (double y : history) expert.observe(y);
  return expert;
}

Eigen::VectorXd Expert::regressors() const {
  Eigen::VectorXd x(spec_.order + 1);
  x(0) = 1.0;
  for (int j = 0; j < spec_.order; ++j) x(j + 1) = lags_[static_cast<std::size_t>(j)];
  return x;
}

void Expert::observe(double y) {
  if (spec_.kind == ExpertKind::ar && static_cast<int>(lags_.size()) == spec_.order) {
    const Eigen::VectorXd x = regressors();
    gram_.noalias() += x * x.transpose();
    cross_.noalias() += y * x;
  }
  ++count_;
  sum_ += y;
  last_ = y;
  if (spec_.kind == ExpertKind::ar) {
    lags_.push_front(y);
    if (static_cast<int>(lags_.size()) > spec_.order) lags_.pop_back();
  }
}

Eigen::MatrixXd Expert::regularized_gram() const {
  if (spec_.kind != ExpertKind::ar) return {};
  Eigen::MatrixXd a = gram_;
  a.diagonal().array() += spec_.ridge;
  return a;
}

std::vector<double> Expert::coefficients() const {
  if (spec_.kind != ExpertKind::ar || count_ < spec_.order + 1) return {};
  const Eigen::VectorXd coef = regularized_gram().ldlt().solve(cross_);
  return {coef.data(), coef.data() + coef.size()};
}

double Expert::predict() const {
  if (count_ == 0) return range_.midpoint();
  double forecast = 0.0;
  switch (spec_.kind) {
    case ExpertKind::mean:
      forecast = sum_ / static_cast<double>(count_);
      break;
    case ExpertKind::last_value:
      forecast = last_;
      break;
    case ExpertKind::ar:
      if (count_ < spec_.order + 1) {
        forecast = sum_ / static_cast<double>(count_);
      } else {
        const auto coef = coefficients();
        const Eigen::VectorXd x = regressors();
        forecast = 0.0;
        for (std::size_t j = 0; j < coef.size(); ++j) forecast += coef[j] * x(static_cast<Eigen::Index>(j));
      }
      break;
  }
  return range_.clip(forecast);
}

}  // namespace growfs

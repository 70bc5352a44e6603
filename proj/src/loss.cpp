#include "growfs/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace growfs {

double Range::clip(double x) const { return std::clamp(x, lo, hi); }

LossKind parse_loss_kind(std::string_view name) {
  if (name == "squared") return LossKind::squared;
  if (name == "absolute") return LossKind::absolute;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "' (expected squared|absolute)");
}

std::string_view to_string(LossKind kind) {
  return kind == LossKind::squared ? "squared" : "absolute";
}

LossFunction::LossFunction(LossKind kind, Range range) : kind_(kind), range_(range) {
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || !(range.hi > range.lo)) {
    throw std::invalid_argument("loss range requires finite bounds with hi > lo");
  }
}

double LossFunction::evaluate(double forecast, double outcome) const {
  const double diff = std::abs(range_.clip(forecast) - range_.clip(outcome)) / range_.width();
  // diff is in [0,1] up to rounding of the division
  const double scaled = std::min(diff, 1.0);
  return kind_ == LossKind::squared ? scaled * scaled : scaled;
}

double cumulative_loss(const LossFunction& loss, std::span<const double> forecasts,
                       std::span<const double> outcomes) {
  if (forecasts.size() != outcomes.size()) {
    throw std::invalid_argument("cumulative_loss: forecasts and outcomes differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) total += loss(forecasts[i], outcomes[i]);
  return total;
}

}  // namespace growfs

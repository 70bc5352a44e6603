#pragma once

#include <span>
#include <string_view>

namespace growfs {

/// Closed interval of admissible forecasts and outcomes.
struct Range {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  double clip(double x) const;
};

enum class LossKind { squared, absolute };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);

/// Per-step loss normalized into [0,1] by the width of a declared range.
/// Inputs outside the range are clipped before evaluation.
class LossFunction {
 public:
  /// Throws std::invalid_argument unless range.hi > range.lo (both finite).
  LossFunction(LossKind kind, Range range);

  double evaluate(double forecast, double outcome) const;
  double operator()(double forecast, double outcome) const { return evaluate(forecast, outcome); }

  LossKind kind() const { return kind_; }
  const Range& range() const { return range_; }

 private:
  LossKind kind_;
  Range range_;
};

/// Sum of per-step losses over aligned sequences. Throws on length mismatch.
double cumulative_loss(const LossFunction& loss, std::span<const double> forecasts,
                       std::span<const double> outcomes);

}  // namespace growfs

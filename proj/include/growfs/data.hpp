#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace growfs {

enum class Transform { raw, log_diff_pct };

std::string_view to_string(Transform transform);

struct TimeSeries {
  std::vector<double> values;
  Transform transform = Transform::raw;
  std::string source;

  long size() const { return static_cast<long>(values.size()); }
  /// y_t with 1-based t.
  double at(long t) const { return values.at(static_cast<std::size_t>(t - 1)); }
  /// Throws unless nonempty and every value finite.
  void validate() const;
};

/// Reads one numeric column from a CSV file with a header row. LF and CRLF
/// line endings are accepted; a UTF-8 BOM on the header is ignored.
TimeSeries load_csv(const std::filesystem::path& path, std::string_view column);

/// g_t = 100 ln(y_{t+1} / y_t); requires n >= 2 and strictly positive values.
TimeSeries growth_rate(const TimeSeries& series);

struct Segment {
  long length = 0;
  std::vector<double> ar;  // coefficients on y_{t-1}, y_{t-2}, ...
  double intercept = 0.0;
  double noise = 0.0;      // standard deviation of the Gaussian innovation
};

struct SyntheticSpec {
  std::vector<Segment> segments;
  std::uint64_t seed = 0;
  /// Optional leading values emitted verbatim; they count toward the first
  /// segment and seed its recursion (otherwise lags start at zero).
  std::vector<double> initial;

  void validate() const;
};

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SyntheticSpec& spec);

/// Piecewise-AR series. Innovations come from mt19937_64 through a
/// Box-Muller transform so a seed reproduces the same series on any platform.
TimeSeries generate(const SyntheticSpec& spec);

/// Largest modulus among the roots of the AR companion matrix.
double spectral_radius(const std::vector<double>& ar);

}  // namespace growfs

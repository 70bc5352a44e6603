#include "growfs/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace growfs {
namespace {

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && end == text.data() + text.size() && std::isfinite(out);
}

// Standard normal draws from a portable engine; std::normal_distribution is
// implementation-defined across standard libraries.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 53-bit uniforms in (0,1]
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

std::string_view to_string(Transform transform) {
  return transform == Transform::raw ? "raw" : "log_diff_pct";
}

void TimeSeries::validate() const {
  if (values.empty()) throw std::invalid_argument("time series is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("time series value " + std::to_string(i + 1) + " is not finite");
    }
  }
}

TimeSeries load_csv(const std::filesystem::path& path, std::string_view column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("input file '" + path.string() + "' is empty");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  const auto header = split_csv_line(line);
  std::size_t index = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == column) {
      index = i;
      break;
    }
  }
  if (index == header.size()) {
    throw std::runtime_error("column '" + std::string(column) + "' not found in '" + path.string() + "'");
  }

  TimeSeries series;
  series.source = path.string() + ":" + std::string(column);
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") {
      if (in.peek() == std::char_traits<char>::eof()) break;  // trailing newline
      throw std::runtime_error("blank row " + std::to_string(row) + " in '" + path.string() + "'");
    }
    const auto cells = split_csv_line(line);
    double value = 0.0;
    if (index >= cells.size() || !parse_double(cells[index], value)) {
      throw std::runtime_error("row " + std::to_string(row) + " of '" + path.string() +
                               "' has a non-numeric value in column '" + std::string(column) + "'");
    }
    series.values.push_back(value);
  }
  if (series.values.empty()) throw std::runtime_error("input file '" + path.string() + "' has no data rows");
  return series;
}

TimeSeries growth_rate(const TimeSeries& series) {
  if (series.values.size() < 2) throw std::invalid_argument("growth_rate needs at least two observations");
  TimeSeries out;
  out.transform = Transform::log_diff_pct;
  out.source = series.source;
  out.values.reserve(series.values.size() - 1);
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (!(series.values[i] > 0.0)) {
      throw std::invalid_argument("growth_rate: value " + std::to_string(i + 1) + " is not positive");
    }
    if (i > 0) out.values.push_back(100.0 * std::log(series.values[i] / series.values[i - 1]));
  }
  return out;
}

double spectral_radius(const std::vector<double>& ar) {
  if (ar.empty()) return 0.0;
  const auto p = static_cast<Eigen::Index>(ar.size());
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = ar[static_cast<std::size_t>(j)];
  for (Eigen::Index j = 1; j < p; ++j) companion(j, j - 1) = 1.0;
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

void SyntheticSpec::validate() const {
  if (segments.empty()) throw std::invalid_argument("synthetic spec needs at least one segment");
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& seg = segments[k];
    const std::string where = "segment " + std::to_string(k + 1);
    if (seg.length < 1) throw std::invalid_argument(where + ": length must be positive");
    if (!(seg.noise >= 0.0) || !std::isfinite(seg.intercept)) {
      throw std::invalid_argument(where + ": noise must be >= 0 and intercept finite");
    }
    if (!(spectral_radius(seg.ar) < 1.0)) throw std::invalid_argument(where + ": AR polynomial is not stationary");
  }
  if (static_cast<long>(initial.size()) > segments.front().length) {
    throw std::invalid_argument("initial values exceed the first segment's length");
  }
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc) {
  SyntheticSpec spec;
  try {
    spec.seed = doc.value("seed", std::uint64_t{0});
    spec.initial = doc.value("initial", std::vector<double>{});
    for (const auto& s : doc.at("segments")) {
      Segment seg;
      seg.length = s.at("length").get<long>();
      seg.ar = s.value("ar", std::vector<double>{});
      seg.intercept = s.value("intercept", 0.0);
      seg.noise = s.value("noise", 0.0);
      spec.segments.push_back(std::move(seg));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed synthetic spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json to_json(const SyntheticSpec& spec) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& seg : spec.segments) {
    segments.push_back({{"length", seg.length}, {"ar", seg.ar}, {"intercept", seg.intercept}, {"noise", seg.noise}});
  }
  nlohmann::json doc = {{"seed", spec.seed}, {"segments", segments}};
  if (!spec.initial.empty()) doc["initial"] = spec.initial;
  return doc;
}

TimeSeries generate(const SyntheticSpec& spec) {
  spec.validate();
  Gaussian noise(spec.seed);
  TimeSeries out;
  out.source = "synthetic:seed=" + std::to_string(spec.seed);
  out.values = spec.initial;

  auto lag = [&](std::size_t j) {
    // y_{t-j} relative to the next value; zero before the series starts
    return j <= out.values.size() ? out.values[out.values.size() - j] : 0.0;
  };

  bool first = true;
  for (const auto& seg : spec.segments) {
    long remaining = seg.length - (first ? static_cast<long>(spec.initial.size()) : 0);
    first = false;
    for (; remaining > 0; --remaining) {
      double y = seg.intercept;
      for (std::size_t j = 0; j < seg.ar.size(); ++j) y += seg.ar[j] * lag(j + 1);
      y += seg.noise * noise();
      out.values.push_back(y);
    }
  }
  return out;
}

}  // namespace growfs

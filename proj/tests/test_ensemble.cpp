#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "growfs/ensemble.hpp"
#include "oracles.hpp"

using namespace growfs;
using growfs::testing::uniform01;

namespace {

const LossFunction kUnitSquared(LossKind::squared, {0.0, 1.0});

AggregatorConfig config(Mode mode, double eta, double alpha, long tau = 1) {
  AggregatorConfig c;
  c.mode = mode;
  c.eta = eta;
  c.alpha = alpha;
  c.tau = tau;
  return c;
}

WeightVector random_weights(std::size_t q, std::mt19937_64& rng) {
  std::vector<double> w(q);
  for (auto& x : w) x = 0.05 + uniform01(rng);
  return normalize(w);
}

std::vector<double> random_forecasts(std::size_t q, std::mt19937_64& rng) {
  std::vector<double> f(q);
  for (auto& x : f) x = uniform01(rng);
  return f;
}

}  // namespace

TEST_CASE("ensemble size follows 1 + floor(t/tau)") {
  CHECK(ensemble_size(0, 4) == 1);
  CHECK(ensemble_size(3, 4) == 1);
  CHECK(ensemble_size(4, 4) == 2);
  CHECK(ensemble_size(252, 16) == 16);
  CHECK_THROWS(ensemble_size(1, 0));
}

TEST_CASE("config validation") {
  CHECK_THROWS(config(Mode::ewaf, 0.0, 0.1).validate());
  CHECK_THROWS(config(Mode::ewaf, 1.0, 1.5).validate());
  CHECK_THROWS(config(Mode::ewaf, 1.0, -0.1).validate());
  CHECK_THROWS(config(Mode::growing, 1.0, 0.1, 0).validate());
  CHECK(parse_mode("fixed") == Mode::fixed_shares);
  CHECK_THROWS(parse_mode("adaptive"));
}

TEST_CASE("ewaf_step") {
  const auto cfg = config(Mode::ewaf, std::numbers::ln2, 0.0);
  SUBCASE("forecast is the convex combination") {
    const auto r = ewaf_step({{0.25, 0.75}}, std::vector<double>{0.0, 1.0}, 0.5, kUnitSquared, cfg);
    CHECK(r.forecast == 0.75);
  }
  SUBCASE("zero losses leave weights unchanged") {
    const auto r = ewaf_step({{0.25, 0.75}}, std::vector<double>{0.4, 0.4}, 0.4, kUnitSquared, cfg);
    CHECK(r.weights[0] == 0.25);
    CHECK(r.weights[1] == 0.75);
  }
  SUBCASE("losses (1,0) with eta = ln 2") {
    const auto r = ewaf_step({{0.5, 0.5}}, std::vector<double>{0.0, 1.0}, 1.0, kUnitSquared, cfg);
    CHECK(r.expert_losses == std::vector<double>{1.0, 0.0});
    CHECK(r.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.loss == 0.25);
  }
  CHECK_THROWS(ewaf_step({{0.5, 0.5}}, std::vector<double>{0.0}, 1.0, kUnitSquared, cfg));
}

TEST_CASE("fixed_shares_step") {
  std::mt19937_64 rng(3);
  SUBCASE("alpha = 0 matches ewaf") {
    for (int k = 0; k < 200; ++k) {
      const auto q = 1 + rng() % 6;
      const auto w = random_weights(q, rng);
      const auto f = random_forecasts(q, rng);
      const double y = uniform01(rng);
      const double eta = 0.05 + 2.0 * uniform01(rng);
      const auto a = fixed_shares_step(w, f, y, kUnitSquared, config(Mode::fixed_shares, eta, 0.0));
      const auto b = ewaf_step(w, f, y, kUnitSquared, config(Mode::ewaf, eta, 0.0));
      for (std::size_t i = 0; i < q; ++i) REQUIRE(std::abs(a.weights[i] - b.weights[i]) <= 1e-15);
      REQUIRE(a.forecast == b.forecast);
    }
  }
  SUBCASE("alpha = 1 pools everything") {
    const auto r = fixed_shares_step({{0.1, 0.2, 0.7}}, std::vector<double>{0.0, 0.5, 1.0}, 0.9, kUnitSquared,
                                     config(Mode::fixed_shares, 1.3, 1.0));
    for (double w : r.weights.weights) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("hand-computed update, q=2, alpha=0.2") {
    const std::vector<double> v = exponential_update(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0},
                                                     std::numbers::ln2);
    const auto w = share_update(v, 0.2);
    CHECK(std::abs(w[0] - 0.275) <= 1e-12);
    CHECK(std::abs(w[1] - 0.475) <= 1e-12);
    const auto r = fixed_shares_step({{0.5, 0.5}}, std::vector<double>{0.0, 1.0}, 1.0, kUnitSquared,
                                     config(Mode::fixed_shares, std::numbers::ln2, 0.2));
    CHECK(std::abs(r.weights[0] - 0.275 / 0.75) <= 1e-9);
    CHECK(std::abs(r.weights[1] - 0.475 / 0.75) <= 1e-9);
    CHECK(std::abs(r.weights[0] - 0.36667) <= 1e-5);
  }
}

TEST_CASE("growing_step") {
  const auto cfg = config(Mode::growing, std::numbers::ln2, 0.2, 2);
  SUBCASE("newborn contributes nothing to the forecast") {
    const auto r = growing_step({{1.0, 0.0}}, std::vector<double>{0.5, 0.3}, 0.4, 2, kUnitSquared, cfg);
    CHECK(r.forecast == 0.5);
  }
  SUBCASE("hand-computed birth-step update") {
    const auto r = growing_step({{1.0, 0.0}}, std::vector<double>{0.0, 1.0}, 1.0, 2, kUnitSquared, cfg);
    CHECK(std::abs(r.weights[0] - 0.9) <= 1e-9);
    CHECK(std::abs(r.weights[1] - 0.1) <= 1e-9);
    const auto v = exponential_update(std::vector<double>{1.0, 0.0}, r.expert_losses, cfg.eta);
    CHECK(std::abs(v[0] - 0.5) <= 1e-15);
    CHECK(v[1] == 0.0);
    const auto w = share_update(v, cfg.alpha);
    CHECK(std::abs(w[0] - 0.45) <= 1e-15);
    CHECK(std::abs(w[1] - 0.05) <= 1e-15);
  }
  SUBCASE("errors") {
    CHECK_THROWS(growing_step({{1.0}}, std::vector<double>{0.5}, 0.4, 2, kUnitSquared, cfg));
    CHECK_THROWS(growing_step({{0.5, 0.5}}, std::vector<double>{0.5, 0.3}, 0.4, 2, kUnitSquared, cfg));
    CHECK_THROWS(growing_step({{1.0}}, std::vector<double>{0.5}, 0.4, 0, kUnitSquared, cfg));
  }
}

TEST_CASE("alpha = 0 growing run tracks the first expert only") {
  std::mt19937_64 rng(5);
  TimeSeries s;
  for (int t = 0; t < 40; ++t) s.values.push_back(uniform01(rng));
  const std::vector<ExpertSpec> specs{ExpertSpec::parse("ar:1")};
  const auto grown = run(s, config(Mode::growing, 0.8, 0.0, 3), specs, kUnitSquared);
  const auto single = run(s, config(Mode::ewaf, 0.8, 0.0), specs, kUnitSquared);
  for (long t = 0; t < grown.n(); ++t) {
    const auto& g = grown.steps[static_cast<std::size_t>(t)];
    CHECK(g.forecast == single.steps[static_cast<std::size_t>(t)].forecast);
    CHECK(g.weights[0] == 1.0);
    for (std::size_t i = 1; i < g.weights.size(); ++i) CHECK(g.weights[i] == 0.0);
  }
}

TEST_CASE("run bookkeeping") {
  std::mt19937_64 rng(9);
  auto series = [&](long n) {
    TimeSeries s;
    for (long t = 0; t < n; ++t) s.values.push_back(uniform01(rng));
    return s;
  };
  const std::vector<ExpertSpec> ar1{ExpertSpec::parse("ar:1")};

  const auto one = run(series(1), config(Mode::growing, 1.0, 0.1, 4), ar1, kUnitSquared);
  CHECK(one.n() == 1);
  CHECK(one.steps[0].weights.weights == std::vector<double>{1.0});

  const auto two_epochs = run(series(8), config(Mode::growing, 1.0, 0.1, 4), ar1, kUnitSquared);
  CHECK(two_epochs.steps.back().weights.size() == 3);
  CHECK(two_epochs.expert_losses.final_size() == 3);

  const auto paper_scale = run(series(252), config(Mode::growing, 0.3, 0.06, 16), ar1, kUnitSquared);
  CHECK(paper_scale.steps.back().weights.size() == 16);

  for (const auto& step : paper_scale.steps) {
    REQUIRE(static_cast<long>(step.weights.size()) == ensemble_size(step.t, 16));
    REQUIRE(std::abs(step.weights.sum() - 1.0) <= 1e-12);
  }

  // static modes take one expert per spec
  const std::vector<ExpertSpec> trio{ExpertSpec::parse("ar:1"), ExpertSpec::parse("mean"), ExpertSpec::parse("last")};
  const auto fixed = run(series(30), config(Mode::fixed_shares, 1.0, 0.1), trio, kUnitSquared);
  CHECK(fixed.steps.back().weights.size() == 3);
  CHECK(fixed.expert_losses.live(1) == 3);
  CHECK_THROWS(run(series(5), config(Mode::growing, 1.0, 0.1), trio, kUnitSquared));
  CHECK_THROWS(run(TimeSeries{}, config(Mode::growing, 1.0, 0.1), ar1, kUnitSquared));
}

TEST_CASE("newborn experts train on their own window only") {
  std::mt19937_64 rng(21);
  TimeSeries a;
  for (int t = 0; t < 30; ++t) a.values.push_back(uniform01(rng));
  TimeSeries b = a;
  for (int t = 0; t < 5; ++t) b.values[static_cast<std::size_t>(t)] = 0.9 - 0.1 * t;  // differs before y_6

  const std::vector<ExpertSpec> spec{ExpertSpec::parse("ar:1")};
  const auto cfg = config(Mode::growing, 1.0, 0.2, 5);
  const auto ra = run(a, cfg, spec, kUnitSquared);
  const auto rb = run(b, cfg, spec, kUnitSquared);
  // expert 3 is born at t=10 with window starting at y_6
  for (long t = 10; t <= 30; ++t) {
    const auto& fa = ra.steps[static_cast<std::size_t>(t - 1)].expert_forecasts;
    const auto& fb = rb.steps[static_cast<std::size_t>(t - 1)].expert_forecasts;
    REQUIRE(fa[2] == fb[2]);
  }
  CHECK(ra.steps[9].expert_forecasts[0] != rb.steps[9].expert_forecasts[0]);
}

TEST_CASE("step properties on random instances") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 2000; ++k) {
    const auto q = 1 + rng() % 8;
    const auto w = random_weights(q, rng);
    const auto f = random_forecasts(q, rng);
    const double y = uniform01(rng);
    const double eta = 0.01 + 3.0 * uniform01(rng);
    const double alpha = uniform01(rng);
    const auto cfg = config(Mode::fixed_shares, eta, alpha);
    const auto r = fixed_shares_step(w, f, y, kUnitSquared, cfg);

    // bracketing
    REQUIRE(r.forecast >= *std::min_element(f.begin(), f.end()) - 1e-15);
    REQUIRE(r.forecast <= *std::max_element(f.begin(), f.end()) + 1e-15);
    REQUIRE(std::abs(r.weights.sum() - 1.0) <= 1e-12);

    // positive homogeneity: scaling the input weights changes nothing after normalization
    const double c = std::exp(10.0 * (uniform01(rng) - 0.5));
    WeightVector scaled = w;
    for (auto& x : scaled.weights) x *= c;
    const auto rs = fixed_shares_step(scaled, f, y, kUnitSquared, cfg);
    REQUIRE(std::abs(rs.forecast - r.forecast) <= 1e-12);
    for (std::size_t i = 0; i < q; ++i) REQUIRE(std::abs(rs.weights[i] - r.weights[i]) <= 1e-12);

    // share floor on the unnormalized update
    const auto v = exponential_update(w.weights, r.expert_losses, eta);
    double total = 0.0;
    for (double x : v) total += x;
    const auto shared = share_update(v, alpha);
    for (double x : shared) REQUIRE(x >= alpha / static_cast<double>(q) * total - 1e-15);
  }
}

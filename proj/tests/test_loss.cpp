#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "growfs/loss.hpp"

using namespace growfs;

TEST_CASE("evaluate on the unit range") {
  const LossFunction sq(LossKind::squared, {0.0, 1.0});
  CHECK(sq(0.5, 0.5) == 0.0);
  CHECK(sq(0.0, 1.0) == 1.0);
  CHECK(sq(0.25, 0.75) == doctest::Approx(0.25).epsilon(1e-15));

  const LossFunction abs(LossKind::absolute, {0.0, 1.0});
  CHECK(abs(0.25, 0.75) == doctest::Approx(0.5));
  CHECK(abs(0.0, 1.0) == 1.0);
}

TEST_CASE("out-of-range inputs are clipped") {
  const LossFunction sq(LossKind::squared, {-1.0, 1.0});
  CHECK(sq(-50.0, 1.0) == 1.0);
  CHECK(sq(3.0, 1.0) == 0.0);
  CHECK(sq(3.0, -7.0) == 1.0);
}

TEST_CASE("invalid range is rejected at construction") {
  CHECK_THROWS_AS(LossFunction(LossKind::squared, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(LossFunction(LossKind::absolute, {2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(parse_loss_kind("log"), std::invalid_argument);
  CHECK(parse_loss_kind("absolute") == LossKind::absolute);
}

TEST_CASE("cumulative_loss") {
  const LossFunction sq(LossKind::squared, {0.0, 1.0});
  CHECK(cumulative_loss(sq, std::vector<double>{}, std::vector<double>{}) == 0.0);
  CHECK(cumulative_loss(sq, std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 2.0);
  CHECK(cumulative_loss(sq, std::vector<double>{0.5}, std::vector<double>{1}) == 0.25);
  CHECK_THROWS_AS(cumulative_loss(sq, std::vector<double>{0.5}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("boundedness, symmetry and scale covariance on random inputs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> wide(-20.0, 20.0);
  std::uniform_real_distribution<double> bound(-5.0, 5.0);
  for (auto kind : {LossKind::squared, LossKind::absolute}) {
    for (int k = 0; k < 10000; ++k) {
      double a = bound(rng);
      double b = bound(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 1e-3) b = a + 1.0;
      const LossFunction lf(kind, {a, b});
      const LossFunction unit(kind, {0.0, 1.0});
      const double p = wide(rng);
      const double y = wide(rng);
      const double v = lf(p, y);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
      REQUIRE(v == lf(y, p));
      const double ps = (lf.range().clip(p) - a) / (b - a);
      const double ys = (lf.range().clip(y) - a) / (b - a);
      REQUIRE(std::abs(v - unit(ps, ys)) <= 1e-12);
    }
  }
}

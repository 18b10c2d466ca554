#include <doctest.h>

#include <cmath>

#include "findbench/function_spec.hpp"
#include "findbench/generator.hpp"

using namespace findbench;

namespace {

FunctionSpec linear_spec(double a, double b, std::uint64_t seed) {
  FunctionSpec spec;
  spec.id = "t";
  spec.category = Category::Numeric;
  spec.numeric = NumericExpr::atomic(Family::Linear, a, b);
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("empty modifier stack equals plain evaluation") {
  const auto spec = linear_spec(2, 3, 11);
  for (double x : {-5.0, 0.0, 7.25}) {
    Rng draws = query_rng(spec, 0, 0);
    CHECK(*eval_with_modifiers(spec, x, draws) == *eval_numeric(*spec.numeric, x));
  }
}

TEST_CASE("noise statistics match the declared distributions") {
  const int n = 10000;
  for (const auto kind : {NoiseKind::Normal, NoiseKind::Uniform, NoiseKind::Poisson}) {
    NoiseSpec noise;
    noise.kind = kind;
    noise.param = kind == NoiseKind::Poisson ? 3.0 : 2.0;
    Rng rng(mix_keys(17, static_cast<std::uint64_t>(kind)));
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double v = noise.draw(rng);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    double want_mean = 0.0, want_var = 0.0;
    switch (kind) {
      case NoiseKind::Normal:
        want_var = 4.0;
        break;
      case NoiseKind::Uniform:
        want_var = 4.0 / 3.0;
        break;
      case NoiseKind::Poisson:
        want_mean = 3.0;
        want_var = 3.0;
        break;
    }
    // 3-sigma Monte-Carlo bounds.
    CHECK(std::fabs(mean - want_mean) < 3.0 * std::sqrt(want_var / n));
    CHECK(var == doctest::Approx(want_var).epsilon(0.1));
  }
}

TEST_CASE("poisson noise shifts the mean by lambda") {
  auto spec = linear_spec(2, 3, 23);
  spec.noise = NoiseSpec{NoiseKind::Poisson, 3.0, 23};
  const double x = 4.0;
  const int n = 10000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    Rng draws = query_rng(spec, 0, i);
    sum += *eval_with_modifiers(spec, x, draws);
  }
  const double expected = 11.0 + 3.0;
  CHECK(std::fabs(sum / n - expected) < 3.0 * std::sqrt(3.0 / n));
}

TEST_CASE("corruption replaces values with draws near the replacement mean") {
  auto spec = linear_spec(1, 0, 31);
  CorruptionSpec c;
  c.kind = IntervalKind::Bounded;
  c.lo = 10;
  c.hi = 20;
  c.polarity = Polarity::Inside;
  c.mean = -7.5;
  c.seed = 31;
  spec.corruption = c;

  for (int i = 0; i < 200; ++i) {
    Rng draws = query_rng(spec, 0, i);
    const double v = *eval_with_modifiers(spec, 15.0, draws);
    CHECK(std::fabs(v - c.mean) < 1.0);  // 6-sigma bound at sigma = 0.1
  }
}

TEST_CASE("corruption is local: untouched off the corrupted side") {
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = sample_numeric_spec(mix_keys(57, trial), "f", kRoleCorruption);
    REQUIRE(spec.corruption);
    Rng probe_rng(mix_keys(3, trial));
    for (int k = 0; k < 40; ++k) {
      const double x = probe_rng.uniform(-128.0, 128.0);
      Rng draws = query_rng(spec, 0, k);
      const auto modified = eval_with_modifiers(spec, x, draws);
      const auto base = eval_numeric(*spec.numeric, x);
      if (spec.corruption->corrupted_at(x)) {
        REQUIRE(modified);
        CHECK(std::fabs(*modified - spec.corruption->mean) < 1.0);
      } else {
        CHECK(modified == base);
      }
    }
  }
}

TEST_CASE("draws replay exactly for a fixed (seed, nonce, counter)") {
  auto spec = linear_spec(2, 3, 47);
  spec.noise = NoiseSpec{NoiseKind::Normal, 1.5, 47};
  Rng a = query_rng(spec, 0, 5);
  Rng b = query_rng(spec, 0, 5);
  CHECK(*eval_with_modifiers(spec, 1.0, a) == *eval_with_modifiers(spec, 1.0, b));

  // Fresh counters give fresh draws.
  Rng c = query_rng(spec, 0, 6);
  CHECK(*eval_with_modifiers(spec, 1.0, c) != *eval_with_modifiers(spec, 1.0, a));
}

TEST_CASE("grid mean skips undefined points") {
  // log is undefined on half the grid; the mean must still be finite.
  const NumericExpr log_expr = NumericExpr::atomic(Family::Logarithm, 1, 0, {M_E});
  const auto mu = grid_mean(log_expr);
  REQUIRE(mu);
  CHECK(std::isfinite(*mu));
  CHECK(*mu > 0.0);  // mean of ln on (0, 128] is positive
}

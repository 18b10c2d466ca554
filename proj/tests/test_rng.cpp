#include <doctest.h>

#include "findbench/rng.hpp"

using namespace findbench;

TEST_CASE("rng streams are deterministic and substream-independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng s1 = substream(7, 0);
  Rng s2 = substream(7, 1);
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("normal and poisson draws have the right moments") {
  Rng rng(123);
  const int n = 40000;

  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal(0.0, 2.0);
    sum += v;
    sq += v * v;
  }
  CHECK(std::fabs(sum / n) < 3.0 * 2.0 / std::sqrt(n));
  CHECK(sq / n == doctest::Approx(4.0).epsilon(0.05));

  double psum = 0;
  for (int i = 0; i < n; ++i) psum += static_cast<double>(rng.poisson(3.0));
  CHECK(psum / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("uniform_int covers its range inclusively") {
  Rng rng(9);
  bool lo = false, hi = false;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.uniform_int(-3, 3);
    CHECK(v >= -3);
    CHECK(v <= 3);
    lo |= (v == -3);
    hi |= (v == 3);
  }
  CHECK(lo);
  CHECK(hi);
}

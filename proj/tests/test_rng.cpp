#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "airfl/rng.hpp"

using airfl::Rng;

TEST_CASE("same seed, tag and index reproduce the stream") {
  Rng a(42, "unit", 3);
  Rng b(42, "unit", 3);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("different tags decorrelate streams") {
  Rng a(42, "alpha");
  Rng b(42, "bravo");
  int equal = 0;
  for (int i = 0; i < 100; ++i)
    if (a.uniform() == b.uniform()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("different indices decorrelate streams") {
  Rng a(42, "unit", 0);
  Rng b(42, "unit", 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i)
    if (a.uniform() == b.uniform()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("uniform stays in range and fills it") {
  Rng r(1, "range");
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < -1.9);
  CHECK(hi > 2.9);
}

TEST_CASE("normal moments") {
  Rng r(7, "gauss");
  const int n = 200000;
  double m = 0.0, v = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    m += x;
    v += x * x;
  }
  m /= n;
  v = v / n - m * m;
  CHECK(std::abs(m) < 0.01);
  CHECK(v == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cnormal has unit total variance, zero mean") {
  Rng r(7, "cgauss");
  const int n = 200000;
  std::complex<double> m = 0.0;
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = r.cnormal();
    m += z;
    v += std::norm(z);
  }
  m /= static_cast<double>(n);
  v /= n;
  CHECK(std::abs(m) < 0.01);
  CHECK(v == doctest::Approx(1.0).epsilon(0.02));
}

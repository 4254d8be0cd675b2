#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "airfl/aircomp.hpp"
#include "airfl/rng.hpp"

using namespace airfl;

namespace {

std::vector<VectorXcd> random_channels(int k, int nr, Rng& rng) {
  std::vector<VectorXcd> hbar(k);
  for (auto& h : hbar) {
    h.resize(nr);
    for (int i = 0; i < nr; ++i) h[i] = rng.cnormal();
  }
  return hbar;
}

}  // namespace

TEST_CASE("unit channel forces p = sqrt(P0)") {
  const VectorXcd a = VectorXcd::Ones(1);
  const std::vector<VectorXcd> hbar = {VectorXcd::Ones(1)};
  const double p0 = 0.1995262315;
  const double eta = normalizing_factor(a, hbar, p0);
  CHECK(eta == doctest::Approx(p0));
  const VectorXcd p = optimal_power(a, hbar, eta);
  CHECK(std::abs(p[0] - std::sqrt(p0)) < 1e-15);
  CHECK(mse(a, hbar, p, eta, 0.0).signal_misalignment < 1e-20);
}

TEST_CASE("worked example a=1, h=2j, eta=4") {
  const VectorXcd a = VectorXcd::Ones(1);
  const std::vector<VectorXcd> hbar = {VectorXcd::Constant(1, cplx(0.0, 2.0))};
  const VectorXcd p = optimal_power(a, hbar, 4.0);
  CHECK(std::abs(p[0] - cplx(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(effective_gain(a, hbar[0]) * p[0] / 2.0 - 1.0) < 1e-15);
}

TEST_CASE("single device saturates the budget") {
  const VectorXcd a = VectorXcd::Ones(1);
  const std::vector<VectorXcd> hbar = {VectorXcd::Constant(1, 3.0)};
  const double eta = normalizing_factor(a, hbar, 1.0);
  CHECK(eta == doctest::Approx(9.0));
  const VectorXcd p = optimal_power(a, hbar, eta);
  CHECK(std::norm(p[0]) == doctest::Approx(1.0));
}

TEST_CASE("min-gain pair leaves eta at P0") {
  const VectorXcd a = VectorXcd::Ones(1);
  const std::vector<VectorXcd> hbar = {VectorXcd::Constant(1, 1.0),
                                       VectorXcd::Constant(1, 2.0)};
  CHECK(normalizing_factor(a, hbar, 0.1995) == doctest::Approx(0.1995));
}

TEST_CASE("paper-parameter scalar mse") {
  const VectorXcd a = VectorXcd::Ones(1);
  const std::vector<VectorXcd> hbar = {VectorXcd::Ones(1)};
  const double p0 = dbm_to_watt(23.0);
  const VectorXcd p = optimal_power(a, hbar, p0);
  const MseReport r = mse(a, hbar, p, p0, 1e-11);
  CHECK(r.mse == doctest::Approx(5.012e-11).epsilon(1e-3));
}

TEST_CASE("zero power gives K plus noise misalignment") {
  const VectorXcd a = VectorXcd::Ones(1);
  Rng rng(4, "aircomp.zero");
  const auto hbar = random_channels(3, 1, rng);
  const VectorXcd p = VectorXcd::Zero(3);
  const MseReport r = mse(a, hbar, p, 2.0, 0.5);
  CHECK(r.signal_misalignment == doctest::Approx(3.0));
  CHECK(r.noise_term == doctest::Approx(0.25));
  CHECK(r.mse == doctest::Approx(r.signal_misalignment + r.noise_term));
}

TEST_CASE("closed forms: misalignment, power budget, eq15 identity") {
  Rng rng(11, "aircomp.random");
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform() * 6.0);
    const int nr = 1 + static_cast<int>(rng.uniform() * 3.0);
    VectorXcd a(nr);
    for (int i = 0; i < nr; ++i) a[i] = rng.cnormal();
    const auto hbar = random_channels(k, nr, rng);
    const double p0 = 0.01 + rng.uniform();
    const double sigma2 = 1e-6 + rng.uniform() * 0.1;

    const double eta = normalizing_factor(a, hbar, p0);
    const VectorXcd p = optimal_power(a, hbar, eta);
    const MseReport r = mse(a, hbar, p, eta, sigma2);
    CHECK(r.signal_misalignment < 1e-20);

    double pmax = 0.0;
    for (int i = 0; i < k; ++i) {
      CHECK(std::norm(p[i]) <= p0 + 1e-9);
      pmax = std::max(pmax, std::norm(p[i]));
    }
    CHECK(pmax == doctest::Approx(p0).epsilon(1e-12));

    const double red = reduced_mse(a, hbar, p0, sigma2);
    CHECK(std::abs(red - r.mse) <= 1e-10 * red);
  }
}

TEST_CASE("reduced mse homogeneity in the channel scale") {
  Rng rng(12, "aircomp.scale");
  const VectorXcd a = VectorXcd::Ones(1);
  auto hbar = random_channels(4, 1, rng);
  const double base = reduced_mse(a, hbar, 1.0, 1.0);
  for (auto& h : hbar) h *= 3.0;
  CHECK(reduced_mse(a, hbar, 1.0, 1.0) == doctest::Approx(base / 9.0));
}

TEST_CASE("noise-free aggregation is exact") {
  Rng rng(13, "aircomp.exact");
  const auto hbar = random_channels(4, 1, rng);
  TransceiverState tx;
  tx.a = VectorXcd::Ones(1);
  tx.eta = normalizing_factor(tx.a, hbar, 1.0);
  tx.p = optimal_power(tx.a, hbar, tx.eta);
  VectorXcd s(4);
  for (int i = 0; i < 4; ++i) s[i] = rng.cnormal();
  const AggregateResult r = aggregate(s, hbar, tx, VectorXcd::Zero(1));
  CHECK(std::abs(r.error) < 1e-13);
}

TEST_CASE("monte carlo aggregation error matches eq 15") {
  Rng rng(14, "aircomp.mc");
  const auto hbar = random_channels(3, 1, rng);
  const double p0 = 0.5, sigma2 = 0.02;
  TransceiverState tx;
  tx.a = VectorXcd::Ones(1);
  tx.eta = normalizing_factor(tx.a, hbar, p0);
  tx.p = optimal_power(tx.a, hbar, tx.eta);
  const VectorXcd s = VectorXcd::Ones(3);
  double acc = 0.0;
  const int n = 100000;
  Rng noise_rng(15, "aircomp.mc.noise");
  for (int i = 0; i < n; ++i) {
    VectorXcd noise(1);
    noise[0] = std::sqrt(sigma2) * noise_rng.cnormal();
    acc += std::norm(aggregate(s, hbar, tx, noise).error);
  }
  const double expected = reduced_mse(tx.a, hbar, p0, sigma2);
  CHECK(acc / n == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("misaligned aggregation matches a scalar-loop expansion") {
  const std::vector<VectorXcd> hbar = {VectorXcd::Constant(1, cplx(1.0, 0.5)),
                                       VectorXcd::Constant(1, cplx(-0.3, 1.1))};
  TransceiverState tx;
  tx.a = VectorXcd::Constant(1, cplx(0.8, -0.1));
  tx.eta = 2.0;
  tx.p = VectorXcd::Constant(2, cplx(0.4, 0.2));
  const VectorXcd s = VectorXcd::Ones(2);
  VectorXcd noise(1);
  noise[0] = cplx(0.05, -0.02);
  const AggregateResult r = aggregate(s, hbar, tx, noise);
  cplx rx = noise[0];
  for (int k = 0; k < 2; ++k) rx += hbar[k][0] * tx.p[k] * s[k];
  const cplx expect = std::conj(tx.a[0]) * rx / std::sqrt(2.0) - (s[0] + s[1]);
  CHECK(std::abs(r.error - expect) < 1e-15);
}

TEST_CASE("pre/post processing round trips") {
  Normalization nm{1.5, 2.0};
  CHECK(postprocess(preprocess(3.0, nm), nm, 1) == doctest::Approx(3.0));

  // identical locals: fit falls back to unit scale and the mean carries
  const std::vector<double> equal = {2.5, 2.5, 2.5};
  const Normalization fitted = fit_normalization(equal);
  CHECK(fitted.scale == 1.0);
  cplx sum = 0.0;
  for (double w : equal) sum += preprocess(w, fitted);
  CHECK(postprocess(sum, fitted, 3) == doctest::Approx(2.5));
}

TEST_CASE("zero-noise normalized aggregation equals the arithmetic mean") {
  Rng rng(16, "aircomp.mean");
  std::vector<double> w(5);
  for (auto& x : w) x = rng.normal();
  const Normalization nm = fit_normalization(w);
  cplx sum = 0.0;
  double mean = 0.0;
  for (double x : w) {
    sum += preprocess(x, nm);
    mean += x / 5.0;
  }
  CHECK(postprocess(sum, nm, 5) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("guards") {
  const VectorXcd a = VectorXcd::Ones(1);
  CHECK_THROWS_AS(normalizing_factor(a, {}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_power(a, {VectorXcd::Zero(1)}, 1.0), std::domain_error);
  CHECK_THROWS_AS(preprocess(1.0, Normalization{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(postprocess(cplx(1.0), Normalization{0.0, 1.0}, 0), std::invalid_argument);
}

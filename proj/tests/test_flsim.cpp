#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "airfl/flsim.hpp"

using namespace airfl;

TEST_CASE("scheme names round trip") {
  for (Scheme s : all_schemes()) CHECK(parse_scheme(scheme_name(s)) == s);
  CHECK_THROWS_AS(parse_scheme("afrelay"), std::invalid_argument);
}

TEST_CASE("ols recovers a noise-free line exactly") {
  std::vector<double> x = {-1.0, -0.25, 0.5, 1.0};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = -3.0 * x[i] + 2.0;
  const RegressionModel m = ols_fit(x, y);
  CHECK(m.slope == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(m.intercept == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(ols_fit({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ols_fit({1.0, 1.0}, {0.0, 1.0}), std::domain_error);
}

TEST_CASE("test error oracles") {
  RegressionModel perfect{-3.0, 2.0};
  Dataset clean;
  clean.x = {-0.5, 0.0, 0.75};
  for (double x : clean.x) clean.y.push_back(-3.0 * x + 2.0);
  CHECK(test_error(perfect, clean) == 0.0);

  RegressionModel zero{0.0, 0.0};
  Dataset flat;
  flat.x = {0.1, 0.2, 0.3};
  flat.y = {2.0, 2.0, 2.0};
  CHECK(test_error(zero, flat) == doctest::Approx(4.0));

  RegressionModel m{1.5, -0.3};
  Rng rng(81, "flsim.testerr");
  Dataset d = draw_dataset(20, rng);
  double acc = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = m.slope * d.x[i] + m.intercept - d.y[i];
    acc += r * r;
  }
  CHECK(test_error(m, d) == doctest::Approx(acc / 20.0).epsilon(1e-12));
  CHECK_THROWS_AS(test_error(m, Dataset{}), std::invalid_argument);
}

TEST_CASE("network lifetime closed form") {
  CHECK(network_lifetime(6, 3, 0.5, 100.0) == 133);  // floor(600 / 4.5)
  CHECK(network_lifetime(6, 2, 0.0, 100.0) == 100);
  CHECK(network_lifetime(6, 6, 0.9, 100.0) == 100);
  CHECK(network_lifetime(10, 1, 1.0, 50.0) == 500);

  // non-decreasing in lambda_c whenever K < N
  long prev = -1;
  for (double lc : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    const long lt = network_lifetime(8, 3, lc, 100.0);
    CHECK(lt >= prev);
    prev = lt;
  }

  LifetimeModel model;
  CHECK(model.rounds() == 133);

  CHECK_THROWS_AS(network_lifetime(4, 5, 0.5, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(network_lifetime(4, 0, 0.5, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(network_lifetime(4, 2, 1.5, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(network_lifetime(4, 2, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("noise-free aggregation recovers the ideal model") {
  SystemConfig cfg;
  cfg.seed = 3;
  const LearningTrace tr = run_regression_fl(cfg, Scheme::kOptimal, 50);
  CHECK(std::abs(tr.final_model.slope + 3.0) < 0.1);
  CHECK(std::abs(tr.final_model.intercept - 2.0) < 0.1);
  CHECK(static_cast<int>(tr.rounds.size()) == 50);
  int expect = 1;
  for (const auto& r : tr.rounds) {
    CHECK(r.round == expect++);
    CHECK(r.training_loss >= 0.0);
    CHECK(r.test_err >= 0.0);
    CHECK(r.num_selected == cfg.num_devices);
  }
}

TEST_CASE("vanishing channel noise reproduces the pooled least-squares fit") {
  SystemConfig cfg;
  cfg.seed = 17;
  cfg.noise_power_dbm = -320.0;  // drives receiver noise to the underflow floor
  const LearningTrace tr = run_regression_fl(cfg, Scheme::kMultiRis, 1);

  // regenerate the single round's data from the same streams
  Rng xrng(cfg.seed, "flsim.x", 1);
  RegressionOptions opt;
  std::vector<double> xs(opt.samples_per_round);
  for (auto& x : xs) x = xrng.uniform(-1.0, 1.0);
  Dataset pooled;
  for (int k = 0; k < cfg.num_devices; ++k) {
    Rng nrng(cfg.seed, "flsim.labels", (1ull << 16) + static_cast<std::uint64_t>(k));
    for (double x : xs) {
      pooled.x.push_back(x);
      pooled.y.push_back(-3.0 * x + 2.0 + opt.noise_std * nrng.normal());
    }
  }
  const RegressionModel central = ols_fit(pooled.x, pooled.y);
  CHECK(tr.final_model.slope == doctest::Approx(central.slope).epsilon(1e-10));
  CHECK(tr.final_model.intercept ==
        doctest::Approx(central.intercept).epsilon(1e-10));
}

TEST_CASE("paired seeds: the reflecting schemes strengthen the weakest link") {
  SystemConfig cfg;
  int multi_beats_random = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    const LearningTrace multi = run_regression_fl(cfg, Scheme::kMultiRis, 3);
    const LearningTrace random = run_regression_fl(cfg, Scheme::kRandomRis, 3);
    const LearningTrace none = run_regression_fl(cfg, Scheme::kNoRis, 3);
    CHECK(multi.rounds[0].aggregation_mse <= random.rounds[0].aggregation_mse);
    if (multi.rounds[0].beta >= random.rounds[0].beta) ++multi_beats_random;
    CHECK(none.rounds[0].beta > 0.0);
  }
  CHECK(multi_beats_random == 5);
}

TEST_CASE("top-K selection keeps the strongest channels") {
  SystemConfig cfg;
  cfg.seed = 23;
  RegressionOptions opt;
  opt.num_selected = 3;
  const LearningTrace tr = run_regression_fl(cfg, Scheme::kMultiRis, 1, opt);
  CHECK(tr.rounds[0].num_selected == 3);
  // the kept set must beat any device outside it in channel strength
  const LearningTrace full = run_regression_fl(cfg, Scheme::kMultiRis, 1);
  CHECK(tr.rounds[0].beta >= full.rounds[0].beta);
}

TEST_CASE("sweep over lambda_c is monotone in lifetime") {
  SystemConfig cfg;
  const std::vector<double> values = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto rows = sweep_experiment(cfg, "lambda_c", values, 1, 1);
  REQUIRE(rows.size() == values.size());
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].lifetime >= rows[i - 1].lifetime);
}

TEST_CASE("sweep over K reports lifetimes from the closed form") {
  SystemConfig cfg;
  cfg.elements_per_ris = 4;  // keep the sweep cheap
  const auto rows = sweep_experiment(cfg, "K", {2.0, 4.0}, 1, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].lifetime == network_lifetime(6, 2, 0.5, 100.0));
  CHECK(rows[1].lifetime == network_lifetime(6, 4, 0.5, 100.0));
  CHECK(rows[0].test_err >= 0.0);
}

TEST_CASE("guards") {
  SystemConfig cfg;
  CHECK_THROWS_AS(run_regression_fl(cfg, Scheme::kOptimal, 0), std::invalid_argument);
  RegressionOptions opt;
  opt.num_selected = cfg.num_devices + 1;
  CHECK_THROWS_AS(run_regression_fl(cfg, Scheme::kOptimal, 1, opt),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_experiment(cfg, "Q", {1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(sweep_experiment(cfg, "K", {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(sweep_experiment(cfg, "K", {2.0}, 0), std::invalid_argument);
}

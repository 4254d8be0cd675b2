#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "airfl/channel.hpp"

using namespace airfl;

namespace {

SystemConfig small_cfg() {
  SystemConfig cfg;
  cfg.num_devices = 3;
  cfg.num_ris = 2;
  cfg.elements_per_ris = 3;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("ris ring and bs placement") {
  SystemConfig cfg;
  const Topology topo = generate_topology(cfg);
  CHECK(topo.bs_position.x == 0.0);
  CHECK(topo.bs_position.y == 0.0);
  CHECK(topo.bs_position.z == 25.0);
  REQUIRE(topo.ris_positions.size() == 3);
  CHECK(topo.ris_positions[0].x == doctest::Approx(-25.0));
  CHECK(topo.ris_positions[0].y == doctest::Approx(43.3012701892));
  CHECK(topo.ris_positions[0].z == 20.0);
  for (const auto& p : topo.device_positions) {
    CHECK(p.z == 0.0);
    CHECK(std::abs(p.x) <= 50.0);
    CHECK(std::abs(p.y) <= 50.0);
  }
}

TEST_CASE("single ris lands at (50, 0, 20)") {
  SystemConfig cfg;
  cfg.num_ris = 1;
  const Topology topo = generate_topology(cfg);
  REQUIRE(topo.ris_positions.size() == 1);
  CHECK(topo.ris_positions[0].x == doctest::Approx(50.0));
  CHECK(topo.ris_positions[0].y == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(topo.ris_positions[0].z == 20.0);
}

TEST_CASE("topology determinism") {
  SystemConfig cfg = small_cfg();
  const Topology a = generate_topology(cfg);
  const Topology b = generate_topology(cfg);
  for (std::size_t i = 0; i < a.device_positions.size(); ++i) {
    CHECK(a.device_positions[i].x == b.device_positions[i].x);
    CHECK(a.device_positions[i].y == b.device_positions[i].y);
  }
}

TEST_CASE("path loss closed forms") {
  SystemConfig cfg;
  CHECK(path_loss(1.0, 2.2, cfg) == doctest::Approx(1e-3));
  CHECK(path_loss(10.0, 2.2, cfg) == doctest::Approx(1e-3 * std::pow(10.0, -2.2)));
  CHECK(path_loss(100.0, 3.5, cfg) == doctest::Approx(1e-10));
  CHECK_THROWS_AS(path_loss(0.0, 2.2, cfg), std::invalid_argument);
  CHECK_THROWS_AS(path_loss(-1.0, 2.2, cfg), std::invalid_argument);
}

TEST_CASE("channel sampling determinism and dimensions") {
  const SystemConfig cfg = small_cfg();
  const Topology topo = generate_topology(cfg);
  const ChannelSet a = sample_channels(topo, cfg, 3);
  const ChannelSet b = sample_channels(topo, cfg, 3);
  const ChannelSet c = sample_channels(topo, cfg, 4);
  REQUIRE(a.num_devices() == 3);
  REQUIRE(a.num_ris() == 2);
  CHECK(a.direct[0].size() == 1);
  CHECK(a.device_to_ris[0][0].size() == 3);
  CHECK(a.ris_to_bs[0].rows() == 1);
  CHECK(a.ris_to_bs[0].cols() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(a.direct[k] == b.direct[k]);
    CHECK(a.direct[k] != c.direct[k]);
  }
}

TEST_CASE("no ris means direct channels only") {
  SystemConfig cfg = small_cfg();
  cfg.num_ris = 0;
  const Topology topo = generate_topology(cfg);
  const ChannelSet ch = sample_channels(topo, cfg);
  CHECK(ch.num_ris() == 0);
  PhaseConfig phases;
  phases.v.resize(0);
  for (int k = 0; k < 3; ++k)
    CHECK(combined_channel(ch, phases, k) == ch.direct[k]);
}

TEST_CASE("sample variance tracks the path loss") {
  SystemConfig cfg;
  cfg.num_devices = 1;
  cfg.num_ris = 0;
  cfg.seed = 9;
  const Topology topo = generate_topology(cfg);
  const double d = distance(topo.device_positions[0], topo.bs_position);
  const double pl = path_loss(d, cfg.alpha_direct, cfg);
  double acc = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const ChannelSet ch = sample_channels(topo, cfg, static_cast<std::uint64_t>(i));
    acc += std::norm(ch.direct[0][0]);
  }
  CHECK(acc / n / pl == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("phase alignment doubles a matched unit link") {
  ChannelSet ch;
  ch.direct.resize(1);
  ch.direct[0] = VectorXcd::Constant(1, 1.0);
  ch.device_to_ris.assign(1, std::vector<VectorXcd>(1));
  ch.device_to_ris[0][0] = VectorXcd::Constant(1, std::polar(1.0, -M_PI / 3.0));
  ch.ris_to_bs.resize(1);
  ch.ris_to_bs[0] = MatrixXcd::Constant(1, 1, 1.0);
  const PhaseConfig phases = PhaseConfig::from_theta(VectorXd::Constant(1, M_PI / 3.0));
  const VectorXcd hbar = combined_channel(ch, phases, 0);
  CHECK(hbar[0].real() == doctest::Approx(2.0));
  CHECK(hbar[0].imag() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("combined channel matches a scalar-loop expansion") {
  const SystemConfig cfg = small_cfg();
  const Topology topo = generate_topology(cfg);
  const ChannelSet ch = sample_channels(topo, cfg);
  Rng rng(1, "test.phases");
  const PhaseConfig phases = PhaseConfig::random(6, rng);
  for (int k = 0; k < 3; ++k) {
    std::complex<double> expect = ch.direct[k][0];
    int off = 0;
    for (int l = 0; l < 2; ++l) {
      for (int m = 0; m < 3; ++m)
        expect += ch.ris_to_bs[l](0, m) * phases.v[off + m] * ch.device_to_ris[k][l][m];
      off += 3;
    }
    const VectorXcd hbar = combined_channel(ch, phases, k);
    CHECK(std::abs(hbar[0] - expect) < 1e-12 * std::abs(expect) + 1e-18);
  }
}

TEST_CASE("combined channel is linear in v") {
  const SystemConfig cfg = small_cfg();
  const Topology topo = generate_topology(cfg);
  const ChannelSet ch = sample_channels(topo, cfg);
  Rng rng(2, "test.linearity");
  const PhaseConfig v1 = PhaseConfig::random(6, rng);
  const PhaseConfig v2 = PhaseConfig::random(6, rng);
  PhaseConfig vsum;
  vsum.v = v1.v + v2.v;
  for (int k = 0; k < 3; ++k) {
    const auto lhs = combined_channel(ch, vsum, k)[0] - ch.direct[k][0];
    const auto rhs = (combined_channel(ch, v1, k)[0] - ch.direct[k][0]) +
                     (combined_channel(ch, v2, k)[0] - ch.direct[k][0]);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("phase config round trips through theta") {
  Rng rng(3, "test.theta");
  const PhaseConfig p = PhaseConfig::random(5, rng);
  const PhaseConfig q = PhaseConfig::from_theta(p.theta());
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(p.v[i] - q.v[i]) < 1e-12);
    CHECK(std::abs(std::abs(p.v[i]) - 1.0) < 1e-12);
  }
}

TEST_CASE("short phase vector is rejected") {
  const SystemConfig cfg = small_cfg();
  const Topology topo = generate_topology(cfg);
  const ChannelSet ch = sample_channels(topo, cfg);
  PhaseConfig phases;
  phases.v = VectorXcd::Ones(3);  // needs 6
  CHECK_THROWS_AS(combined_channel(ch, phases, 0), std::invalid_argument);
}

#ifndef AIRFL_CHANNEL_HPP_
#define AIRFL_CHANNEL_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "airfl/config.hpp"
#include "airfl/rng.hpp"

namespace airfl {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct Topology {
  std::vector<Point3> device_positions;  // z = 0
  std::vector<Point3> ris_positions;
  Point3 bs_position;
};

// Channel coefficients for one realization. Dimensions follow SystemConfig:
// direct[k] is N_r x 1, device_to_ris[k][l] is M x 1, ris_to_bs[l] is N_r x M.
struct ChannelSet {
  std::vector<VectorXcd> direct;
  std::vector<std::vector<VectorXcd>> device_to_ris;
  std::vector<MatrixXcd> ris_to_bs;

  int num_devices() const { return static_cast<int>(direct.size()); }
  int num_ris() const { return static_cast<int>(ris_to_bs.size()); }
};

// RIS reflection coefficients, one unit-modulus entry per element, stacked
// RIS by RIS into a length L*M vector.
struct PhaseConfig {
  VectorXcd v;

  VectorXd theta() const {
    VectorXd t(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) t[i] = std::arg(v[i]);
    return t;
  }

  static PhaseConfig from_theta(const VectorXd& theta) {
    PhaseConfig p;
    p.v.resize(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i)
      p.v[i] = std::polar(1.0, theta[i]);
    return p;
  }

  static PhaseConfig random(int dim, Rng& rng) {
    PhaseConfig p;
    p.v.resize(dim);
    for (int i = 0; i < dim; ++i) p.v[i] = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
    return p;
  }
};

// Devices uniform in the square centered at the BS; RISs on a ring of radius
// area_side/2 at ris_height; BS at the origin at bs_height.
inline Topology generate_topology(const SystemConfig& cfg) {
  Topology topo;
  topo.bs_position = {0.0, 0.0, cfg.bs_height_m};
  const double r = cfg.area_side_m / 2.0;
  Rng rng(cfg.seed, "topology.devices");
  topo.device_positions.reserve(cfg.num_devices);
  for (int k = 0; k < cfg.num_devices; ++k)
    topo.device_positions.push_back({rng.uniform(-r, r), rng.uniform(-r, r), 0.0});
  topo.ris_positions.reserve(cfg.num_ris);
  for (int l = 1; l <= cfg.num_ris; ++l) {
    const double phi = 2.0 * M_PI * l / cfg.num_ris;
    topo.ris_positions.push_back({r * std::cos(phi), r * std::sin(phi), cfg.ris_height_m});
  }
  return topo;
}

// Linear power gain at distance d: 10^(ref_db/10) * d^(-exponent), referenced
// at 1 m.
inline double path_loss(double distance_m, double exponent, const SystemConfig& cfg) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("path_loss: distance must be positive");
  return db_to_linear(cfg.pathloss_ref_db) * std::pow(distance_m, -exponent);
}

// Rayleigh small-scale fading scaled by sqrt(path loss), independent across
// links and elements. One counter-based stream per (link class, device/RIS
// index, realization) so paired experiments see identical channels.
inline ChannelSet sample_channels(const Topology& topo, const SystemConfig& cfg,
                                  std::uint64_t realization = 0) {
  const int N = cfg.num_devices, L = cfg.num_ris, M = cfg.elements_per_ris,
            Nr = cfg.bs_antennas;
  if (static_cast<int>(topo.device_positions.size()) != N ||
      static_cast<int>(topo.ris_positions.size()) != L)
    throw std::invalid_argument("sample_channels: topology/config mismatch");

  ChannelSet ch;
  ch.direct.resize(N);
  ch.device_to_ris.assign(N, std::vector<VectorXcd>(L));
  ch.ris_to_bs.resize(L);

  for (int k = 0; k < N; ++k) {
    const double d = distance(topo.device_positions[k], topo.bs_position);
    if (d <= 0.0) throw std::invalid_argument("sample_channels: degenerate geometry");
    const double amp = std::sqrt(path_loss(d, cfg.alpha_direct, cfg));
    Rng rng(cfg.seed, "channel.direct", (realization << 16) + k);
    ch.direct[k].resize(Nr);
    for (int a = 0; a < Nr; ++a) ch.direct[k][a] = amp * rng.cnormal();
  }
  for (int k = 0; k < N; ++k) {
    for (int l = 0; l < L; ++l) {
      const double d = distance(topo.device_positions[k], topo.ris_positions[l]);
      if (d <= 0.0) throw std::invalid_argument("sample_channels: degenerate geometry");
      const double amp = std::sqrt(path_loss(d, cfg.alpha_ris, cfg));
      Rng rng(cfg.seed, "channel.device_to_ris", (realization << 16) + k * 1024 + l);
      ch.device_to_ris[k][l].resize(M);
      for (int m = 0; m < M; ++m) ch.device_to_ris[k][l][m] = amp * rng.cnormal();
    }
  }
  for (int l = 0; l < L; ++l) {
    const double d = distance(topo.ris_positions[l], topo.bs_position);
    if (d <= 0.0) throw std::invalid_argument("sample_channels: degenerate geometry");
    const double amp = std::sqrt(path_loss(d, cfg.alpha_ris, cfg));
    Rng rng(cfg.seed, "channel.ris_to_bs", (realization << 16) + l);
    ch.ris_to_bs[l].resize(Nr, M);
    for (int a = 0; a < Nr; ++a)
      for (int m = 0; m < M; ++m) ch.ris_to_bs[l](a, m) = amp * rng.cnormal();
  }
  return ch;
}

// Effective channel of device k: h_k + sum_l Gbar_l diag(v_l) g_k^l.
inline VectorXcd combined_channel(const ChannelSet& ch, const PhaseConfig& phases, int k) {
  if (k < 0 || k >= ch.num_devices())
    throw std::invalid_argument("combined_channel: device index out of range");
  const int L = ch.num_ris();
  VectorXcd h = ch.direct[k];
  int offset = 0;
  for (int l = 0; l < L; ++l) {
    const int M = static_cast<int>(ch.device_to_ris[k][l].size());
    if (phases.v.size() < offset + M)
      throw std::invalid_argument("combined_channel: phase vector too short");
    if (ch.ris_to_bs[l].cols() != M || ch.ris_to_bs[l].rows() != h.size())
      throw std::invalid_argument("combined_channel: dimension mismatch");
    const auto v_l = phases.v.segment(offset, M);
    h += ch.ris_to_bs[l] * v_l.cwiseProduct(ch.device_to_ris[k][l]);
    offset += M;
  }
  return h;
}

inline std::vector<VectorXcd> combined_channels(const ChannelSet& ch,
                                                const PhaseConfig& phases) {
  std::vector<VectorXcd> out(ch.num_devices());
  for (int k = 0; k < ch.num_devices(); ++k) out[k] = combined_channel(ch, phases, k);
  return out;
}

// Scalar-case view (N_r = 1).
inline std::vector<std::complex<double>> combined_channels_scalar(
    const ChannelSet& ch, const PhaseConfig& phases) {
  std::vector<std::complex<double>> out(ch.num_devices());
  for (int k = 0; k < ch.num_devices(); ++k) out[k] = combined_channel(ch, phases, k)[0];
  return out;
}

}  // namespace airfl

#endif  // AIRFL_CHANNEL_HPP_

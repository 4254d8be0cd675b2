#ifndef AIRFL_FLSIM_HPP_
#define AIRFL_FLSIM_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "airfl/aircomp.hpp"
#include "airfl/channel.hpp"
#include "airfl/config.hpp"
#include "airfl/phase.hpp"
#include "airfl/receive.hpp"

namespace airfl {

enum class Scheme { kNoRis, kSingleRis, kRandomRis, kMultiRis, kOptimal };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kNoRis: return "no-ris";
    case Scheme::kSingleRis: return "single-ris";
    case Scheme::kRandomRis: return "random-ris";
    case Scheme::kMultiRis: return "multi-ris";
    case Scheme::kOptimal: return "optimal";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "no-ris") return Scheme::kNoRis;
  if (s == "single-ris") return Scheme::kSingleRis;
  if (s == "random-ris") return Scheme::kRandomRis;
  if (s == "multi-ris") return Scheme::kMultiRis;
  if (s == "optimal") return Scheme::kOptimal;
  throw std::invalid_argument("unknown scheme: " + s);
}

inline const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> v = {Scheme::kNoRis, Scheme::kSingleRis,
                                        Scheme::kRandomRis, Scheme::kMultiRis,
                                        Scheme::kOptimal};
  return v;
}

struct RegressionModel {
  double slope = 0.0;
  double intercept = 0.0;

  double predict(double x) const { return slope * x + intercept; }
};

struct Dataset {
  std::vector<double> x;
  std::vector<double> y;
};

// Generative model of the task: y = -3x + 2 + 0.5 n0, x uniform on [-1, 1].
inline Dataset draw_dataset(int n, Rng& rng, double noise_std = 0.5) {
  Dataset d;
  d.x.resize(n);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    d.x[i] = rng.uniform(-1.0, 1.0);
    d.y[i] = -3.0 * d.x[i] + 2.0 + noise_std * rng.normal();
  }
  return d;
}

inline RegressionModel ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) throw std::invalid_argument("ols_fit: bad data");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::domain_error("ols_fit: degenerate design");
  RegressionModel m;
  m.slope = sxy / sxx;
  m.intercept = my - m.slope * mx;
  return m;
}

// Mean squared prediction error on a holdout set.
inline double test_error(const RegressionModel& model, const Dataset& holdout) {
  if (holdout.x.empty()) throw std::invalid_argument("test_error: empty holdout");
  double acc = 0.0;
  for (std::size_t i = 0; i < holdout.x.size(); ++i) {
    const double r = model.predict(holdout.x[i]) - holdout.y[i];
    acc += r * r;
  }
  return acc / static_cast<double>(holdout.x.size());
}

// Rounds until the first device exhausts delta energy units when a lambda_c
// fraction of per-round cost falls only on the K uploading devices.
inline long network_lifetime(int n, int k, double lambda_c, double delta) {
  if (k < 1 || k > n) throw std::invalid_argument("network_lifetime: require 1 <= K <= N");
  if (lambda_c < 0.0 || lambda_c > 1.0)
    throw std::invalid_argument("network_lifetime: lambda_c in [0, 1]");
  if (!(delta > 0.0)) throw std::invalid_argument("network_lifetime: delta > 0");
  const double nn = static_cast<double>(n);
  return static_cast<long>(std::floor(nn * delta / (nn - lambda_c * nn + lambda_c * k)));
}

struct LifetimeModel {
  double delta = 100.0;
  double lambda_c = 0.5;
  int n = 6;
  int k = 3;

  long rounds() const { return network_lifetime(n, k, lambda_c, delta); }
};

struct RoundRecord {
  int round = 0;
  double training_loss = 0.0;  // global model on the round's pooled data
  double test_err = 0.0;       // global model on the holdout set
  double aggregation_mse = 0.0;
  int num_selected = 0;
  double objective_u = 0.0;
  double min_channel_gain = 0.0;
  double beta = 0.0;  // min effective-channel modulus over selected devices
};

struct LearningTrace {
  Scheme scheme = Scheme::kOptimal;
  std::vector<RoundRecord> rounds;
  RegressionModel final_model;
};

struct RegressionOptions {
  int samples_per_round = 30;
  int holdout_size = 1000;
  double noise_std = 0.5;
  int num_selected = 0;  // 0 means all devices
};

namespace detail {

struct SchemeLink {
  std::vector<VectorXcd> hbar;   // effective channels of the selected devices
  std::vector<int> selected;
  TransceiverState tx;
  double aggregation_mse = 0.0;
  double min_channel_gain = 0.0;
  double beta = 0.0;
};

// Channel setup for one (config, scheme, seed): geometry, fading, phase
// configuration, then the closed-form transceivers on the chosen device set.
inline SchemeLink setup_link(const SystemConfig& base, Scheme scheme,
                             const RegressionOptions& opt) {
  SystemConfig cfg = base;
  if (scheme == Scheme::kNoRis) {
    cfg.num_ris = 0;
  } else if (scheme == Scheme::kSingleRis) {
    // one central surface at (area/2, 0, h) carrying all L*M elements; the
    // ring placement puts a lone RIS exactly there
    cfg.elements_per_ris = base.num_ris * base.elements_per_ris;
    cfg.num_ris = 1;
  }

  const Topology topo = generate_topology(cfg);
  const ChannelSet ch = sample_channels(topo, cfg);
  int dim = 0;
  for (int l = 0; l < cfg.num_ris; ++l)
    dim += static_cast<int>(ch.device_to_ris[0][l].size());

  PhaseConfig phases;
  phases.v.resize(0);
  if (dim > 0) {
    Rng prng(cfg.seed, "flsim.phases");
    phases = PhaseConfig::random(dim, prng);
    if (scheme == Scheme::kSingleRis || scheme == Scheme::kMultiRis) {
      const PhiMatrix phi = build_phi(ch);
      phases = sca_phase_design(phases, phi).v;
    }
  }

  SchemeLink link;
  std::vector<VectorXcd> hbar_all = combined_channels(ch, phases);
  const int n = cfg.num_devices;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (opt.num_selected > 0 && opt.num_selected < n) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return hbar_all[a].squaredNorm() > hbar_all[b].squaredNorm();
    });
    order.resize(opt.num_selected);
    std::sort(order.begin(), order.end());
  }
  link.selected = order;
  for (int k : link.selected) link.hbar.push_back(hbar_all[k]);

  std::vector<cplx> scalar(link.hbar.size());
  for (std::size_t k = 0; k < link.hbar.size(); ++k) scalar[k] = link.hbar[k][0];
  link.tx.a = VectorXcd::Constant(1, optimal_receive_scalar(scalar));
  link.tx.eta = normalizing_factor(link.tx.a, link.hbar, cfg.max_power_w());
  link.tx.p = optimal_power(link.tx.a, link.hbar, link.tx.eta);
  link.aggregation_mse =
      reduced_mse(link.tx.a, link.hbar, cfg.max_power_w(), cfg.noise_power_w());
  double mg = std::numeric_limits<double>::infinity();
  double bt = std::numeric_limits<double>::infinity();
  for (const auto& h : link.hbar) {
    mg = std::min(mg, std::norm(link.tx.a.dot(h)));
    bt = std::min(bt, std::abs(h[0]));
  }
  link.min_channel_gain = mg;
  link.beta = bt;
  return link;
}

}  // namespace detail

// One federated regression run. Every round each selected device fits a line
// on fresh samples (shared x-design, private label noise) and the two
// coefficients are aggregated over the air; the global model is the running
// average of the per-round aggregates. The 'optimal' scheme aggregates
// noise-free and bounds every channel-limited scheme.
inline LearningTrace run_regression_fl(const SystemConfig& cfg, Scheme scheme, int rounds,
                                       const RegressionOptions& opt = {}) {
  if (rounds < 1) throw std::invalid_argument("run_regression_fl: rounds >= 1");
  if (opt.num_selected < 0 || opt.num_selected > cfg.num_devices)
    throw std::invalid_argument("run_regression_fl: num_selected out of range");

  detail::SchemeLink link;
  int num_sel = opt.num_selected > 0 ? opt.num_selected : cfg.num_devices;
  std::vector<int> selected(num_sel);
  std::iota(selected.begin(), selected.end(), 0);
  if (scheme != Scheme::kOptimal) {
    link = detail::setup_link(cfg, scheme, opt);
    selected = link.selected;
    num_sel = static_cast<int>(selected.size());
  }
  if (num_sel == 0) throw std::invalid_argument("run_regression_fl: no devices selected");

  Rng hrng(cfg.seed, "flsim.holdout");
  const Dataset holdout = draw_dataset(opt.holdout_size, hrng, opt.noise_std);

  LearningTrace trace;
  trace.scheme = scheme;
  const double sigma = std::sqrt(cfg.noise_power_w());

  double avg_slope = 0.0, avg_intercept = 0.0;
  for (int r = 1; r <= rounds; ++r) {
    // shared regressor draw; label noise is private per device
    Rng xrng(cfg.seed, "flsim.x", static_cast<std::uint64_t>(r));
    std::vector<double> xs(opt.samples_per_round);
    for (auto& x : xs) x = xrng.uniform(-1.0, 1.0);

    std::vector<double> slopes, intercepts;
    Dataset pooled;
    for (int k : selected) {
      Rng nrng(cfg.seed, "flsim.labels",
               (static_cast<std::uint64_t>(r) << 16) + static_cast<std::uint64_t>(k));
      std::vector<double> ys(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        ys[i] = -3.0 * xs[i] + 2.0 + opt.noise_std * nrng.normal();
      const RegressionModel local = ols_fit(xs, ys);
      slopes.push_back(local.slope);
      intercepts.push_back(local.intercept);
      pooled.x.insert(pooled.x.end(), xs.begin(), xs.end());
      pooled.y.insert(pooled.y.end(), ys.begin(), ys.end());
    }

    auto air_mean = [&](const std::vector<double>& locals, int coord) {
      const Normalization nm = fit_normalization(locals);
      if (scheme == Scheme::kOptimal) {
        cplx sum = 0.0;
        for (double w : locals) sum += preprocess(w, nm);
        return postprocess(sum, nm, num_sel);
      }
      VectorXcd symbols(num_sel);
      for (int i = 0; i < num_sel; ++i) symbols[i] = preprocess(locals[i], nm);
      Rng wrng(cfg.seed, "flsim.rxnoise",
               (static_cast<std::uint64_t>(r) << 4) + static_cast<std::uint64_t>(coord));
      VectorXcd noise(1);
      noise[0] = sigma * wrng.cnormal();
      const AggregateResult agg = aggregate(symbols, link.hbar, link.tx, noise);
      return postprocess(agg.estimate, nm, num_sel);
    };

    const double round_slope = air_mean(slopes, 0);
    const double round_intercept = air_mean(intercepts, 1);
    avg_slope += (round_slope - avg_slope) / r;
    avg_intercept += (round_intercept - avg_intercept) / r;

    RoundRecord rec;
    rec.round = r;
    trace.final_model = {avg_slope, avg_intercept};
    rec.training_loss = test_error(trace.final_model, pooled);
    rec.test_err = test_error(trace.final_model, holdout);
    rec.num_selected = num_sel;
    if (scheme != Scheme::kOptimal) {
      rec.aggregation_mse = link.aggregation_mse;
      rec.objective_u = link.aggregation_mse - cfg.gamma * num_sel;
      rec.min_channel_gain = link.min_channel_gain;
      rec.beta = link.beta;
    } else {
      rec.objective_u = -cfg.gamma * num_sel;
    }
    trace.rounds.push_back(rec);
  }
  return trace;
}

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::uint64_t seed = 0;
  double test_err = 0.0;
  long lifetime = 0;
};

// Axis sweeps behind the plotted trends: final multi-RIS test error against
// K, M or N, and the lifetime formula against lambda_c.
inline std::vector<SweepRow> sweep_experiment(const SystemConfig& base,
                                              const std::string& axis,
                                              const std::vector<double>& values,
                                              int seeds, int rounds = 20) {
  if (values.empty()) throw std::invalid_argument("sweep_experiment: no values");
  if (seeds < 1) throw std::invalid_argument("sweep_experiment: seeds >= 1");
  std::vector<SweepRow> out;
  for (double value : values) {
    for (int s = 0; s < seeds; ++s) {
      SystemConfig cfg = base;
      cfg.seed = base.seed + static_cast<std::uint64_t>(s);
      RegressionOptions opt;
      SweepRow row;
      row.axis = axis;
      row.value = value;
      row.seed = cfg.seed;
      if (axis == "lambda_c") {
        const int k = std::max(1, cfg.num_devices / 2);
        row.lifetime = network_lifetime(cfg.num_devices, k, value, 100.0);
        out.push_back(row);
        continue;
      }
      if (axis == "K") {
        opt.num_selected = static_cast<int>(value);
      } else if (axis == "M") {
        cfg.elements_per_ris = static_cast<int>(value);
      } else if (axis == "N") {
        cfg.num_devices = static_cast<int>(value);
      } else {
        throw std::invalid_argument("sweep_experiment: unknown axis " + axis);
      }
      const auto errs = cfg.validate();
      if (!errs.empty()) throw std::invalid_argument("sweep_experiment: invalid point");
      const LearningTrace tr = run_regression_fl(cfg, Scheme::kMultiRis, rounds, opt);
      row.test_err = tr.rounds.back().test_err;
      row.lifetime = network_lifetime(
          cfg.num_devices, opt.num_selected > 0 ? opt.num_selected : cfg.num_devices, 0.5,
          100.0);
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace airfl

#endif  // AIRFL_FLSIM_HPP_

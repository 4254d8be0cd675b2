#ifndef AIRFL_AIRCOMP_HPP_
#define AIRFL_AIRCOMP_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "airfl/channel.hpp"

namespace airfl {

using cplx = std::complex<double>;

// Transmit scalars p_k, receive vector a (length 1 in the scalar case) and
// normalizing factor eta.
struct TransceiverState {
  VectorXcd p;
  VectorXcd a;
  double eta = 1.0;
};

struct MseReport {
  double mse = 0.0;
  double signal_misalignment = 0.0;  // sum_k |a^H hbar_k p_k / sqrt(eta) - 1|^2
  double noise_term = 0.0;           // sigma^2 ||a||^2 / eta
};

inline cplx effective_gain(const VectorXcd& a, const VectorXcd& hbar) {
  if (a.size() != hbar.size())
    throw std::invalid_argument("effective_gain: dimension mismatch");
  return a.dot(hbar);  // a^H hbar
}

// p_k = sqrt(eta) (a^H hbar_k)^H / |a^H hbar_k|^2, which forces
// a^H hbar_k p_k / sqrt(eta) = 1.
inline VectorXcd optimal_power(const VectorXcd& a, const std::vector<VectorXcd>& hbar,
                               double eta) {
  VectorXcd p(hbar.size());
  for (std::size_t k = 0; k < hbar.size(); ++k) {
    const cplx g = effective_gain(a, hbar[k]);
    const double g2 = std::norm(g);
    if (g2 <= 0.0)
      throw std::domain_error("optimal_power: zero effective channel at device " +
                              std::to_string(k));
    p[k] = std::sqrt(eta) * std::conj(g) / g2;
  }
  return p;
}

// eta = P0 min_k |a^H hbar_k|^2; the device attaining the min transmits at P0.
inline double normalizing_factor(const VectorXcd& a, const std::vector<VectorXcd>& hbar,
                                 double p0) {
  if (hbar.empty()) throw std::invalid_argument("normalizing_factor: empty device set");
  double min_gain = std::numeric_limits<double>::infinity();
  for (const auto& h : hbar) {
    const double g2 = std::norm(effective_gain(a, h));
    if (g2 <= 0.0) throw std::domain_error("normalizing_factor: zero effective channel");
    min_gain = std::min(min_gain, g2);
  }
  return p0 * min_gain;
}

inline MseReport mse(const VectorXcd& a, const std::vector<VectorXcd>& hbar,
                     const VectorXcd& p, double eta, double sigma2) {
  if (!(eta > 0.0)) throw std::invalid_argument("mse: eta must be positive");
  MseReport r;
  const double inv_sqrt_eta = 1.0 / std::sqrt(eta);
  for (std::size_t k = 0; k < hbar.size(); ++k)
    r.signal_misalignment += std::norm(effective_gain(a, hbar[k]) * p[k] * inv_sqrt_eta - 1.0);
  r.noise_term = sigma2 * a.squaredNorm() / eta;
  r.mse = r.signal_misalignment + r.noise_term;
  return r;
}

// Closed-form MSE under the optimal transceivers:
// sigma^2 ||a||^2 / (P0 min_k |a^H hbar_k|^2).
inline double reduced_mse(const VectorXcd& a, const std::vector<VectorXcd>& hbar,
                          double p0, double sigma2) {
  return sigma2 * a.squaredNorm() / normalizing_factor(a, hbar, p0);
}

// One AirComp use: shat = a^H (sum_k hbar_k p_k s_k + n0) / sqrt(eta).
struct AggregateResult {
  cplx estimate;
  cplx error;  // estimate - sum_k s_k
};

inline AggregateResult aggregate(const VectorXcd& symbols,
                                 const std::vector<VectorXcd>& hbar,
                                 const TransceiverState& tx, const VectorXcd& noise) {
  if (static_cast<std::size_t>(symbols.size()) != hbar.size() ||
      symbols.size() != tx.p.size())
    throw std::invalid_argument("aggregate: dimension mismatch");
  VectorXcd received = noise;
  for (Eigen::Index k = 0; k < symbols.size(); ++k)
    received += hbar[k] * (tx.p[k] * symbols[k]);
  AggregateResult out;
  out.estimate = tx.a.dot(received) / std::sqrt(tx.eta);
  out.error = out.estimate - symbols.sum();
  return out;
}

// Per-coordinate normalization broadcast to devices before each round.
struct Normalization {
  double mean = 0.0;
  double scale = 1.0;
};

inline cplx preprocess(double w, const Normalization& n) {
  if (n.scale == 0.0) throw std::invalid_argument("preprocess: zero scale");
  return cplx((w - n.mean) / n.scale, 0.0);
}

// Inverse transform of the received sum, then average over the K senders.
inline double postprocess(cplx shat, const Normalization& n, int num_senders) {
  if (n.scale == 0.0) throw std::invalid_argument("postprocess: zero scale");
  if (num_senders < 1) throw std::invalid_argument("postprocess: empty device set");
  return n.mean + shat.real() * n.scale / num_senders;
}

// Normalization from the current round's local values; scale falls back to 1
// when all locals coincide (the coordinate then rides on the mean alone).
inline Normalization fit_normalization(const std::vector<double>& locals) {
  if (locals.empty()) throw std::invalid_argument("fit_normalization: no locals");
  Normalization n;
  for (double w : locals) n.mean += w;
  n.mean /= static_cast<double>(locals.size());
  double var = 0.0;
  for (double w : locals) var += (w - n.mean) * (w - n.mean);
  var /= static_cast<double>(locals.size());
  n.scale = var > 0.0 ? std::sqrt(var) : 1.0;
  return n;
}

}  // namespace airfl

#endif  // AIRFL_AIRCOMP_HPP_

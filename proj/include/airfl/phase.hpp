#ifndef AIRFL_PHASE_HPP_
#define AIRFL_PHASE_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "airfl/aircomp.hpp"
#include "airfl/channel.hpp"
#include "airfl/conic.hpp"

namespace airfl {

using Eigen::RowVectorXcd;

// Per-device rows Phi_k with Phi_k[l*M+m] = gbar_l[m] * g_k^l[m], so that
// hbar_k = h_k + Phi_k v for any reflection vector v.
struct PhiMatrix {
  std::vector<cplx> h;             // direct channel per device (after receive combining)
  std::vector<RowVectorXcd> phi;   // one row per device, length L*M

  int num_devices() const { return static_cast<int>(phi.size()); }
  int dim() const { return phi.empty() ? 0 : static_cast<int>(phi[0].size()); }

  cplx effective(int k, const VectorXcd& v) const { return h[k] + (phi[k] * v)(0); }
  double min_modulus(const VectorXcd& v) const {
    double b = std::numeric_limits<double>::infinity();
    for (int k = 0; k < num_devices(); ++k) b = std::min(b, std::abs(effective(k, v)));
    return b;
  }
};

// Scalar-case substitution (N_r = 1).
inline PhiMatrix build_phi(const ChannelSet& ch) {
  PhiMatrix out;
  const int N = ch.num_devices(), L = ch.num_ris();
  out.h.resize(N);
  out.phi.resize(N);
  for (int k = 0; k < N; ++k) {
    if (ch.direct[k].size() != 1)
      throw std::invalid_argument("build_phi: expected scalar channels (N_r = 1)");
    out.h[k] = ch.direct[k][0];
    int dim = 0;
    for (int l = 0; l < L; ++l) dim += static_cast<int>(ch.device_to_ris[k][l].size());
    out.phi[k].resize(dim);
    int off = 0;
    for (int l = 0; l < L; ++l) {
      const int M = static_cast<int>(ch.device_to_ris[k][l].size());
      if (ch.ris_to_bs[l].cols() != M)
        throw std::invalid_argument("build_phi: dimension mismatch");
      for (int m = 0; m < M; ++m)
        out.phi[k][off + m] = ch.ris_to_bs[l](0, m) * ch.device_to_ris[k][l][m];
      off += M;
    }
  }
  return out;
}

// Multi-antenna case for a fixed receive vector a: the scalar machinery runs
// on a^H hbar_k, so each RIS-to-BS matrix is combined through a first.
inline PhiMatrix build_phi(const ChannelSet& ch, const VectorXcd& a) {
  PhiMatrix out;
  const int N = ch.num_devices(), L = ch.num_ris();
  out.h.resize(N);
  out.phi.resize(N);
  for (int k = 0; k < N; ++k) {
    out.h[k] = a.dot(ch.direct[k]);
    int dim = 0;
    for (int l = 0; l < L; ++l) dim += static_cast<int>(ch.device_to_ris[k][l].size());
    out.phi[k].resize(dim);
    int off = 0;
    for (int l = 0; l < L; ++l) {
      const RowVectorXcd gbar_eff = a.adjoint() * ch.ris_to_bs[l];
      const int M = static_cast<int>(ch.device_to_ris[k][l].size());
      for (int m = 0; m < M; ++m)
        out.phi[k][off + m] = gbar_eff[m] * ch.device_to_ris[k][l][m];
      off += M;
    }
  }
  return out;
}

inline PhaseConfig project_unit_modulus(const VectorXcd& v) {
  PhaseConfig out;
  out.v.resize(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m <= 0.0) throw std::domain_error("project_unit_modulus: zero entry");
    out.v[i] = v[i] / m;
  }
  return out;
}

struct PhaseIterRecord {
  double beta_sq = 0.0;        // bound variable of the subproblem
  double surrogate = 0.0;      // subproblem objective at the accepted iterate
  double surrogate_at_start = 0.0;  // same subproblem evaluated at v^(z)
  double delta1 = 0.0;
  double delta2 = 0.0;
  double max_unit_residual = 0.0;  // max(1 - |v|) before projection
};

struct PhaseDesignResult {
  PhaseConfig v;                 // unit-modulus (projected)
  double beta = 0.0;             // min_k |h_k + Phi_k v| after projection
  double penalty = 0.0;          // final penalty weight
  double max_unit_residual = 0.0;
  std::vector<PhaseIterRecord> trace;
};

struct PhaseDesignOptions {
  double penalty0 = 1.0;
  double eps1 = 1e-8;
  double eps2 = 1e-8;
  int max_iters = 30;       // N2
  int max_penalty_doublings = 6;
  double unit_tol = 1e-3;   // required max(1 - |v|) before projection
};

// Penalty-based successive convex approximation for
//   max_v min_k |h_k + Phi_k v|  s.t. |v_m| = 1.
// The unit-modulus equality is relaxed to |v_m| <= 1 plus a linearized
// penalty pushing entries onto the circle; each round solves a convex
// subproblem in (v, beta).
inline PhaseDesignResult sca_phase_design(const PhaseConfig& v0, const PhiMatrix& sys,
                                          const PhaseDesignOptions& opt = {}) {
  const int d = sys.dim();
  const int K = sys.num_devices();
  if (v0.v.size() != d) throw std::invalid_argument("sca_phase_design: v0 size mismatch");
  if (d == 0) {
    PhaseDesignResult out;
    out.v = v0;
    out.beta = sys.min_modulus(v0.v);
    return out;
  }

  const int n = 2 * d + 1;  // (Re, Im) pairs then beta
  const int ib = 2 * d;

  VectorXcd v = v0.v;
  for (int i = 0; i < d; ++i)
    if (std::abs(v[i]) > 1.0) v[i] /= std::abs(v[i]);

  // normalize the channel scale so the subproblem objective is O(1); physical
  // gains can sit at 1e-5 amplitude where an absolute solver gap would swamp
  // the bound variable
  double scale = 0.0;
  for (int k = 0; k < K; ++k)
    scale = std::max(scale, std::abs(sys.h[k]) + sys.phi[k].cwiseAbs().sum());
  if (scale <= 0.0) scale = 1.0;
  PhiMatrix sysn;
  sysn.h.resize(K);
  sysn.phi.resize(K);
  for (int k = 0; k < K; ++k) {
    sysn.h[k] = sys.h[k] / scale;
    sysn.phi[k] = sys.phi[k] / scale;
  }

  PhaseDesignResult out;

  auto beta_sq_of = [&](const VectorXcd& vv) {
    double b = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) b = std::min(b, std::norm(sysn.effective(k, vv)));
    return b;
  };

  // weight the penalty against the per-element share of the gain objective;
  // a flat O(1) weight would dwarf the bound variable once d is large and
  // pin v at its warm start
  const double pen_scale =
      std::max(beta_sq_of(v), 1e-4) / static_cast<double>(d);
  double zeta = opt.penalty0 * pen_scale;

  for (int round = 0; round <= opt.max_penalty_doublings; ++round) {
    double beta_prev = beta_sq_of(v);
    for (int n2 = 1; n2 <= opt.max_iters; ++n2) {
      ConicProblem prob;
      prob.n = n;
      prob.q = VectorXd::Zero(n);
      prob.q[ib] = -1.0;  // maximize beta
      for (int m = 0; m < d; ++m) {
        prob.q[2 * m] = -2.0 * zeta * v[m].real();
        prob.q[2 * m + 1] = -2.0 * zeta * v[m].imag();
        prob.discs.emplace_back(2 * m, 2 * m + 1);
      }
      prob.G.resize(K, n);
      prob.h.resize(K);
      for (int k = 0; k < K; ++k) {
        const cplx w = sysn.effective(k, v);
        prob.G.row(k).setZero();
        prob.G(k, ib) = 1.0;
        cplx lin_at_v = 0.0;
        for (int m = 0; m < d; ++m) {
          const cplx dkm = std::conj(w) * sysn.phi[k][m];
          prob.G(k, 2 * m) = -2.0 * dkm.real();
          prob.G(k, 2 * m + 1) = 2.0 * dkm.imag();
          lin_at_v += 2.0 * std::conj(w) * sysn.phi[k][m] * v[m];
        }
        prob.h[k] = std::norm(w) - lin_at_v.real();
      }

      // strictly feasible start at a slightly shrunk current iterate
      VectorXd x0(n);
      for (int m = 0; m < d; ++m) {
        x0[2 * m] = v[m].real() * (1.0 - 1e-7);
        x0[2 * m + 1] = v[m].imag() * (1.0 - 1e-7);
      }
      double start_bound = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        double lhs = prob.h[k];
        for (int m = 0; m < d; ++m)
          lhs -= prob.G(k, 2 * m) * x0[2 * m] + prob.G(k, 2 * m + 1) * x0[2 * m + 1];
        start_bound = std::min(start_bound, lhs);
      }
      x0[ib] = start_bound - std::max(1e-9, 1e-6 * std::abs(start_bound));

      const ConicResult sol = solve_conic(prob, 1e-9, 400, &x0);
      if (sol.status == SolveStatus::kInfeasible)
        throw std::runtime_error("sca_phase_design: subproblem infeasible");

      VectorXcd v_new(d);
      for (int m = 0; m < d; ++m) v_new[m] = cplx(sol.x[2 * m], sol.x[2 * m + 1]);
      const double beta_new = sol.x[ib];

      PhaseIterRecord rec;
      rec.beta_sq = beta_new;
      rec.surrogate = -sol.objective;
      // the same surrogate evaluated at the linearization point: the penalty
      // term vanishes there and the bound variable sits at the true minimum
      rec.surrogate_at_start = beta_prev;
      rec.delta1 = 0.0;
      for (int m = 0; m < d; ++m)
        rec.delta1 += 2.0 * zeta * (std::conj(v[m]) * (v_new[m] - v[m])).real();
      rec.delta2 = beta_new - beta_prev;
      double resid = 0.0;
      for (int m = 0; m < d; ++m) resid = std::max(resid, 1.0 - std::abs(v_new[m]));
      rec.max_unit_residual = resid;
      out.trace.push_back(rec);

      v = v_new;
      beta_prev = beta_new;
      if (rec.delta1 * rec.delta1 <= opt.eps1 && rec.delta2 * rec.delta2 <= opt.eps2)
        break;
    }

    double resid = 0.0;
    for (int m = 0; m < d; ++m) resid = std::max(resid, 1.0 - std::abs(v[m]));
    out.max_unit_residual = resid;
    out.penalty = zeta;
    if (resid <= opt.unit_tol) break;
    zeta *= 2.0;
  }

  // finalize on the unit circle; never return something worse than the warm
  // start
  PhaseConfig projected = project_unit_modulus(v);
  PhaseConfig start_projected;
  bool start_ok = true;
  for (int i = 0; i < d; ++i)
    if (std::abs(v0.v[i]) <= 0.0) start_ok = false;
  if (start_ok) start_projected = project_unit_modulus(v0.v);
  const double beta_new = sys.min_modulus(projected.v);
  const double beta_start = start_ok ? sys.min_modulus(start_projected.v) : -1.0;
  if (start_ok && beta_new < beta_start) {
    out.v = start_projected;
    out.beta = beta_start;
  } else {
    out.v = projected;
    out.beta = beta_new;
  }
  return out;
}

}  // namespace airfl

#endif  // AIRFL_PHASE_HPP_

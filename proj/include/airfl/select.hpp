#ifndef AIRFL_SELECT_HPP_
#define AIRFL_SELECT_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "airfl/aircomp.hpp"
#include "airfl/config.hpp"
#include "airfl/conic.hpp"

namespace airfl {

// Sum of the k largest absolute entries.
inline double ky_fan_norm(const VectorXd& e, int k) {
  const int n = static_cast<int>(e.size());
  if (k < 0 || k > n) throw std::out_of_range("ky_fan_norm: k out of range");
  std::vector<double> mags(n);
  for (int i = 0; i < n; ++i) mags[i] = std::abs(e[i]);
  std::partial_sort(mags.begin(), mags.begin() + k, mags.end(), std::greater<>());
  return std::accumulate(mags.begin(), mags.begin() + k, 0.0);
}

// Entry n is sign(e_n) when |e_n| ranks among the k largest (ties broken by
// ascending index so exactly k entries are active), else 0.
inline VectorXd ky_fan_subgradient(const VectorXd& e, int k) {
  const int n = static_cast<int>(e.size());
  if (k < 0 || k > n) throw std::out_of_range("ky_fan_subgradient: k out of range");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(e[a]) > std::abs(e[b]);
  });
  VectorXd g = VectorXd::Zero(n);
  for (int i = 0; i < k; ++i) {
    const double x = e[order[i]];
    g[order[i]] = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  }
  return g;
}

struct SelectionState {
  VectorXd e;
  double tau = 0.0;
  std::vector<int> selected;
  double rho = 0.0;      // epsilon0 P0 / sigma^2
  double rho_bar = 0.0;  // sigma^2 ||a||^2 / (gamma P0)
  int ky_fan_k = 0;
  int dc_iterations = 0;
  bool fallback = false;  // no device met the error demand; best channel kept
};

// Objective of the combinatorial subproblem for an explicit set:
// sigma^2 ||a||^2 / (P0 min_{k in S} |a^H hbar_k|^2) - gamma |S|.
inline double selection_objective(const std::vector<int>& selected, const VectorXcd& a,
                                  const std::vector<VectorXcd>& hbar,
                                  const SystemConfig& cfg) {
  if (selected.empty()) throw std::invalid_argument("selection_objective: empty set");
  double min_gain = std::numeric_limits<double>::infinity();
  for (int k : selected) min_gain = std::min(min_gain, std::norm(a.dot(hbar[k])));
  return cfg.noise_power_w() * a.squaredNorm() / (cfg.max_power_w() * min_gain) -
         cfg.gamma * static_cast<double>(selected.size());
}

struct DcSelectOptions {
  double alpha = 1e-3;    // strong-convexity weight
  double tol = 1e-9;      // stop when the DC objective decrease falls below
  int max_iters = 50;     // N3
  double select_eps = 1e-6;
  double sparsity_gap = 1e-8;
};

// Device selection by DC programming: the l0 count of the slack vector is
// written as l1 minus Ky Fan k, the subtracted part is linearized, and each
// round solves the resulting convex problem in (e, tau). An outer loop keeps
// the smallest k whose converged slack is k-sparse.
inline SelectionState dc_select(const VectorXcd& a, const std::vector<VectorXcd>& hbar,
                                const SystemConfig& cfg, const DcSelectOptions& opt = {}) {
  const int N = static_cast<int>(hbar.size());
  if (N == 0) throw std::invalid_argument("dc_select: no devices");
  const double p0 = cfg.max_power_w();
  const double sigma2 = cfg.noise_power_w();
  const double a2 = a.squaredNorm();

  SelectionState st;
  st.rho = cfg.epsilon0 * p0 / sigma2;
  st.rho_bar = sigma2 * a2 / (cfg.gamma * p0);

  VectorXd c(N);   // effective gains |a^H hbar_n|^2
  VectorXd q(N);   // rho |hbar_n|^2 in the combined sense (c_n scaled by |a|^2)
  for (int n = 0; n < N; ++n) {
    c[n] = std::norm(a.dot(hbar[n]));
    q[n] = st.rho * c[n] / a2;
  }

  const int nv = N + 1;  // (e, tau)
  const int itau = N;

  auto run_dc_for_k = [&](int k, VectorXd& e, double& tau, int& iters) {
    // feasible start: tau from the all-selected closed form, slacks covering
    // both constraint families
    const double cmin = c.minCoeff();
    tau = cmin > 0.0 ? st.rho_bar / cmin : 1.0;
    for (int n = 0; n < N; ++n)
      e[n] = std::max({0.0, st.rho_bar - tau * c[n], 1.0 - q[n]});

    auto dc_objective = [&](const VectorXd& ee, double tt) {
      return ee.lpNorm<1>() + tt - ky_fan_norm(ee, k);
    };
    double prev = dc_objective(e, tau);
    for (iters = 0; iters < opt.max_iters; ++iters) {
      const VectorXd sub = ky_fan_subgradient(e, k) + opt.alpha * e;

      ConicProblem prob;
      prob.n = nv;
      prob.q = VectorXd::Zero(nv);
      prob.quad_diag = VectorXd::Zero(nv);
      for (int n = 0; n < N; ++n) {
        prob.q[n] = 1.0 - sub[n];
        prob.quad_diag[n] = opt.alpha;
      }
      prob.q[itau] = 1.0;
      // rows: e_n >= 0, tau >= 0, rho_bar - tau c_n <= e_n, 1 - q_n <= e_n
      const int rows = 2 * N + N + 1;
      prob.G = MatrixXd::Zero(rows, nv);
      prob.h = VectorXd::Zero(rows);
      int r = 0;
      for (int n = 0; n < N; ++n, ++r) {
        prob.G(r, n) = -1.0;  // -e_n <= 0
      }
      prob.G(r, itau) = -1.0;  // -tau <= 0
      ++r;
      for (int n = 0; n < N; ++n, ++r) {
        prob.G(r, n) = -1.0;
        prob.G(r, itau) = -c[n];
        prob.h[r] = -st.rho_bar;
      }
      for (int n = 0; n < N; ++n, ++r) {
        prob.G(r, n) = -1.0;
        prob.h[r] = q[n] - 1.0;
      }

      VectorXd x0(nv);
      x0.head(N) = e.array() + 1e-6;
      x0[itau] = tau + 1e-6;
      const ConicResult sol = solve_conic(prob, 1e-10, 400, &x0);
      if (sol.status == SolveStatus::kInfeasible)
        throw std::runtime_error("dc_select: convex subproblem infeasible");
      e = sol.x.head(N);
      tau = sol.x[itau];
      const double cur = dc_objective(e, tau);
      if (prev - cur < opt.tol) break;
      prev = cur;
    }
  };

  bool found = false;
  VectorXd best_e(N);
  double best_tau = 0.0;
  for (int k = 0; k <= N && !found; ++k) {
    VectorXd e(N);
    double tau = 0.0;
    int iters = 0;
    run_dc_for_k(k, e, tau, iters);
    st.dc_iterations += iters;
    if (e.lpNorm<1>() - ky_fan_norm(e, k) <= opt.sparsity_gap) {
      st.ky_fan_k = k;
      best_e = e;
      best_tau = tau;
      found = true;
    }
  }
  if (!found) {  // k = N always closes the gap; keep the last solution anyway
    VectorXd e(N);
    double tau = 0.0;
    int iters = 0;
    run_dc_for_k(N, e, tau, iters);
    st.ky_fan_k = N;
    best_e = e;
    best_tau = tau;
  }

  st.e = best_e;
  st.tau = best_tau;
  for (int n = 0; n < N; ++n)
    if (best_e[n] <= opt.select_eps) st.selected.push_back(n);

  if (st.selected.empty()) {
    // error demand unmet everywhere: keep the strongest channel and flag it
    int best = 0;
    for (int n = 1; n < N; ++n)
      if (c[n] > c[best]) best = n;
    st.selected.push_back(best);
    st.fallback = true;
  }
  return st;
}

}  // namespace airfl

#endif  // AIRFL_SELECT_HPP_

#ifndef AIRFL_SDP_HPP_
#define AIRFL_SDP_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "airfl/conic.hpp"  // SolveStatus

namespace airfl {

using Eigen::MatrixXcd;

// minimize  tr(C A)
// s.t.      tr(A H_k) >= b_k   for all k
//           A Hermitian PSD
//
// Desk-scale (n <= ~16). C must be Hermitian positive definite (identity by
// default). Solved through the dual  max b'y  s.t.  sum_k y_k H_k <= C, y >= 0
// with a barrier method; the primal iterate recovered from the dual slack is
// always strictly feasible, so the reported gap is a true certificate.
struct SdpProblem {
  MatrixXcd cost;                       // C; empty means identity
  std::vector<MatrixXcd> constraints;   // H_k
  Eigen::VectorXd bounds;               // b_k; empty means all ones
};

struct SdpResult {
  MatrixXcd A;
  SolveStatus status = SolveStatus::kIterationLimit;
  double objective = 0.0;   // tr(C A), upper bound
  double dual_objective = 0.0;  // b'y, lower bound on any feasible solution
  double gap = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void require_hermitian(const MatrixXcd& m, const char* what) {
  if (m.rows() != m.cols() || (m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument(std::string(what) + ": matrix not Hermitian");
}

}  // namespace detail

inline SdpResult solve_sdp(const SdpProblem& prob, double tol = 1e-6,
                           int max_iters = 5000) {
  const int K = static_cast<int>(prob.constraints.size());
  if (K == 0) throw std::invalid_argument("solve_sdp: no constraints");
  const int n = static_cast<int>(prob.constraints[0].rows());
  MatrixXcd C = prob.cost.size() > 0 ? prob.cost : MatrixXcd::Identity(n, n);
  detail::require_hermitian(C, "solve_sdp cost");
  for (const auto& H : prob.constraints) {
    detail::require_hermitian(H, "solve_sdp constraint");
    if (H.rows() != n) throw std::invalid_argument("solve_sdp: dimension mismatch");
  }
  Eigen::VectorXd b = prob.bounds.size() > 0 ? prob.bounds : Eigen::VectorXd::Ones(K);
  if (b.size() != K) throw std::invalid_argument("solve_sdp: bounds size mismatch");

  SdpResult res;

  // strictly feasible dual start: y = eps with sum_k eps H_k << C
  Eigen::SelfAdjointEigenSolver<MatrixXcd> ces(C);
  const double c_min = ces.eigenvalues().minCoeff();
  if (c_min <= 0.0) throw std::invalid_argument("solve_sdp: cost matrix must be PD");
  double norm_sum = 0.0;
  for (const auto& H : prob.constraints) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    norm_sum += es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::VectorXd y =
      Eigen::VectorXd::Constant(K, 0.5 * c_min / std::max(norm_sum, 1e-300));

  auto slack = [&](const Eigen::VectorXd& yy) {
    MatrixXcd S = C;
    for (int k = 0; k < K; ++k) S -= yy[k] * prob.constraints[k];
    return S;
  };
  auto barrier_value = [&](const Eigen::VectorXd& yy, double t) {
    if (yy.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
    const MatrixXcd S = slack(yy);
    Eigen::LLT<MatrixXcd> llt(S);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
    double val = -t * b.dot(yy) - logdet;
    for (int k = 0; k < K; ++k) val -= std::log(yy[k]);
    return val;
  };

  const double nu = static_cast<double>(n + K);
  double t = 1.0;
  int steps = 0;
  while (true) {
    // Newton centering in the K dual variables
    for (; steps < max_iters; ++steps) {
      const MatrixXcd S = slack(y);
      const MatrixXcd Sinv = S.llt().solve(MatrixXcd::Identity(n, n));
      Eigen::VectorXd g(K);
      Eigen::MatrixXd Hs(K, K);
      std::vector<MatrixXcd> SiH(K);
      for (int k = 0; k < K; ++k) SiH[k] = Sinv * prob.constraints[k];
      for (int k = 0; k < K; ++k) {
        g[k] = -t * b[k] + SiH[k].trace().real() - 1.0 / y[k];
        for (int j = 0; j <= k; ++j) {
          const double v = (SiH[k] * SiH[j]).trace().real();
          Hs(k, j) = v;
          Hs(j, k) = v;
        }
        Hs(k, k) += 1.0 / (y[k] * y[k]);
      }
      const Eigen::VectorXd dy = Hs.ldlt().solve(-g);
      const double lambda2 = -g.dot(dy);
      if (!(lambda2 > 0.0) || lambda2 * 0.5 < 1e-11) break;
      // backtracking line search; the acceptance test carries a relative
      // roundoff allowance so the search cannot stall once the decrement
      // drops below the resolution of the objective at large t
      const double f0 = barrier_value(y, t);
      const double fuzz = 1e-12 * (std::abs(f0) + 1.0);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd yn = y + alpha * dy;
        const double fn = barrier_value(yn, t);
        if (fn <= f0 - 1e-4 * alpha * lambda2 + fuzz) {
          y = yn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }

    const MatrixXcd S = slack(y);
    const MatrixXcd Sinv = S.llt().solve(MatrixXcd::Identity(n, n));
    res.A = (Sinv / t).eval();
    res.A = 0.5 * (res.A + res.A.adjoint().eval());  // symmetrize roundoff
    // the centering stop can leave tr(A H_k) marginally below b_k; scale the
    // iterate onto the feasible side so the objective is a true upper bound
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      if (b[k] <= 0.0) continue;
      min_ratio = std::min(min_ratio, (res.A * prob.constraints[k]).trace().real() / b[k]);
    }
    if (min_ratio > 0.0 && min_ratio < 1.0) res.A /= min_ratio;
    res.objective = (C * res.A).trace().real();
    res.dual_objective = b.dot(y);
    res.gap = res.objective - res.dual_objective;

    if (res.dual_objective > 1e16) {
      res.status = SolveStatus::kInfeasible;
      return res;
    }
    if (nu / t <= tol * std::max(1.0, std::abs(res.objective))) {
      res.status = SolveStatus::kOptimal;
      return res;
    }
    if (steps >= max_iters) {
      res.status = SolveStatus::kIterationLimit;
      return res;
    }
    t *= 10.0;
  }
}

}  // namespace airfl

#endif  // AIRFL_SDP_HPP_

#ifndef AIRFL_RECEIVE_HPP_
#define AIRFL_RECEIVE_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "airfl/aircomp.hpp"
#include "airfl/conic.hpp"
#include "airfl/rng.hpp"
#include "airfl/sdp.hpp"

namespace airfl {

// Closed form for the single-antenna case: |a| = 1 / min_k |hbar_k|, phase
// fixed to zero.
inline cplx optimal_receive_scalar(const std::vector<cplx>& hbar) {
  if (hbar.empty()) throw std::invalid_argument("optimal_receive_scalar: empty set");
  double min_mod = std::numeric_limits<double>::infinity();
  for (const auto& h : hbar) {
    const double m = std::abs(h);
    if (m <= 0.0) throw std::domain_error("optimal_receive_scalar: zero channel");
    min_mod = std::min(min_mod, m);
  }
  return {1.0 / min_mod, 0.0};
}

inline double min_effective_gain(const VectorXcd& a, const std::vector<VectorXcd>& hbar) {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& h : hbar) g = std::min(g, std::abs(a.dot(h)));
  return g;
}

struct SdrReceiveResult {
  MatrixXcd A;               // relaxed PSD solution
  VectorXcd a_candidate;     // feasible vector (min_k |a^H hbar_k| = 1)
  double sdr_objective = 0;  // tr(A), lower bound on ||a||^2 of any feasible a
  bool rank_one = false;
};

// Matrix-lifted relaxation of min ||a||^2 s.t. ||a^H hbar_k||^2 >= 1, with
// top-eigenpair recovery and Gaussian randomization when the relaxation is
// not tight. Recovered candidates are rescaled onto the feasible set.
inline SdrReceiveResult sdr_receive_vector(const std::vector<VectorXcd>& hbar,
                                           double tol = 1e-9,
                                           int randomization_samples = 200,
                                           std::uint64_t seed = 0) {
  if (hbar.empty()) throw std::invalid_argument("sdr_receive_vector: empty set");
  const int nr = static_cast<int>(hbar[0].size());
  SdrReceiveResult out;
  if (nr == 1) {
    std::vector<cplx> scalar(hbar.size());
    for (std::size_t k = 0; k < hbar.size(); ++k) scalar[k] = hbar[k][0];
    const cplx a = optimal_receive_scalar(scalar);
    out.A = MatrixXcd::Constant(1, 1, std::norm(a));
    out.a_candidate = VectorXcd::Constant(1, a);
    out.sdr_objective = std::norm(a);
    out.rank_one = true;
    return out;
  }

  SdpProblem sdp;
  sdp.constraints.reserve(hbar.size());
  for (const auto& h : hbar) sdp.constraints.push_back(h * h.adjoint());
  const SdpResult sol = solve_sdp(sdp, tol);
  if (sol.status == SolveStatus::kInfeasible)
    throw std::runtime_error("sdr_receive_vector: relaxation infeasible");
  out.A = sol.A;
  out.sdr_objective = sol.dual_objective;  // certified lower bound

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sol.A);
  const auto& ev = es.eigenvalues();
  const double l1 = ev[nr - 1];
  const double l2 = nr > 1 ? ev[nr - 2] : 0.0;
  out.rank_one = l2 < 1e-6 * l1;

  auto rescaled = [&](VectorXcd a) {
    const double g = min_effective_gain(a, hbar);
    if (g <= 0.0) return VectorXcd();
    return VectorXcd(a / g);
  };

  VectorXcd best = rescaled(std::sqrt(std::max(l1, 0.0)) * es.eigenvectors().col(nr - 1));
  if (!out.rank_one) {
    // Gaussian randomization around A^(1/2)
    MatrixXcd sqrtA = MatrixXcd::Zero(nr, nr);
    for (int i = 0; i < nr; ++i)
      sqrtA += std::sqrt(std::max(ev[i], 0.0)) * es.eigenvectors().col(i) *
               es.eigenvectors().col(i).adjoint();
    Rng rng(seed, "receive.randomization");
    for (int s = 0; s < randomization_samples; ++s) {
      VectorXcd g(nr);
      for (int i = 0; i < nr; ++i) g[i] = rng.cnormal();
      const VectorXcd cand = rescaled(sqrtA * g);
      if (cand.size() > 0 && (best.size() == 0 || cand.squaredNorm() < best.squaredNorm()))
        best = cand;
    }
  }
  if (best.size() == 0)
    throw std::runtime_error("sdr_receive_vector: no feasible candidate recovered");
  out.a_candidate = best;
  return out;
}

// Successive convex refinement of a feasible receive vector: each iteration
// minimizes ||a||^2 under the constraints linearized at the previous iterate,
// so the objective sequence is non-increasing and every iterate stays
// feasible for the original constraints.
inline VectorXcd sca_refine_receive(const VectorXcd& a0,
                                    const std::vector<VectorXcd>& hbar,
                                    double eps = 1e-8, int max_iters = 50,
                                    int* iters_out = nullptr) {
  const int nr = static_cast<int>(a0.size());
  if (min_effective_gain(a0, hbar) < 1.0 - 1e-9)
    throw std::invalid_argument("sca_refine_receive: infeasible start");
  VectorXcd a = a0;
  const int n = 2 * nr;
  if (iters_out != nullptr) *iters_out = 0;

  for (int it = 0; it < max_iters; ++it) {
    if (iters_out != nullptr) *iters_out = it + 1;
    ConicProblem prob;
    prob.n = n;
    prob.q = VectorXd::Zero(n);
    prob.quad_diag = VectorXd::Constant(n, 2.0);  // objective ||x||^2
    prob.G.resize(static_cast<int>(hbar.size()), n);
    prob.h.resize(static_cast<int>(hbar.size()));
    for (std::size_t k = 0; k < hbar.size(); ++k) {
      const cplx g = a.dot(hbar[k]);  // a^H hbar_k at the linearization point
      const Eigen::Vector2d bz(g.real(), g.imag());
      // b(x) = (x' c_re, x' c_im) with the complex product expanded over
      // (Re a, Im a)
      VectorXd c_re(n), c_im(n);
      for (int i = 0; i < nr; ++i) {
        c_re[i] = hbar[k][i].real();
        c_re[nr + i] = hbar[k][i].imag();
        c_im[i] = hbar[k][i].imag();
        c_im[nr + i] = -hbar[k][i].real();
      }
      // 2 bz' b(x) >= 1 + ||bz||^2
      prob.G.row(k) = (-2.0 * (bz[0] * c_re + bz[1] * c_im)).transpose();
      prob.h[k] = -(1.0 + bz.squaredNorm());
    }
    // strictly feasible start: the current iterate nudged off the boundary
    VectorXd x0(n);
    const VectorXcd a_start = a * (1.0 + 1e-7);
    x0.head(nr) = a_start.real();
    x0.tail(nr) = a_start.imag();
    const ConicResult sol = solve_conic(prob, 1e-10, 400, &x0);
    if (sol.status == SolveStatus::kInfeasible)
      throw std::runtime_error("sca_refine_receive: subproblem infeasible");

    VectorXcd a_new(nr);
    for (int i = 0; i < nr; ++i) a_new[i] = cplx(sol.x[i], sol.x[nr + i]);
    // guard: keep the previous iterate if numerics ever degrade it
    if (a_new.squaredNorm() > a.squaredNorm() ||
        min_effective_gain(a_new, hbar) < 1.0 - 1e-6)
      return a;
    const double step = (a_new - a).squaredNorm();
    a = a_new;
    if (step < eps) break;
  }
  return a;
}

// Receiving control entry point: closed form when nr = 1, otherwise the
// relaxation plus refinement pipeline.
inline VectorXcd optimize_receive(const std::vector<VectorXcd>& hbar,
                                  double eps = 1e-8, int max_iters = 50,
                                  std::uint64_t seed = 0) {
  const SdrReceiveResult sdr = sdr_receive_vector(hbar, 1e-9, 200, seed);
  if (hbar[0].size() == 1) return sdr.a_candidate;
  return sca_refine_receive(sdr.a_candidate, hbar, eps, max_iters);
}

}  // namespace airfl

#endif  // AIRFL_RECEIVE_HPP_

#ifndef AIRFL_CONIC_HPP_
#define AIRFL_CONIC_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace airfl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// minimize  q'x + (1/2) x' diag(quad_diag) x
// s.t.      G x <= h                    (affine rows)
//           x_i^2 + x_j^2 <= 1         (one disc per complex entry)
//
// Complex decision variables are always split into (Re, Im) pairs by the
// caller; a disc constraint references the two real coordinates of one pair.
struct ConicProblem {
  int n = 0;
  VectorXd q;
  VectorXd quad_diag;  // empty means zero
  MatrixXd G;          // may have zero rows
  VectorXd h;
  std::vector<std::pair<int, int>> discs;
};

enum class SolveStatus { kOptimal, kInfeasible, kIterationLimit };

struct ConicResult {
  VectorXd x;
  SolveStatus status = SolveStatus::kIterationLimit;
  double objective = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  int newton_steps = 0;
};

namespace detail {

inline double conic_objective(const ConicProblem& p, const VectorXd& x) {
  double f = p.q.dot(x);
  if (p.quad_diag.size() > 0) f += 0.5 * x.dot(p.quad_diag.cwiseProduct(x));
  return f;
}

// Slacks of all constraints; returns the smallest.
inline double min_slack(const ConicProblem& p, const VectorXd& x, VectorXd* aff_slack) {
  double ms = std::numeric_limits<double>::infinity();
  if (p.G.rows() > 0) {
    *aff_slack = p.h - p.G * x;
    if (aff_slack->size() > 0) ms = aff_slack->minCoeff();
  } else {
    aff_slack->resize(0);
  }
  for (const auto& [i, j] : p.discs)
    ms = std::min(ms, 1.0 - x[i] * x[i] - x[j] * x[j]);
  return ms;
}

// Value of t*f(x) + barrier(x); +inf outside the strictly feasible set.
inline double center_value(const ConicProblem& p, const VectorXd& x, double t) {
  VectorXd s;
  double val = t * conic_objective(p, x);
  if (p.G.rows() > 0) {
    s = p.h - p.G * x;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] <= 0.0) return std::numeric_limits<double>::infinity();
      val -= std::log(s[i]);
    }
  }
  for (const auto& [i, j] : p.discs) {
    const double c = 1.0 - x[i] * x[i] - x[j] * x[j];
    if (c <= 0.0) return std::numeric_limits<double>::infinity();
    val -= std::log(c);
  }
  return val;
}

// Newton minimization of t*f + barrier from a strictly feasible start.
// Returns the number of Newton steps taken.
inline int center(const ConicProblem& p, VectorXd& x, double t, int max_steps) {
  const int n = p.n;
  const int m_aff = static_cast<int>(p.G.rows());

  // with disjoint disc pairs the Hessian is a 2x2 block diagonal plus one
  // rank-one term per affine row; when the rows are few and the problem is
  // large the Newton direction comes from the Woodbury identity in O(n m^2)
  // instead of a dense O(n^3) factorization
  bool discs_disjoint = true;
  {
    std::vector<char> used(n, 0);
    for (const auto& [i, j] : p.discs) {
      if (used[i] || used[j]) {
        discs_disjoint = false;
        break;
      }
      used[i] = used[j] = 1;
    }
  }
  const bool fast = discs_disjoint && n >= 32 && 4 * m_aff < n;

  MatrixXd H;
  if (!fast) H.resize(n, n);
  VectorXd g(n);
  for (int step = 0; step < max_steps; ++step) {
    g = t * p.q;
    if (p.quad_diag.size() > 0) g += t * p.quad_diag.cwiseProduct(x);

    VectorXd dx;
    if (fast) {
      VectorXd dd = VectorXd::Zero(n);
      if (p.quad_diag.size() > 0) dd = t * p.quad_diag;
      std::vector<double> off(p.discs.size());
      MatrixXd B(n, m_aff);
      if (m_aff > 0) {
        const VectorXd s = p.h - p.G * x;
        for (int i = 0; i < m_aff; ++i) {
          B.col(i) = p.G.row(i).transpose() / s[i];
          g += B.col(i);
        }
      }
      for (std::size_t d = 0; d < p.discs.size(); ++d) {
        const auto& [i, j] = p.discs[d];
        const double xi = x[i], xj = x[j];
        const double c = 1.0 - xi * xi - xj * xj;
        g[i] += 2.0 * xi / c;
        g[j] += 2.0 * xj / c;
        const double a = 2.0 / c;
        const double b = 4.0 / (c * c);
        dd[i] += a + b * xi * xi;
        dd[j] += a + b * xj * xj;
        off[d] = b * xi * xj;
      }
      // ridge keeps coordinates touched only by affine rows invertible
      const double ridge = 1e-12 * (1.0 + dd.cwiseAbs().maxCoeff());
      dd.array() += ridge;

      auto block_solve = [&](const VectorXd& r) {
        VectorXd z = r.cwiseQuotient(dd);
        for (std::size_t d = 0; d < p.discs.size(); ++d) {
          const auto& [i, j] = p.discs[d];
          const double det = dd[i] * dd[j] - off[d] * off[d];
          z[i] = (dd[j] * r[i] - off[d] * r[j]) / det;
          z[j] = (dd[i] * r[j] - off[d] * r[i]) / det;
        }
        return z;
      };

      const VectorXd dg = block_solve(g);
      if (m_aff > 0) {
        MatrixXd W(n, m_aff);
        for (int i = 0; i < m_aff; ++i) W.col(i) = block_solve(B.col(i));
        MatrixXd Mid = MatrixXd::Identity(m_aff, m_aff);
        Mid.noalias() += B.transpose() * W;
        dx = -dg + W * Mid.ldlt().solve(W.transpose() * g);
      } else {
        dx = -dg;
      }
    } else {
      H.setZero();
      if (p.quad_diag.size() > 0) H.diagonal() = t * p.quad_diag;
      if (m_aff > 0) {
        VectorXd s = p.h - p.G * x;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
          const VectorXd gi = p.G.row(i).transpose();
          g += gi / s[i];
          H.noalias() += (gi * gi.transpose()) / (s[i] * s[i]);
        }
      }
      for (const auto& [i, j] : p.discs) {
        const double xi = x[i], xj = x[j];
        const double c = 1.0 - xi * xi - xj * xj;
        g[i] += 2.0 * xi / c;
        g[j] += 2.0 * xj / c;
        const double a = 2.0 / c;
        const double b = 4.0 / (c * c);
        H(i, i) += a + b * xi * xi;
        H(j, j) += a + b * xj * xj;
        H(i, j) += b * xi * xj;
        H(j, i) += b * xi * xj;
      }

      Eigen::LLT<MatrixXd> llt(H);
      if (llt.info() == Eigen::Success) {
        dx = llt.solve(-g);
      } else {
        // singular Hessian (free directions); regularize mildly
        MatrixXd Hr = H;
        const double ridge = 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
        Hr.diagonal().array() += ridge;
        dx = Hr.ldlt().solve(-g);
      }
    }

    const double lambda2 = -g.dot(dx);
    if (!(lambda2 > 0.0) || lambda2 * 0.5 < 1e-11) return step;

    // backtracking line search; the acceptance test carries a relative
    // roundoff allowance so the search cannot stall once the decrement
    // drops below the resolution of the objective at large t
    const double f0 = center_value(p, x, t);
    const double fuzz = 1e-12 * (std::abs(f0) + 1.0);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const VectorXd xn = x + alpha * dx;
      const double fn = center_value(p, xn, t);
      if (fn <= f0 - 1e-4 * alpha * lambda2 + fuzz) {
        x = xn;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) return step;  // no acceptable step length
  }
  return max_steps;
}

}  // namespace detail

// Finds a strictly feasible point by minimizing the worst violation.
// Returns nullopt when the problem is (numerically) infeasible.
inline std::optional<VectorXd> conic_phase1(const ConicProblem& p, int max_iters = 200) {
  // augmented problem over (x, s): minimize s with every constraint slacked
  // by s, i.e. g_i'x - h_i <= s and x_i^2 + x_j^2 - 1 <= s
  const int m_aff = static_cast<int>(p.G.rows());
  const int m_disc = static_cast<int>(p.discs.size());
  VectorXd x = VectorXd::Zero(p.n);
  VectorXd aff_slack;
  double viol = -detail::min_slack(p, x, &aff_slack);
  if (viol < -1e-9) return x;  // already strictly feasible at the origin

  double s = viol + 1.0;
  // barrier on: h_i - g_i'x + s > 0 and 1 + s - x_i^2 - x_j^2 > 0, minimize s
  const int n = p.n;
  double t = 1.0;
  const double nu = static_cast<double>(m_aff + 2 * m_disc + 1);
  MatrixXd H(n + 1, n + 1);
  VectorXd g(n + 1);
  for (int outer = 0; outer < 60; ++outer) {
    for (int step = 0; step < max_iters; ++step) {
      g.setZero();
      H.setZero();
      g[n] = t;
      for (int i = 0; i < m_aff; ++i) {
        const double si = p.h[i] - p.G.row(i).dot(x) + s;
        VectorXd gi(n + 1);
        gi.head(n) = p.G.row(i).transpose();
        gi[n] = -1.0;
        g += gi / si;
        H.noalias() += (gi * gi.transpose()) / (si * si);
      }
      for (const auto& [i, j] : p.discs) {
        const double c = 1.0 + s - x[i] * x[i] - x[j] * x[j];
        VectorXd gi = VectorXd::Zero(n + 1);
        gi[i] = 2.0 * x[i];
        gi[j] = 2.0 * x[j];
        gi[n] = -1.0;
        g += gi / c;
        H.noalias() += (gi * gi.transpose()) / (c * c);
        H(i, i) += 2.0 / c;
        H(j, j) += 2.0 / c;
      }
      MatrixXd Hr = H;
      Hr.diagonal().array() += 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      const VectorXd dx = Hr.ldlt().solve(-g);
      const double lambda2 = -g.dot(dx);
      if (!(lambda2 > 0.0) || lambda2 * 0.5 < 1e-10) break;
      double alpha = 1.0;
      auto value = [&](const VectorXd& xc, double sc) {
        double val = t * sc;
        for (int i = 0; i < m_aff; ++i) {
          const double si = p.h[i] - p.G.row(i).dot(xc) + sc;
          if (si <= 0.0) return std::numeric_limits<double>::infinity();
          val -= std::log(si);
        }
        for (const auto& [i, j] : p.discs) {
          const double c = 1.0 + sc - xc[i] * xc[i] - xc[j] * xc[j];
          if (c <= 0.0) return std::numeric_limits<double>::infinity();
          val -= std::log(c);
        }
        return val;
      };
      const double f0 = value(x, s);
      for (int ls = 0; ls < 60; ++ls) {
        const VectorXd xn = x + alpha * dx.head(n);
        const double sn = s + alpha * dx[n];
        if (value(xn, sn) < f0 - 1e-4 * alpha * lambda2) {
          x = xn;
          s = sn;
          break;
        }
        alpha *= 0.5;
      }
      VectorXd tmp;
      if (-detail::min_slack(p, x, &tmp) < -1e-9) return x;  // strictly feasible
    }
    if (s - nu / t > 1e-10) return std::nullopt;  // certified infeasible
    if (nu / t < 1e-12) break;
    t *= 10.0;
  }
  VectorXd tmp;
  if (-detail::min_slack(p, x, &tmp) < 0.0) return x;
  return std::nullopt;
}

// Barrier-method solve. An optional strictly feasible start skips phase one.
inline ConicResult solve_conic(const ConicProblem& p, double tol = 1e-8,
                               int max_iters = 400, const VectorXd* x0 = nullptr) {
  if (p.q.size() != p.n || (p.quad_diag.size() > 0 && p.quad_diag.size() != p.n) ||
      p.G.rows() != p.h.size() || (p.G.rows() > 0 && p.G.cols() != p.n))
    throw std::invalid_argument("solve_conic: inconsistent dimensions");
  for (const auto& [i, j] : p.discs)
    if (i < 0 || j < 0 || i >= p.n || j >= p.n || i == j)
      throw std::invalid_argument("solve_conic: bad disc indices");

  ConicResult res;
  VectorXd x;
  VectorXd aff_slack;
  if (x0 != nullptr && x0->size() == p.n &&
      detail::min_slack(p, *x0, &aff_slack) > 0.0) {
    x = *x0;
  } else {
    auto ph1 = conic_phase1(p);
    if (!ph1) {
      res.status = SolveStatus::kInfeasible;
      return res;
    }
    x = *ph1;
    if (detail::min_slack(p, x, &aff_slack) <= 0.0) {
      res.status = SolveStatus::kInfeasible;
      return res;
    }
  }

  const double nu =
      static_cast<double>(p.G.rows()) + 2.0 * static_cast<double>(p.discs.size());
  if (nu == 0.0) {
    // unconstrained: require a positive definite quadratic
    if (p.quad_diag.size() == 0 || p.quad_diag.minCoeff() <= 0.0)
      throw std::invalid_argument("solve_conic: unconstrained problem needs positive quad");
    res.x = -p.q.cwiseQuotient(p.quad_diag);
    res.objective = detail::conic_objective(p, res.x);
    res.gap = 0.0;
    res.status = SolveStatus::kOptimal;
    return res;
  }

  double t = 1.0;
  int steps_used = 0;
  while (true) {
    steps_used += detail::center(p, x, t, max_iters);
    res.x = x;
    res.objective = detail::conic_objective(p, x);
    res.gap = nu / t;
    res.newton_steps = steps_used;
    if (res.gap <= tol) {
      res.status = SolveStatus::kOptimal;
      return res;
    }
    if (steps_used >= 50 * max_iters) {
      res.status = SolveStatus::kIterationLimit;
      return res;
    }
    t *= 20.0;
  }
}

}  // namespace airfl

#endif  // AIRFL_CONIC_HPP_

// SPDX-License-Identifier: Apache-2.0
//
// Dense solver for: maximize 1/2 x^T P x + q^T x + r  (P negative
// semidefinite) subject to convex quadratic constraints
// 1/2 x^T A_c x + b_c^T x + c_c <= 0. Log-barrier interior point with damped
// Newton steps, followed by an active-set KKT polish. Sized for a few
// thousand variables and a handful of constraints.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "fasisac/types.hpp"

namespace fasisac {

/// 1/2 x^T A x + b^T x + c. A symmetric; an empty A means a linear form.
struct QuadForm {
  Mat a;
  Vec b;
  double c = 0.0;

  double eval(const Vec& x) const {
    double v = b.dot(x) + c;
    if (a.size() > 0) v += 0.5 * x.dot(a * x);
    return v;
  }
  Vec grad(const Vec& x) const {
    if (a.size() > 0) return a * x + b;
    return b;
  }
};

enum class QcqpStatus { Converged, MaxIterations, Infeasible };

struct QcqpResult {
  Vec x;
  double objective = 0.0;     // original-scale objective at x
  double kkt_residual = 0.0;  // scaled-space stationarity + complementarity
  int newton_steps = 0;
  QcqpStatus status = QcqpStatus::Converged;
  Vec multipliers;  // one per constraint, original scaling
};

namespace detail {

inline double form_scale(const QuadForm& f) {
  double s = std::abs(f.c);
  if (f.b.size() > 0) s = std::max(s, f.b.cwiseAbs().maxCoeff());
  if (f.a.size() > 0) s = std::max(s, f.a.cwiseAbs().maxCoeff());
  return s > 0.0 ? s : 1.0;
}

inline QuadForm scaled(const QuadForm& f, double s) {
  QuadForm g;
  if (f.a.size() > 0) g.a = f.a / s;
  g.b = f.b / s;
  g.c = f.c / s;
  return g;
}

struct BarrierState {
  double value = 0.0;
  bool feasible = false;
};

inline BarrierState barrier_value(const QuadForm& obj,
                                  const std::vector<QuadForm>& cons, double t,
                                  const Vec& x) {
  BarrierState st;
  double v = -t * obj.eval(x);
  for (const QuadForm& g : cons) {
    const double gv = g.eval(x);
    if (gv >= 0.0) return st;  // infeasible
    v -= std::log(-gv);
  }
  st.value = v;
  st.feasible = true;
  return st;
}

}  // namespace detail

/// Interior-point maximization. x0 must be strictly feasible; tol bounds the
/// final duality measure (constraints-count / barrier parameter) in the
/// scaled problem.
inline QcqpResult maximize_qcqp(const QuadForm& objective,
                                const std::vector<QuadForm>& constraints,
                                const Vec& x0, double tol, bool polish = true,
                                int max_newton = 2000) {
  using namespace detail;
  const int n = static_cast<int>(x0.size());
  const int m = static_cast<int>(constraints.size());

  const double obj_scale = form_scale(objective);
  QuadForm obj = scaled(objective, obj_scale);
  std::vector<QuadForm> cons;
  std::vector<double> con_scale(m);
  cons.reserve(m);
  for (int c = 0; c < m; ++c) {
    con_scale[c] = form_scale(constraints[c]);
    cons.push_back(scaled(constraints[c], con_scale[c]));
  }

  QcqpResult res;
  res.x = x0;
  res.multipliers = Vec::Zero(m);

  for (const QuadForm& g : cons) {
    if (g.eval(x0) >= -1e-14) {
      res.status = QcqpStatus::Infeasible;
      res.objective = objective.eval(x0);
      res.kkt_residual = std::numeric_limits<double>::infinity();
      return res;
    }
  }

  Vec x = x0;
  double t = 1.0;
  const double mu = 30.0;
  int steps = 0;
  bool hit_cap = false;

  // Callers always pass at least the power ball; without constraints there
  // is nothing to center on.
  if (m == 0) {
    res.objective = objective.eval(x);
    return res;
  }

  const double t_final = m / std::max(tol, 1e-14);
  while (true) {
    // Newton centering for the current t.
    for (int it = 0; it < 200; ++it) {
      if (steps >= max_newton) {
        hit_cap = true;
        break;
      }
      Vec grad = Vec::Zero(n);
      Mat hess = Mat::Zero(n, n);
      if (obj.a.size() > 0) {
        grad.noalias() -= t * (obj.a * x);
        hess.noalias() -= t * obj.a;
      }
      grad.noalias() -= t * obj.b;
      for (const QuadForm& g : cons) {
        const double s = -g.eval(x);
        const Vec gg = g.grad(x);
        grad.noalias() += gg / s;
        hess.noalias() += (gg * gg.transpose()) / (s * s);
        if (g.a.size() > 0) hess.noalias() += g.a / s;
      }
      hess.diagonal().array() += 1e-13 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      Eigen::LDLT<Mat> ldlt(hess);
      Vec dx = ldlt.solve(-grad);
      const double decrement_sq = -grad.dot(dx);
      if (!(decrement_sq > 0.0)) break;
      if (decrement_sq * 0.5 < 1e-11) break;

      // Backtracking line search, staying strictly feasible.
      const BarrierState cur = barrier_value(obj, cons, t, x);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 70; ++ls) {
        const Vec xn = x + alpha * dx;
        const BarrierState nxt = barrier_value(obj, cons, t, xn);
        if (nxt.feasible &&
            nxt.value <= cur.value - 0.01 * alpha * decrement_sq) {
          x = xn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++steps;
      if (!moved) break;
    }
    if (hit_cap || t >= t_final) break;
    t = std::min(t * mu, t_final);
  }

  // Barrier multiplier estimates (scaled problem).
  Vec lam(m);
  for (int c = 0; c < m; ++c) lam(c) = 1.0 / (t * std::max(-cons[c].eval(x), 1e-300));

  // Active-set KKT polish: Newton on stationarity + active equalities.
  if (polish && !hit_cap) {
    std::vector<int> active;
    for (int c = 0; c < m; ++c)
      if (lam(c) > 1e-8 || -cons[c].eval(x) < 1e-8) active.push_back(c);
    if (!active.empty()) {
      const int na = static_cast<int>(active.size());
      Vec xp = x;
      Vec lp(na);
      for (int i = 0; i < na; ++i) lp(i) = lam(active[i]);
      bool ok = true;
      for (int it = 0; it < 30 && ok; ++it) {
        Vec r1 = obj.grad(xp);
        Mat h = Mat::Zero(n, n);
        if (obj.a.size() > 0) h = obj.a;
        Mat gmat(n, na);
        Vec r2(na);
        for (int i = 0; i < na; ++i) {
          const QuadForm& g = cons[active[i]];
          gmat.col(i) = g.grad(xp);
          r1.noalias() -= lp(i) * gmat.col(i);
          if (g.a.size() > 0) h.noalias() -= lp(i) * g.a;
          r2(i) = -g.eval(xp);
        }
        const double rnorm = std::max(r1.cwiseAbs().maxCoeff(),
                                      na ? r2.cwiseAbs().maxCoeff() : 0.0);
        if (rnorm < 1e-14) break;
        Mat kkt = Mat::Zero(n + na, n + na);
        kkt.topLeftCorner(n, n) = h;
        kkt.topRightCorner(n, na) = -gmat;
        kkt.bottomLeftCorner(na, n) = gmat.transpose();
        Vec rhs(n + na);
        rhs.head(n) = -r1;
        rhs.tail(na) = r2;
        Eigen::FullPivLU<Mat> lu(kkt);
        if (!lu.isInvertible()) {
          ok = false;
          break;
        }
        Vec d = lu.solve(rhs);
        xp += d.head(n);
        lp += d.tail(na);
      }
      // Accept only if the polished point stays feasible with nonnegative
      // multipliers and does not lose objective.
      if (ok) {
        bool feas = true;
        for (int c = 0; c < m; ++c)
          if (cons[c].eval(xp) > 1e-10) feas = false;
        for (int i = 0; i < na; ++i)
          if (lp(i) < -1e-9) feas = false;
        if (feas && obj.eval(xp) >= obj.eval(x) - 1e-12 * (1.0 + std::abs(obj.eval(x)))) {
          x = xp;
          lam.setZero();
          for (int i = 0; i < na; ++i) lam(active[i]) = std::max(lp(i), 0.0);
        }
      }
    }
  }

  // KKT residual in the scaled problem.
  Vec stat = obj.grad(x);
  double comp = 0.0, viol = 0.0;
  for (int c = 0; c < m; ++c) {
    const double gv = cons[c].eval(x);
    stat.noalias() -= lam(c) * cons[c].grad(x);
    comp = std::max(comp, std::abs(lam(c) * gv));
    viol = std::max(viol, gv);
  }
  const double gnorm = std::max(1.0, obj.grad(x).cwiseAbs().maxCoeff());
  res.x = x;
  res.objective = objective.eval(x);
  res.kkt_residual =
      std::max({stat.cwiseAbs().maxCoeff() / gnorm, comp, std::max(viol, 0.0)});
  res.newton_steps = steps;
  res.status = hit_cap ? QcqpStatus::MaxIterations : QcqpStatus::Converged;
  for (int c = 0; c < m; ++c)
    res.multipliers(c) = lam(c) * obj_scale / con_scale[c];
  return res;
}

}  // namespace fasisac

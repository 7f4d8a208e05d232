// SPDX-License-Identifier: Apache-2.0
//
// Receive-antenna position optimization: per-antenna objective q(r_n), its
// analytic gradient, the Lipschitz majorizer delta_n, the closed-form
// unconstrained step, and the constrained 2-D QP fallback solved by exact
// active-set enumeration.

#pragma once

#include "fasisac/model.hpp"
#include "fasisac/qcqp.hpp"

namespace fasisac {

/// Coefficients of the position surrogate, frozen at the expansion point.
struct QCoefficients {
  CVec b;         // per-antenna entries b_n of the row vector b
  Vec p;          // p_i = a_t^T(theta_i, phi_i) W W^H a_t^*(theta_i, phi_i)
  CMat e;         // E = J_v^{-1} A_v W W^H A_v^H J_v^{-1}, Hermitian PSD
  Vec alpha_sq;   // |alpha_i|^2
  Positions r_v;  // expansion positions

  // Problem constants needed to evaluate q and the full surrogate.
  double lambda = 0.0;
  double target_el = 0.0, target_az = 0.0;
  Vec clutter_el, clutter_az;
  double alpha0_sq = 0.0;
  double sigma0_sq = 0.0;
};

inline QCoefficients q_coefficients(const Precoder& w, const Positions& pos_v,
                                    const Scenario& sc,
                                    const ArrayGeometry& geom) {
  QCoefficients qc;
  qc.r_v = pos_v;
  qc.lambda = geom.lambda;
  qc.target_el = sc.target_el;
  qc.target_az = sc.target_az;
  qc.clutter_el = sc.clutter_el;
  qc.clutter_az = sc.clutter_az;
  qc.alpha0_sq = std::norm(sc.target_gain);
  qc.sigma0_sq = sc.noise_radar;
  qc.alpha_sq = sc.clutter_gain.array().abs2();

  const ClutterKernel kernel(w, pos_v, sc, geom);
  const CMat a_v = effective_matrix(sc.target_el, sc.target_az, pos_v, geom);
  const CMat f = kernel.solve(a_v * w);  // J_v^{-1} A_v W, N x K
  qc.e = f * f.adjoint();

  const CVec at0 = transmit_steering(sc.target_el, sc.target_az, geom);
  // b = a_t^T W W^H A_v^H J_v^{-1} = (a_t^T W) F^H; stored entrywise.
  const Eigen::RowVectorXcd b_row = (at0.transpose() * w) * f.adjoint();
  qc.b = b_row.transpose();
  qc.p = Vec(sc.num_clutter());
  for (int i = 0; i < sc.num_clutter(); ++i) {
    const CVec at = transmit_steering(sc.clutter_el(i), sc.clutter_az(i), geom);
    qc.p(i) = (w.adjoint() * at.conjugate()).squaredNorm();
  }
  return qc;
}

/// q(r_n) with the other antennas fixed: the r_n-dependent slice of the
/// expanded surrogate, constants (E_nn diagonal term) included as printed.
inline double q_single(const Vec2& r, int n, const QCoefficients& qc,
                       const Positions& others) {
  const double k0 = 2.0 * kPi / qc.lambda;
  double v = 2.0 * std::abs(qc.b(n)) *
             std::cos(std::arg(qc.b(n)) +
                      k0 * path_difference(r, qc.target_el, qc.target_az));
  for (int i = 0; i < qc.p.size(); ++i) {
    double inner = qc.e(n, n).real();
    for (int l = 0; l < others.count(); ++l) {
      if (l == n) continue;
      const cplx e_ln = qc.e(l, n);
      const double phase =
          std::arg(e_ln) +
          k0 * (path_difference(r, qc.clutter_el(i), qc.clutter_az(i)) -
                path_difference(others.at(l), qc.clutter_el(i), qc.clutter_az(i)));
      inner += 2.0 * std::abs(e_ln) * std::cos(phase);
    }
    v -= qc.alpha_sq(i) * qc.p(i) * inner;
  }
  return v;
}

/// Analytic gradient of q_single in r_n.
inline Vec2 q_gradient(const Vec2& r, int n, const QCoefficients& qc,
                       const Positions& others) {
  const double k0 = 2.0 * kPi / qc.lambda;
  Vec2 g = -2.0 * k0 * std::abs(qc.b(n)) *
           std::sin(std::arg(qc.b(n)) +
                    k0 * path_difference(r, qc.target_el, qc.target_az)) *
           path_difference_gradient(qc.target_el, qc.target_az);
  for (int i = 0; i < qc.p.size(); ++i) {
    const Vec2 dir =
        path_difference_gradient(qc.clutter_el(i), qc.clutter_az(i));
    double coeff = 0.0;
    for (int l = 0; l < others.count(); ++l) {
      if (l == n) continue;
      const cplx e_ln = qc.e(l, n);
      const double phase =
          std::arg(e_ln) +
          k0 * (path_difference(r, qc.clutter_el(i), qc.clutter_az(i)) -
                path_difference(others.at(l), qc.clutter_el(i), qc.clutter_az(i)));
      coeff += 2.0 * std::abs(e_ln) * std::sin(phase);
    }
    g += qc.alpha_sq(i) * qc.p(i) * k0 * coeff * dir;
  }
  return g;
}

/// Curvature bound delta_n with delta_n I >= -Hessian(q) and delta_n I >=
/// Hessian(q) elementwise in the spectral sense.
inline double lipschitz_delta(int n, const QCoefficients& qc) {
  double sum = std::abs(qc.b(n));
  for (int i = 0; i < qc.p.size(); ++i) {
    double row = 0.0;
    for (int l = 0; l < qc.e.rows(); ++l)
      if (l != n) row += std::abs(qc.e(l, n));
    sum += qc.alpha_sq(i) * qc.p(i) * row;
  }
  return 16.0 * kPi * kPi / (qc.lambda * qc.lambda) * sum;
}

/// Maximizer of the proximal quadratic surrogate, constraints ignored.
inline Vec2 unconstrained_update(const Vec2& r_nc, const Vec2& grad,
                                 double delta) {
  if (!(delta > 1e-300))
    throw std::invalid_argument("degenerate delta: q is constant in r_n");
  return r_nc + grad / delta;
}

/// Constrained step: Euclidean projection of the unconstrained optimum onto
/// the box [0,A]^2 intersected with the linearized min-distance half-planes.
/// Exact active-set enumeration over 0/1/2 active constraints.
inline Vec2 constrained_update(const Vec2& r_nc, const Vec2& grad, double delta,
                               int n, const Positions& others,
                               const ArrayGeometry& geom) {
  if (!(delta > 1e-300))
    throw std::invalid_argument("degenerate delta: q is constant in r_n");
  const Vec2 target = r_nc + grad / delta;

  // Half-planes a^T r <= b.
  std::vector<Vec2> a;
  std::vector<double> bb;
  a.push_back(Vec2(-1, 0));  bb.push_back(0.0);
  a.push_back(Vec2(1, 0));   bb.push_back(geom.region);
  a.push_back(Vec2(0, -1));  bb.push_back(0.0);
  a.push_back(Vec2(0, 1));   bb.push_back(geom.region);
  for (int l = 0; l < others.count(); ++l) {
    if (l == n) continue;
    const Vec2 diff = r_nc - others.at(l);
    const double dist = diff.norm();
    if (dist <= 0.0)
      throw std::runtime_error("expansion point coincides with another antenna");
    const Vec2 u = diff / dist;
    // u^T (r - r_l) >= D  =>  (-u)^T r <= -(D + u^T r_l)
    a.push_back(-u);
    bb.push_back(-(geom.min_dist + u.dot(others.at(l))));
  }

  const int mcons = static_cast<int>(a.size());
  const auto feasible = [&](const Vec2& r) {
    for (int c = 0; c < mcons; ++c)
      if (a[c].dot(r) > bb[c] + 1e-12 * (1.0 + std::abs(bb[c]))) return false;
    return true;
  };

  Vec2 best = r_nc;  // r_nc is feasible by the caller's precondition
  double best_d = (r_nc - target).squaredNorm();
  const auto consider = [&](const Vec2& r) {
    const double d = (r - target).squaredNorm();
    if (feasible(r) && d < best_d) {
      best = r;
      best_d = d;
    }
  };

  consider(target);
  for (int c = 0; c < mcons; ++c) {
    const double denom = a[c].squaredNorm();
    consider(target - (a[c].dot(target) - bb[c]) / denom * a[c]);
  }
  for (int c1 = 0; c1 < mcons; ++c1)
    for (int c2 = c1 + 1; c2 < mcons; ++c2) {
      const double det = a[c1].x() * a[c2].y() - a[c1].y() * a[c2].x();
      if (std::abs(det) < 1e-14) continue;
      const Vec2 r((bb[c1] * a[c2].y() - bb[c2] * a[c1].y()) / det,
                   (a[c1].x() * bb[c2] - a[c2].x() * bb[c1]) / det);
      consider(r);
    }
  return best;
}

/// Full surrogate value at arbitrary positions, used by tests and to steer
/// the outer loop. Includes the |alpha_0|^2 factor.
inline double surrogate_position_objective(const Positions& pos,
                                           const QCoefficients& qc) {
  const CVec ar0 = receive_steering(qc.target_el, qc.target_az, pos, qc.lambda);
  double v = 2.0 * (qc.b.transpose() * ar0)(0).real();
  for (int i = 0; i < qc.p.size(); ++i) {
    const CVec ar =
        receive_steering(qc.clutter_el(i), qc.clutter_az(i), pos, qc.lambda);
    v -= qc.alpha_sq(i) * qc.p(i) * (ar.adjoint() * qc.e * ar)(0).real();
  }
  v -= qc.sigma0_sq * qc.e.real().trace();
  return qc.alpha0_sq * v;
}

struct PositionOptions {
  double eps_outer = 1e-4;
  double eps_inner = 1e-4;
  int max_outer = 100;
  int max_inner = 200;
  bool relative_eps = true;  // thresholds scale with the running value
  // Compass (pattern) refinement of the true SCNR after each MM sweep. The
  // proximal step length grad/delta collapses when the clutter power exceeds
  // the noise floor by many orders (delta grows with the filter power while
  // the minorant stays pinned below the objective), so the surrogate alone
  // cannot move the antennas at realistic noise floors.
  bool compass = true;
  double compass_step = 0.5;      // initial step, in wavelengths
  double compass_step_min = 1e-2; // final step, in wavelengths
  int compass_max_moves = 400;    // accepted moves per outer iteration
};

struct PositionTrace {
  std::vector<double> scnr;  // per outer v-iteration (after the sweep)
  QcqpStatus status = QcqpStatus::Converged;
};

/// Monotone per-antenna compass search on the true SCNR: axis and diagonal
/// moves with a halving step ladder, accepting only feasible strict
/// improvements. Deterministic; returns the improved SCNR.
inline double compass_refine(const Precoder& w, Positions& pos,
                             const Scenario& sc, const ArrayGeometry& geom,
                             double current, const PositionOptions& opt) {
  static const double kDirs[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                     {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  double step = opt.compass_step * geom.lambda;
  const double step_min = opt.compass_step_min * geom.lambda;
  int moves = 0;
  while (step >= step_min && moves < opt.compass_max_moves) {
    bool moved = false;
    for (int n = 0; n < pos.count() && moves < opt.compass_max_moves; ++n) {
      for (const auto& d : kDirs) {
        const double scale = (d[0] != 0 && d[1] != 0) ? inv_sqrt2 : 1.0;
        Positions probe = pos;
        probe.xy(0, n) += step * d[0] * scale;
        probe.xy(1, n) += step * d[1] * scale;
        if (!probe.feasible(geom)) continue;
        const double value = scnr(w, probe, sc, geom);
        if (value > current * (1.0 + 1e-12)) {
          pos = probe;
          current = value;
          moved = true;
          ++moves;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return current;
}

/// Position block: outer MM re-expansion, inner per-antenna proximal MM
/// sweeps in fixed index order, then compass refinement.
inline std::pair<Positions, PositionTrace> optimize_positions(
    const Precoder& w, const Positions& pos_init, const Scenario& sc,
    const ArrayGeometry& geom, const PositionOptions& opt = {}) {
  Positions pos = pos_init;
  PositionTrace trace;
  trace.status = QcqpStatus::MaxIterations;
  double current = scnr(w, pos, sc, geom);

  for (int v = 0; v < opt.max_outer; ++v) {
    const Positions before = pos;
    const QCoefficients qc = q_coefficients(w, pos, sc, geom);
    for (int n = 0; n < pos.count(); ++n) {
      const double delta = lipschitz_delta(n, qc);
      if (delta <= 1e-300) continue;  // q constant in r_n: keep it in place
      double q_cur = q_single(pos.at(n), n, qc, pos);
      for (int c = 0; c < opt.max_inner; ++c) {
        const Vec2 r_c = pos.at(n);
        const Vec2 grad = q_gradient(r_c, n, qc, pos);
        Vec2 cand = unconstrained_update(r_c, grad, delta);
        Positions probe = pos;
        probe.xy.col(n) = cand;
        if (!probe.feasible(geom))
          cand = constrained_update(r_c, grad, delta, n, pos, geom);
        const double q_new = q_single(cand, n, qc, pos);
        if (q_new >= q_cur) pos.xy.col(n) = cand;
        const double gain = q_new - q_cur;
        q_cur = std::max(q_new, q_cur);
        const double inner_threshold =
            opt.relative_eps ? opt.eps_inner * std::max(1.0, std::abs(q_cur))
                             : opt.eps_inner;
        if (gain < inner_threshold) break;
      }
    }
    double next = scnr(w, pos, sc, geom);
    if (next < current) {  // revert round-off dips
      pos = before;
      next = current;
    }
    if (opt.compass) next = compass_refine(w, pos, sc, geom, next, opt);
    trace.scnr.push_back(std::max(next, current));
    const double outer_threshold =
        opt.relative_eps ? opt.eps_outer * std::max(1.0, std::abs(next))
                         : opt.eps_outer;
    if (next - current < outer_threshold) {
      trace.status = QcqpStatus::Converged;
      break;
    }
    current = next;
  }
  return {pos, trace};
}

}  // namespace fasisac

// SPDX-License-Identifier: Apache-2.0
//
// Inner MM loop over the transmit precoder: concave surrogate of the SCNR,
// linearized SINR constraints, and the convex QCQP subproblem.

#pragma once

#include <optional>

#include "fasisac/model.hpp"
#include "fasisac/qcqp.hpp"

namespace fasisac {

// ---------------------------------------------------------------------------
// Complex <-> real lifting. Convention: the real vector interleaves re/im,
// x[2*(col*M + row)] = Re W(row,col), x[2*(col*M + row)+1] = Im W(row,col).
// ---------------------------------------------------------------------------

inline Vec realify(const CMat& w) {
  Vec x(2 * w.size());
  const cplx* p = w.data();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    x(2 * i) = p[i].real();
    x(2 * i + 1) = p[i].imag();
  }
  return x;
}

inline CMat complexify(const Vec& x, int rows, int cols) {
  CMat w(rows, cols);
  cplx* p = w.data();
  for (Eigen::Index i = 0; i < w.size(); ++i)
    p[i] = cplx(x(2 * i), x(2 * i + 1));
  return w;
}

/// Real symmetric matrix R with z^H Q z = x^T R x for Hermitian Q.
inline Mat realify_hermitian(const CMat& q) {
  const int m = static_cast<int>(q.rows());
  Mat r(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double re = q(i, j).real();
      const double im = q(i, j).imag();
      r(2 * i, 2 * j) = re;
      r(2 * i, 2 * j + 1) = -im;
      r(2 * i + 1, 2 * j) = im;
      r(2 * i + 1, 2 * j + 1) = re;
    }
  return 0.5 * (r + r.transpose());
}

/// Real vector g with 2 Re(c^H z) = g^T x.
inline Vec realify_linear(const CVec& c) {
  Vec g(2 * c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    g(2 * i) = 2.0 * c(i).real();
    g(2 * i + 1) = 2.0 * c(i).imag();
  }
  return g;
}

// ---------------------------------------------------------------------------
// MM expansion of the SCNR around W_p.
// ---------------------------------------------------------------------------

struct PrecoderExpansion {
  Precoder w_p;
  CMat g_p;            // A^H J_p^{-1} A, Hermitian PSD (M x M)
  CMat linear;         // G_p W_p (M x K): coefficient of 2 Re tr(.^H W)
  CMat quad;           // sum_i |alpha_i|^2 A_i^H E_p A_i, Hermitian PSD
  double const_term;   // -sigma_0^2 tr(E_p)
  double alpha0_sq;
};

inline PrecoderExpansion make_precoder_expansion(const Precoder& w_p,
                                                 const Positions& pos,
                                                 const Scenario& sc,
                                                 const ArrayGeometry& geom) {
  PrecoderExpansion exp;
  exp.w_p = w_p;
  exp.alpha0_sq = std::norm(sc.target_gain);

  const ClutterKernel kernel(w_p, pos, sc, geom);
  const CMat a = effective_matrix(sc.target_el, sc.target_az, pos, geom);
  const CMat jinv_a = kernel.solve(a);           // N x M
  exp.g_p = a.adjoint() * jinv_a;
  exp.g_p = 0.5 * (exp.g_p + exp.g_p.adjoint().eval());

  const CMat f = kernel.solve(a * w_p);          // J_p^{-1} A W_p, N x K
  exp.linear = a.adjoint() * f;                  // = G_p W_p
  exp.const_term = -sc.noise_radar * f.squaredNorm();

  const int m = geom.m();
  exp.quad = CMat::Zero(m, m);
  for (int i = 0; i < sc.num_clutter(); ++i) {
    const CVec ar =
        receive_steering(sc.clutter_el(i), sc.clutter_az(i), pos, geom.lambda);
    const CVec at = transmit_steering(sc.clutter_el(i), sc.clutter_az(i), geom);
    const double weight =
        std::norm(sc.clutter_gain(i)) * (f.adjoint() * ar).squaredNorm();
    exp.quad += weight * (at.conjugate() * at.transpose());
  }
  exp.quad = 0.5 * (exp.quad + exp.quad.adjoint().eval());
  return exp;
}

/// Concave surrogate of the SCNR at the expansion point (includes the
/// |alpha_0|^2 factor so it touches scnr() at W = W_p).
inline double surrogate_precoder_objective(const Precoder& w,
                                           const PrecoderExpansion& exp) {
  const double lin = 2.0 * (exp.linear.adjoint() * w).real().trace();
  const double quad = (w.adjoint() * exp.quad * w).real().trace();
  return exp.alpha0_sq * (lin - quad + exp.const_term);
}

/// Minorized left-hand side of the SINR constraint of user k.
inline double linearized_sinr_lhs(int k, const Precoder& w,
                                  const Precoder& w_p, const Scenario& sc,
                                  const ArrayGeometry& geom) {
  const CVec h = user_channel(k, sc, geom);
  const cplx tp = (h.adjoint() * w_p.col(k))(0);
  const cplx tk = (h.adjoint() * w.col(k))(0);
  const double factor = 1.0 + 1.0 / sc.sinr_target(k);
  return factor * (2.0 * (tp * std::conj(tk)).real() - std::norm(tp));
}

// ---------------------------------------------------------------------------
// Convex subproblem assembly (real-lifted QCQP).
// ---------------------------------------------------------------------------

namespace detail {

inline Mat block_diag_repeat(const Mat& block, int reps) {
  const int b = static_cast<int>(block.rows());
  Mat out = Mat::Zero(b * reps, b * reps);
  for (int r = 0; r < reps; ++r)
    out.block(r * b, r * b, b, b) = block;
  return out;
}

struct SubproblemForms {
  QuadForm objective;
  std::vector<QuadForm> constraints;  // [0] = power ball, then one per user
};

inline SubproblemForms build_precoder_subproblem(const PrecoderExpansion& exp,
                                                 const Scenario& sc,
                                                 const ArrayGeometry& geom) {
  const int m = geom.m();
  const int k_cols = static_cast<int>(exp.w_p.cols());
  const int n = 2 * m * k_cols;

  SubproblemForms out;
  QuadForm& obj = out.objective;
  obj.a = Mat::Zero(n, n);
  if (exp.quad.cwiseAbs().maxCoeff() > 0.0)
    obj.a = -2.0 * exp.alpha0_sq *
            block_diag_repeat(realify_hermitian(exp.quad), k_cols);
  obj.b = Vec(n);
  for (int c = 0; c < k_cols; ++c)
    obj.b.segment(2 * m * c, 2 * m) =
        exp.alpha0_sq * realify_linear(exp.linear.col(c));
  obj.c = exp.alpha0_sq * exp.const_term;

  QuadForm power;
  power.a = 2.0 * Mat::Identity(n, n);
  power.b = Vec::Zero(n);
  power.c = -sc.power_budget;
  out.constraints.push_back(std::move(power));

  const CMat h = user_channel_matrix(sc, geom);
  for (int k = 0; k < sc.num_users(); ++k) {
    const CVec hk = h.col(k);
    const cplx tp = (hk.adjoint() * exp.w_p.col(k))(0);
    const double factor = 1.0 + 1.0 / sc.sinr_target(k);
    QuadForm g;
    g.a = block_diag_repeat(
        2.0 * realify_hermitian((hk * hk.adjoint()).eval()), k_cols);
    g.b = Vec::Zero(n);
    g.b.segment(2 * m * k, 2 * m) =
        -factor * realify_linear((tp * hk).eval());
    g.c = factor * std::norm(tp) + sc.noise_user(k);
    out.constraints.push_back(std::move(g));
  }
  return out;
}

}  // namespace detail

struct QcqpSolution {
  Precoder w;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  QcqpStatus status = QcqpStatus::Converged;
};

/// Solve the convex precoder subproblem at the expansion point. The
/// expansion W_p must be strictly feasible for its own linearized
/// constraints; polish lands on active constraint boundaries and is switched
/// off inside the MM loop so each iterate stays strictly interior.
inline QcqpSolution solve_precoder_subproblem(const PrecoderExpansion& exp,
                                              const Scenario& sc,
                                              const Positions& /*pos*/,
                                              const ArrayGeometry& geom,
                                              double tol, bool polish = true) {
  const auto forms = detail::build_precoder_subproblem(exp, sc, geom);
  const QcqpResult r = maximize_qcqp(forms.objective, forms.constraints,
                                     realify(exp.w_p), tol, polish);
  QcqpSolution sol;
  sol.w = complexify(r.x, geom.m(), static_cast<int>(exp.w_p.cols()));
  sol.objective = r.objective;
  sol.kkt_residual = r.kkt_residual;
  sol.iterations = r.newton_steps;
  sol.status = r.status;
  return sol;
}

// ---------------------------------------------------------------------------
// Feasible initialization (zero-forcing + residual power toward the target,
// matched-filter fallback, iterated max-slack feasibility restoration).
// ---------------------------------------------------------------------------

namespace detail {

/// Smallest relative SINR slack, min_k (SINR_k/gamma_k - 1).
inline double sinr_margin(const Precoder& w, const Scenario& sc,
                          const ArrayGeometry& geom) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < sc.num_users(); ++k)
    m = std::min(m, sinr(k, w, sc, geom) / sc.sinr_target(k) - 1.0);
  return m;
}

/// One round of max-slack restoration: maximize s over (W, s) subject to the
/// power ball and the SINR constraints linearized at w_cur, each padded by
/// s times its own scale. Strictly feasible for s negative enough, so it can
/// start from any W.
inline Precoder max_slack_round(const Precoder& w_cur, const Scenario& sc,
                                const ArrayGeometry& geom, double tol) {
  PrecoderExpansion exp;  // only w_p is needed by the constraint builder
  exp.w_p = w_cur;
  exp.alpha0_sq = 1.0;
  exp.linear = CMat::Zero(geom.m(), w_cur.cols());
  exp.quad = CMat::Zero(geom.m(), geom.m());
  exp.const_term = 0.0;
  auto forms = build_precoder_subproblem(exp, sc, geom);

  const int n = 2 * geom.m() * static_cast<int>(w_cur.cols());
  QuadForm obj;
  obj.b = Vec::Zero(n + 1);
  obj.b(n) = 1.0;  // maximize the slack variable
  std::vector<QuadForm> cons;
  for (std::size_t c = 0; c < forms.constraints.size(); ++c) {
    QuadForm g;
    g.a = Mat::Zero(n + 1, n + 1);
    g.a.topLeftCorner(n, n) = forms.constraints[c].a;
    g.b = Vec::Zero(n + 1);
    g.b.head(n) = forms.constraints[c].b;
    g.c = forms.constraints[c].c;
    double scale = std::max({std::abs(g.c), g.b.cwiseAbs().maxCoeff(),
                             g.a.cwiseAbs().maxCoeff(), 1e-300});
    if (c == 0) scale = 0.0;  // keep the power ball hard
    g.b(n) = scale;
    cons.push_back(std::move(g));
  }
  QuadForm cap;  // bounded slack keeps the barrier Hessian well posed
  cap.b = Vec::Zero(n + 1);
  cap.b(n) = 1.0;
  cap.c = -10.0;
  cons.push_back(std::move(cap));

  Vec y0 = Vec::Zero(n + 1);
  y0.head(n) = realify(w_cur) * 0.9;  // strictly inside the power ball
  double s0 = 0.0;
  for (const QuadForm& g : cons) {
    const double coeff = g.b(n);
    if (coeff <= 0.0) continue;
    const double base = g.eval(y0);  // value at s = 0
    s0 = std::min(s0, -base / coeff);
  }
  y0(n) = s0 - 1.0;

  const QcqpResult r = maximize_qcqp(obj, cons, y0, tol, /*polish=*/false);
  return complexify(r.x.head(n), geom.m(), static_cast<int>(w_cur.cols()));
}

}  // namespace detail

/// Strictly feasible starting precoder, or nullopt when the SINR targets are
/// unreachable under the power budget. Uses max(K, 1) columns: with no
/// communication users a single sensing stream carries the power.
inline std::optional<Precoder> initialize_precoder(const Scenario& sc,
                                                   const ArrayGeometry& geom,
                                                   double margin = 1e-2) {
  const int m = geom.m();
  const int k = sc.num_users();
  const double usable = sc.power_budget * (1.0 - 1e-7);

  if (k == 0) {
    const CVec at = transmit_steering(sc.target_el, sc.target_az, geom);
    Precoder w(m, 1);
    w.col(0) = std::sqrt(usable) * at.conjugate() / at.norm();
    return w;
  }

  const CMat h = user_channel_matrix(sc, geom);

  // Zero-forcing: h_k^H u_j = delta_kj removes interference, so each column
  // scale meets gamma_k exactly from its own noise floor.
  if (k <= m) {
    const CMat gram = h.adjoint() * h;
    Eigen::FullPivLU<CMat> lu(gram);
    if (lu.isInvertible()) {
      const CMat u = h * lu.inverse();
      Precoder w(m, k);
      double used = 0.0;
      bool ok = true;
      for (int j = 0; j < k; ++j) {
        // Meeting gamma_k exactly from the noise floor leaves an absolute
        // SINR slack of order sigma_k^2 (1e-16 at -105 dBm), which the
        // interior-point solver cannot tell from the boundary. Spend a small
        // power fraction per user instead whenever that is the larger start.
        const double floor_sq =
            sc.sinr_target(j) * sc.noise_user(j) * (1.0 + margin);
        const double frac_sq =
            0.05 * usable / (k * std::max(u.col(j).squaredNorm(), 1e-300));
        const double amp_sq = std::max(floor_sq, frac_sq);
        w.col(j) = std::sqrt(amp_sq) * u.col(j);
        used += amp_sq * u.col(j).squaredNorm();
        if (!w.col(j).allFinite()) ok = false;
      }
      if (ok && used <= usable) {
        // Spend the leftover power toward the target inside the users'
        // null space, which leaves every h_k^H w_j untouched.
        const CVec at = transmit_steering(sc.target_el, sc.target_az, geom);
        CVec v = at.conjugate() - h * lu.solve(h.adjoint() * at.conjugate());
        const double vn = v.norm();
        if (vn > 1e-8 * std::sqrt(static_cast<double>(m)))
          w.col(0) += std::sqrt(usable - used) * v / vn;
        if (detail::sinr_margin(w, sc, geom) > 0.5 * margin &&
            transmit_power(w) < sc.power_budget)
          return w;
      }
    }
  }

  // Matched filtering with uniform power.
  {
    Precoder w(m, k);
    for (int j = 0; j < k; ++j)
      w.col(j) = std::sqrt(usable / k) * h.col(j) / h.col(j).norm();
    if (detail::sinr_margin(w, sc, geom) > 0.5 * margin) return w;

    // Iterated max-slack restoration from the matched filter.
    double last = -std::numeric_limits<double>::infinity();
    for (int round = 0; round < 30; ++round) {
      w = detail::max_slack_round(w, sc, geom, 1e-9);
      const double slack = detail::sinr_margin(w, sc, geom);
      if (slack > 0.5 * margin) return w;
      if (slack < last + 1e-10) break;
      last = slack;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// MM ascent over W.
// ---------------------------------------------------------------------------

struct PrecoderIterate {
  double scnr = 0.0;
  double surrogate = 0.0;
  double kkt_residual = 0.0;
};

struct PrecoderTrace {
  std::vector<PrecoderIterate> iterates;
  QcqpStatus status = QcqpStatus::Converged;
};

/// Precoder block: repeat the convex subproblem until the SCNR increase
/// drops below eps (relative to the running value by default, so the
/// threshold stays meaningful across the huge SCNR scales a -105 dBm noise
/// floor produces). W_init must satisfy the original constraints strictly.
inline std::pair<Precoder, PrecoderTrace> optimize_precoder(
    const Precoder& w_init, const Scenario& sc, const Positions& pos,
    const ArrayGeometry& geom, double eps, int max_inner = 200,
    double qcqp_tol = 1e-9, bool relative_eps = true) {
  Precoder w = w_init;
  PrecoderTrace trace;
  trace.status = QcqpStatus::MaxIterations;
  double current = scnr(w, pos, sc, geom);
  for (int p = 0; p < max_inner; ++p) {
    const PrecoderExpansion exp = make_precoder_expansion(w, pos, sc, geom);
    const QcqpSolution sol =
        solve_precoder_subproblem(exp, sc, pos, geom, qcqp_tol, /*polish=*/false);
    if (sol.status == QcqpStatus::Infeasible) {
      trace.status = QcqpStatus::Infeasible;
      break;
    }
    double next = scnr(sol.w, pos, sc, geom);
    if (next >= current) {
      w = sol.w;
    } else {
      next = current;  // MM safeguard: never move downhill
    }
    trace.iterates.push_back({next, sol.objective, sol.kkt_residual});
    const double threshold =
        relative_eps ? eps * std::max(1.0, std::abs(next)) : eps;
    if (next - current < threshold) {
      trace.status = QcqpStatus::Converged;
      current = next;
      break;
    }
    current = next;
  }
  return {w, trace};
}

}  // namespace fasisac

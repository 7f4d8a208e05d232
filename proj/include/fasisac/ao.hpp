// SPDX-License-Identifier: Apache-2.0
//
// Orchestration of the alternating MM algorithm: precoder pass, position
// pass, outer loop on the SCNR increase, trace collection.

#pragma once

#include <chrono>
#include <optional>

#include "fasisac/position_opt.hpp"
#include "fasisac/precoder_opt.hpp"

namespace fasisac {

struct SolverConfig {
  double eps_outer = 1e-4;
  double eps_w = 1e-4;
  double eps_r_outer = 1e-4;
  double eps_r_inner = 1e-4;
  int max_outer = 100;
  int max_inner = 200;
  double qcqp_tol = 1e-9;
  std::uint64_t rng_seed = 1;
  bool relative_eps = true;  // thresholds on increase relative to |value|
};

enum class SolveStatus { Converged, MaxIterations, Infeasible };

struct OuterRecord {
  double scnr = 0.0;
  Vec sinr;
  double power = 0.0;
  double min_dist = 0.0;
  double ms = 0.0;
};

struct SolveTrace {
  std::vector<OuterRecord> outer;
  std::vector<double> checkpoints;  // SCNR after every block boundary
  SolveStatus status = SolveStatus::Converged;
  int iterations = 0;
};

struct SolveResult {
  Precoder w;
  Positions pos;
  SolveTrace trace;
};

/// Antenna layout shared by the FPA baseline and the main initialization:
/// rows of ceil(sqrt(N)) columns at pitch D, centered in S.
inline Positions centered_grid(const ArrayGeometry& geom) {
  const int n = geom.n_rx;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  Mat xy(2, n);
  const double cx = geom.region / 2.0;
  const double cy = geom.region / 2.0;
  int idx = 0;
  for (int r = 0; r < rows && idx < n; ++r) {
    const int in_row = std::min(cols, n - r * cols);
    for (int c = 0; c < in_row; ++c, ++idx) {
      xy(0, idx) = cx + (c - (in_row - 1) / 2.0) * geom.min_dist;
      xy(1, idx) = cy + (r - (rows - 1) / 2.0) * geom.min_dist;
    }
  }
  return Positions(xy);
}

struct ConstraintReport {
  double power_residual = 0.0;    // tr(WW^H) - P0
  Vec sinr_residual;              // gamma_k - SINR_k
  double distance_residual = 0.0; // D - min pairwise distance (N > 1)
  double region_residual = 0.0;   // max out-of-box excursion

  bool all_nonpositive(double tol = 0.0) const {
    if (power_residual > tol || distance_residual > tol ||
        region_residual > tol)
      return false;
    return (sinr_residual.array() <= tol).all();
  }
};

inline ConstraintReport check_constraints(const Precoder& w,
                                          const Positions& pos,
                                          const Scenario& sc,
                                          const ArrayGeometry& geom) {
  ConstraintReport rep;
  rep.power_residual = transmit_power(w) - sc.power_budget;
  rep.sinr_residual = Vec(sc.num_users());
  for (int k = 0; k < sc.num_users(); ++k)
    rep.sinr_residual(k) = sc.sinr_target(k) - sinr(k, w, sc, geom);
  rep.distance_residual =
      pos.count() > 1 ? geom.min_dist - pos.min_pairwise_distance() : 0.0;
  double excursion = 0.0;
  for (int n = 0; n < pos.count(); ++n) {
    for (int d = 0; d < 2; ++d) {
      excursion = std::max(excursion, -pos.xy(d, n));
      excursion = std::max(excursion, pos.xy(d, n) - geom.region);
    }
  }
  rep.region_residual = excursion;
  return rep;
}

/// Full alternating solve. Optional warm starts let baselines seed the
/// algorithm; otherwise the feasible initialization and the centered grid
/// are used.
inline SolveResult solve(const Scenario& sc, const ArrayGeometry& geom,
                         const SolverConfig& cfg,
                         std::optional<Precoder> w0 = std::nullopt,
                         std::optional<Positions> r0 = std::nullopt) {
  SolveResult out;
  out.pos = r0 ? *r0 : centered_grid(geom);

  if (w0) {
    out.w = *w0;
  } else {
    const auto init = initialize_precoder(sc, geom);
    if (!init) {
      out.w = Precoder::Zero(geom.m(), std::max(sc.num_users(), 1));
      out.trace.status = SolveStatus::Infeasible;
      return out;
    }
    out.w = *init;
  }

  using clock = std::chrono::steady_clock;
  double current = scnr(out.w, out.pos, sc, geom);
  out.trace.checkpoints.push_back(current);
  out.trace.status = SolveStatus::MaxIterations;

  for (int t = 0; t < cfg.max_outer; ++t) {
    const auto t0 = clock::now();

    auto [w_new, w_trace] =
        optimize_precoder(out.w, sc, out.pos, geom, cfg.eps_w, cfg.max_inner,
                          cfg.qcqp_tol, cfg.relative_eps);
    if (w_trace.status == QcqpStatus::Infeasible) {
      out.trace.status = SolveStatus::Infeasible;
      return out;
    }
    out.w = w_new;
    for (const PrecoderIterate& it : w_trace.iterates)
      out.trace.checkpoints.push_back(it.scnr);

    PositionOptions popt;
    popt.eps_outer = cfg.eps_r_outer;
    popt.eps_inner = cfg.eps_r_inner;
    popt.max_outer = cfg.max_inner;
    popt.max_inner = cfg.max_inner;
    popt.relative_eps = cfg.relative_eps;
    auto [pos_new, r_trace] = optimize_positions(out.w, out.pos, sc, geom, popt);
    out.pos = pos_new;
    for (double s : r_trace.scnr) out.trace.checkpoints.push_back(s);

    const double next = scnr(out.w, out.pos, sc, geom);
    const double ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    OuterRecord rec;
    rec.scnr = next;
    rec.sinr = all_sinr(out.w, sc, geom);
    rec.power = transmit_power(out.w);
    rec.min_dist =
        out.pos.count() > 1 ? out.pos.min_pairwise_distance() : geom.region;
    rec.ms = ms;
    out.trace.outer.push_back(rec);
    out.trace.iterations = t + 1;

    const double gain = next - current;
    const double threshold =
        cfg.relative_eps ? cfg.eps_outer * std::max(1.0, std::abs(next))
                         : cfg.eps_outer;
    if (gain < threshold) {
      out.trace.status = SolveStatus::Converged;
      break;
    }
    current = next;
  }
  return out;
}

}  // namespace fasisac

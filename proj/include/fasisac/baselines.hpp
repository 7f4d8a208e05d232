// SPDX-License-Identifier: Apache-2.0
//
// Comparison schemes: fixed planar array (FPA), rotatable uniform linear
// array (RULA), and alternating position selection on a lambda/2 grid (APS).
// All share the main precoder optimizer so the geometry effect is isolated.

#pragma once

#include "fasisac/ao.hpp"

namespace fasisac {

enum class Scheme { Fas, Aps, Rula, Fpa };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Fas: return "fas";
    case Scheme::Aps: return "aps";
    case Scheme::Rula: return "rula";
    case Scheme::Fpa: return "fpa";
  }
  return "?";
}

enum class BaselineStatus { Ok, Infeasible, NoFeasibleAngle };

struct BaselineResult {
  Scheme scheme = Scheme::Fpa;
  Positions pos;
  Precoder w;
  double scnr_value = 0.0;
  double ms = 0.0;
  BaselineStatus status = BaselineStatus::Ok;
};

namespace detail {

/// Precoder-only optimization at fixed positions; shared by all baselines.
inline BaselineStatus optimize_w_at(const Positions& pos, const Scenario& sc,
                                    const ArrayGeometry& geom,
                                    const SolverConfig& cfg, Precoder& w_out,
                                    double& scnr_out) {
  const auto w0 = initialize_precoder(sc, geom);
  if (!w0) return BaselineStatus::Infeasible;
  auto [w, trace] =
      optimize_precoder(*w0, sc, pos, geom, cfg.eps_w, cfg.max_inner,
                        cfg.qcqp_tol, cfg.relative_eps);
  w_out = w;
  scnr_out = scnr(w, pos, sc, geom);
  return BaselineStatus::Ok;
}

}  // namespace detail

/// Fixed planar array: centered grid at pitch D, precoder optimized once.
inline BaselineResult run_fpa(const Scenario& sc, const ArrayGeometry& geom,
                              const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  BaselineResult res;
  res.scheme = Scheme::Fpa;
  res.pos = centered_grid(geom);
  res.status = detail::optimize_w_at(res.pos, sc, geom, cfg, res.w, res.scnr_value);
  res.ms = std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
               .count();
  return res;
}

/// Candidate RULA layout: N-element line at pitch D through the region
/// center, rotated by angle beta.
inline Positions rula_layout(const ArrayGeometry& geom, double beta) {
  Mat xy(2, geom.n_rx);
  const Vec2 center(geom.region / 2.0, geom.region / 2.0);
  const Vec2 dir(std::cos(beta), std::sin(beta));
  for (int n = 0; n < geom.n_rx; ++n)
    xy.col(n) = center + (n - (geom.n_rx - 1) / 2.0) * geom.min_dist * dir;
  return Positions(xy);
}

/// Rotatable ULA: exhaustive search over 50 rotation angles in [0, pi),
/// re-optimizing the precoder per candidate; ties break to the lowest index.
inline BaselineResult run_rula(const Scenario& sc, const ArrayGeometry& geom,
                               const SolverConfig& cfg, int num_angles = 50) {
  const auto t0 = std::chrono::steady_clock::now();
  BaselineResult res;
  res.scheme = Scheme::Rula;
  res.status = BaselineStatus::NoFeasibleAngle;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < num_angles; ++a) {
    const double beta = kPi * a / num_angles;
    const Positions cand = rula_layout(geom, beta);
    if (!cand.in_region(geom)) continue;
    Precoder w;
    double s = 0.0;
    const BaselineStatus st = detail::optimize_w_at(cand, sc, geom, cfg, w, s);
    if (st != BaselineStatus::Ok) {
      res.status = st;
      break;
    }
    if (s > best) {
      best = s;
      res.pos = cand;
      res.w = w;
      res.scnr_value = s;
      res.status = BaselineStatus::Ok;
    }
  }
  res.ms = std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
               .count();
  return res;
}

/// Candidate node grid for APS: pitch-D lattice anchored at the origin.
inline std::vector<Vec2> aps_grid(const ArrayGeometry& geom) {
  const int g = static_cast<int>(std::floor(geom.region / geom.min_dist + 1e-9)) + 1;
  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>(g) * g);
  for (int ix = 0; ix < g; ++ix)
    for (int iy = 0; iy < g; ++iy)
      nodes.emplace_back(ix * geom.min_dist, iy * geom.min_dist);
  return nodes;
}

/// Alternating position selection: sweep antennas in index order, each doing
/// an exhaustive search over grid nodes respecting the min distance to the
/// others, then re-optimize the precoder; repeat until the SCNR increase
/// falls below eps.
inline BaselineResult run_aps(const Scenario& sc, const ArrayGeometry& geom,
                              const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  BaselineResult res;
  res.scheme = Scheme::Aps;
  const std::vector<Vec2> nodes = aps_grid(geom);
  if (static_cast<int>(nodes.size()) < geom.n_rx)
    throw std::invalid_argument("APS grid has fewer nodes than antennas");

  // Start from the centered grid snapped to the nearest distinct nodes.
  Positions pos = centered_grid(geom);
  {
    std::vector<bool> taken(nodes.size(), false);
    for (int n = 0; n < geom.n_rx; ++n) {
      int best_i = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (taken[i]) continue;
        const double d = (nodes[i] - Vec2(pos.at(n))).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best_i = static_cast<int>(i);
        }
      }
      taken[best_i] = true;
      pos.xy.col(n) = nodes[best_i];
    }
  }

  res.status = detail::optimize_w_at(pos, sc, geom, cfg, res.w, res.scnr_value);
  if (res.status != BaselineStatus::Ok) {
    res.pos = pos;
    return res;
  }

  double current = res.scnr_value;
  for (int round = 0; round < cfg.max_outer; ++round) {
    for (int n = 0; n < geom.n_rx; ++n) {
      Vec2 best_node = pos.at(n);
      double best_s = scnr(res.w, pos, sc, geom);
      for (const Vec2& node : nodes) {
        bool ok = true;
        for (int l = 0; l < geom.n_rx && ok; ++l) {
          if (l == n) continue;
          if ((node - Vec2(pos.at(l))).norm() < geom.min_dist * (1.0 - 1e-9))
            ok = false;
        }
        if (!ok) continue;
        Positions cand = pos;
        cand.xy.col(n) = node;
        const double s = scnr(res.w, cand, sc, geom);
        if (s > best_s + 0.0) {
          best_s = s;
          best_node = node;
        }
      }
      pos.xy.col(n) = best_node;
    }
    Precoder w;
    double s = 0.0;
    if (detail::optimize_w_at(pos, sc, geom, cfg, w, s) == BaselineStatus::Ok &&
        s >= current) {
      res.w = w;
      res.scnr_value = s;
    }
    res.pos = pos;
    if (res.scnr_value - current < cfg.eps_outer) break;
    current = res.scnr_value;
  }
  res.pos = pos;
  res.ms = std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
               .count();
  return res;
}

/// The proposed fluid-antenna scheme, wrapped in the same result shape.
inline BaselineResult run_fas(const Scenario& sc, const ArrayGeometry& geom,
                              const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult sr = solve(sc, geom, cfg);
  BaselineResult res;
  res.scheme = Scheme::Fas;
  res.pos = sr.pos;
  res.w = sr.w;
  res.scnr_value =
      sr.trace.status == SolveStatus::Infeasible ? 0.0 : scnr(sr.w, sr.pos, sc, geom);
  res.status = sr.trace.status == SolveStatus::Infeasible
                   ? BaselineStatus::Infeasible
                   : BaselineStatus::Ok;
  res.ms = std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
               .count();
  return res;
}

inline BaselineResult run_scheme(Scheme s, const Scenario& sc,
                                 const ArrayGeometry& geom,
                                 const SolverConfig& cfg) {
  switch (s) {
    case Scheme::Fas: return run_fas(sc, geom, cfg);
    case Scheme::Aps: return run_aps(sc, geom, cfg);
    case Scheme::Rula: return run_rula(sc, geom, cfg);
    case Scheme::Fpa: return run_fpa(sc, geom, cfg);
  }
  throw std::logic_error("unknown scheme");
}

}  // namespace fasisac

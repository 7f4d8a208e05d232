// SPDX-License-Identifier: Apache-2.0
//
// Seeded random scenario generation following the simulation setup: angles
// uniform in [0, pi/2], path and clutter coefficients standard (circularly
// symmetric) complex Gaussian.

#pragma once

#include <numbers>
#include <random>

#include "fasisac/types.hpp"

namespace fasisac {

struct PopulationConfig {
  int users = 4;       // K
  int paths = 20;      // L
  int clutters = 9;    // I
  double gamma = 1.0;  // per-user SINR target (linear)
  double noise_user = 3.1622776601683794e-14;   // -105 dBm in watts
  double noise_radar = 3.1622776601683794e-14;  // -105 dBm
  double power_budget = 1.0;
  bool complex_gaussian = true;  // CN(0,1); false: real N(0,1) coefficients
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) {
  return seed ^ trial;
}

namespace detail {

inline cplx draw_coeff(std::mt19937_64& rng, bool complex_gaussian) {
  std::normal_distribution<double> unit(0.0, 1.0);
  if (complex_gaussian) {
    const double s = std::sqrt(0.5);
    const double re = unit(rng);
    const double im = unit(rng);
    return cplx(s * re, s * im);
  }
  return cplx(unit(rng), 0.0);
}

}  // namespace detail

/// Deterministic function of (seed, trial_index).
inline Scenario generate_scenario(const PopulationConfig& cfg,
                                  std::uint64_t seed, std::uint64_t trial) {
  std::mt19937_64 rng(derive_seed(seed, trial));
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2.0);
  Scenario sc;
  sc.users.resize(cfg.users);
  sc.noise_user = Vec::Constant(cfg.users, cfg.noise_user);
  sc.sinr_target = Vec::Constant(cfg.users, cfg.gamma);
  sc.noise_radar = cfg.noise_radar;
  sc.power_budget = cfg.power_budget;

  for (int k = 0; k < cfg.users; ++k) {
    UserPaths& up = sc.users[k];
    up.gains = CVec(cfg.paths);
    up.elevation = Vec(cfg.paths);
    up.azimuth = Vec(cfg.paths);
    for (int l = 0; l < cfg.paths; ++l) {
      up.gains(l) = detail::draw_coeff(rng, cfg.complex_gaussian);
      up.elevation(l) = angle(rng);
      up.azimuth(l) = angle(rng);
    }
  }

  sc.target_gain = detail::draw_coeff(rng, cfg.complex_gaussian);
  sc.target_el = angle(rng);
  sc.target_az = angle(rng);

  sc.clutter_gain = CVec(cfg.clutters);
  sc.clutter_el = Vec(cfg.clutters);
  sc.clutter_az = Vec(cfg.clutters);
  for (int i = 0; i < cfg.clutters; ++i) {
    sc.clutter_gain(i) = detail::draw_coeff(rng, cfg.complex_gaussian);
    sc.clutter_el(i) = angle(rng);
    sc.clutter_az(i) = angle(rng);
  }
  sc.validate();
  return sc;
}

}  // namespace fasisac

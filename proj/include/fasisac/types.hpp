// SPDX-License-Identifier: Apache-2.0
//
// fasisac: fluid-antenna-assisted MIMO ISAC radar SCNR maximization.
// Core value types shared by every module.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fasisac {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

/// Transmit precoding matrix W (M x K, columns w_k).
using Precoder = Eigen::MatrixXcd;

/// Transmit UPA shape/spacing plus the movable-receive-antenna region.
struct ArrayGeometry {
  int mx = 1;              // UPA x-dimension
  int my = 1;              // UPA y-dimension
  double spacing = 0.0;    // transmit inter-element spacing d [m]
  int n_rx = 1;            // number of receive fluid antennas N
  double region = 0.0;     // side A of the square region S = [0,A]^2 [m]
  double min_dist = 0.0;   // minimum inter-antenna distance D [m]
  double lambda = 0.0;     // carrier wavelength [m]

  int m() const { return mx * my; }

  ArrayGeometry() = default;
  ArrayGeometry(int mx_, int my_, double d_, int n_, double a_, double dist_,
                double lambda_)
      : mx(mx_), my(my_), spacing(d_), n_rx(n_), region(a_), min_dist(dist_),
        lambda(lambda_) {
    if (mx < 1 || my < 1) throw std::invalid_argument("UPA dimensions must be >= 1");
    if (n_rx < 1) throw std::invalid_argument("receive antenna count must be >= 1");
    if (region < 0.0) throw std::invalid_argument("region side must be >= 0");
    if (min_dist <= 0.0) throw std::invalid_argument("min distance must be > 0");
    if (lambda <= 0.0) throw std::invalid_argument("wavelength must be > 0");
    if (spacing < 0.0) throw std::invalid_argument("element spacing must be >= 0");
    // A grid of pitch D is the densest packing we certify; reject layouts
    // the region cannot hold.
    if (n_rx > 1) {
      const long g = static_cast<long>(std::floor(region / min_dist + 1e-9)) + 1;
      if (g * g < n_rx)
        throw std::invalid_argument("region cannot hold N antennas at min distance D");
    }
  }
};

/// One user's Saleh-Valenzuela multipath description.
struct UserPaths {
  CVec gains;     // rho_{k,l}
  Vec elevation;  // psi_{k,l} [rad]
  Vec azimuth;    // vartheta_{k,l} [rad]

  int paths() const { return static_cast<int>(gains.size()); }
};

/// One random realization: user paths, target and clutter, noise, targets.
struct Scenario {
  std::vector<UserPaths> users;

  cplx target_gain{0.0, 0.0};  // alpha_0
  double target_el = 0.0;      // theta_0 [rad]
  double target_az = 0.0;      // phi_0 [rad]

  CVec clutter_gain;  // alpha_i
  Vec clutter_el;     // theta_i [rad]
  Vec clutter_az;     // phi_i [rad]

  Vec noise_user;            // sigma_k^2 [W]
  double noise_radar = 1.0;  // sigma_0^2 [W]
  Vec sinr_target;           // gamma_k (linear)
  double power_budget = 1.0; // P_0 [W]

  int num_users() const { return static_cast<int>(users.size()); }
  int num_clutter() const { return static_cast<int>(clutter_gain.size()); }

  void validate() const {
    if (noise_radar <= 0.0) throw std::invalid_argument("sigma_0^2 must be > 0");
    if (power_budget <= 0.0) throw std::invalid_argument("P_0 must be > 0");
    for (int k = 0; k < num_users(); ++k) {
      if (users[k].paths() < 1) throw std::invalid_argument("L_k must be >= 1");
      if (noise_user(k) <= 0.0) throw std::invalid_argument("sigma_k^2 must be > 0");
      if (sinr_target(k) <= 0.0) throw std::invalid_argument("gamma_k must be > 0");
    }
  }
};

/// N receive-antenna coordinates inside S.
struct Positions {
  Mat xy;  // 2 x N

  Positions() = default;
  explicit Positions(Mat coords) : xy(std::move(coords)) {
    if (xy.rows() != 2) throw std::invalid_argument("positions must be 2 x N");
  }

  int count() const { return static_cast<int>(xy.cols()); }
  Vec2 at(int n) const { return xy.col(n); }

  double min_pairwise_distance() const {
    const int n = count();
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        best = std::min(best, (xy.col(a) - xy.col(b)).norm());
    return best;
  }

  bool in_region(const ArrayGeometry& geom, double tol = 1e-12) const {
    const double hi = geom.region + tol;
    return (xy.array() >= -tol).all() && (xy.array() <= hi).all();
  }

  /// Region membership plus pairwise distance >= D (with a relative slack so
  /// grids at exactly D pass).
  bool feasible(const ArrayGeometry& geom, double rel_tol = 1e-9) const {
    if (!in_region(geom)) return false;
    if (count() > 1 && min_pairwise_distance() < geom.min_dist * (1.0 - rel_tol))
      return false;
    return true;
  }
};

}  // namespace fasisac

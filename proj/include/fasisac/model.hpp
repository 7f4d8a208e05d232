// SPDX-License-Identifier: Apache-2.0
//
// Closed-form physical-layer quantities: steering vectors, channels,
// clutter-plus-noise covariance, radar SCNR and per-user SINR.

#pragma once

#include <numbers>

#include "fasisac/types.hpp"

namespace fasisac {

inline constexpr double kPi = std::numbers::pi;

/// Transmit UPA steering vector, Kronecker order with the x-index major:
/// element (ix, iy) sits at flat index ix*My + iy.
inline CVec transmit_steering(double psi, double vartheta,
                              const ArrayGeometry& geom) {
  const double u = std::sin(psi) * std::cos(vartheta);
  const double w = std::cos(psi);
  const double k0 = 2.0 * kPi / geom.lambda * geom.spacing;
  CVec a(geom.m());
  for (int ix = 0; ix < geom.mx; ++ix)
    for (int iy = 0; iy < geom.my; ++iy)
      a(ix * geom.my + iy) = std::polar(1.0, k0 * (ix * u + iy * w));
  return a;
}

/// Propagation distance difference between r_n and the origin for a plane
/// wave from elevation theta / azimuth phi.
inline double path_difference(const Vec2& r, double theta, double phi) {
  return r.x() * std::sin(theta) * std::cos(phi) + r.y() * std::cos(theta);
}

inline Vec2 path_difference_gradient(double theta, double phi) {
  return Vec2(std::sin(theta) * std::cos(phi), std::cos(theta));
}

/// Receive steering vector of the fluid array at the given positions.
inline CVec receive_steering(double theta, double phi, const Positions& pos,
                             double lambda) {
  const double k0 = 2.0 * kPi / lambda;
  CVec a(pos.count());
  for (int n = 0; n < pos.count(); ++n)
    a(n) = std::polar(1.0, k0 * path_difference(pos.at(n), theta, phi));
  return a;
}

/// Saleh-Valenzuela downlink channel for user k.
inline CVec user_channel(int k, const Scenario& sc, const ArrayGeometry& geom) {
  const UserPaths& up = sc.users.at(k);
  CVec h = CVec::Zero(geom.m());
  for (int l = 0; l < up.paths(); ++l)
    h += up.gains(l) * transmit_steering(up.elevation(l), up.azimuth(l), geom);
  return h / std::sqrt(static_cast<double>(up.paths()));
}

inline CMat user_channel_matrix(const Scenario& sc, const ArrayGeometry& geom) {
  CMat h(geom.m(), sc.num_users());
  for (int k = 0; k < sc.num_users(); ++k) h.col(k) = user_channel(k, sc, geom);
  return h;
}

/// Rank-one effective two-way matrix A(theta, phi, r) = a_r a_t^T.
inline CMat effective_matrix(double theta, double phi, const Positions& pos,
                             const ArrayGeometry& geom) {
  const CVec ar = receive_steering(theta, phi, pos, geom.lambda);
  const CVec at = transmit_steering(theta, phi, geom);
  return ar * at.transpose();
}

/// Action of the clutter-plus-noise covariance inverse, evaluated through an
/// SVD of the clutter factor so the sigma_0^2 floor survives the extreme
/// clutter-to-noise dynamic range of realistic parameters.
class ClutterKernel {
 public:
  ClutterKernel(const Precoder& w, const Positions& pos, const Scenario& sc,
                const ArrayGeometry& geom)
      : n_(pos.count()), sigma0_sq_(sc.noise_radar) {
    const int cols = static_cast<int>(w.cols());
    const int i_cnt = sc.num_clutter();
    if (i_cnt > 0 && cols > 0) {
      CMat b(n_, i_cnt * cols);
      for (int i = 0; i < i_cnt; ++i) {
        const CVec ar =
            receive_steering(sc.clutter_el(i), sc.clutter_az(i), pos, geom.lambda);
        const CVec at = transmit_steering(sc.clutter_el(i), sc.clutter_az(i), geom);
        // alpha_i A_i W = alpha_i a_r (a_t^T W); rank one per clutter.
        const Eigen::RowVectorXcd row = at.transpose() * w;
        b.block(0, i * cols, n_, cols) = std::abs(sc.clutter_gain(i)) * ar * row;
      }
      Eigen::JacobiSVD<CMat> svd(b, Eigen::ComputeThinU);
      basis_ = svd.matrixU();
      const Vec s = svd.singularValues();
      inv_eig_ = Vec(s.size());
      for (int i = 0; i < s.size(); ++i)
        inv_eig_(i) = 1.0 / (s(i) * s(i) + sigma0_sq_);
    }
  }

  int dim() const { return n_; }
  double noise_floor() const { return sigma0_sq_; }

  /// J^{-1} X by the eigendecomposition split
  ///   J^{-1} x = (x - U U^H x) / sigma_0^2 + U ((U^H x) ./ (s^2 + sigma_0^2)).
  /// The residual is reorthogonalized once against U so that its spurious
  /// in-span leakage (order eps * |x|) is not amplified by 1 / sigma_0^2;
  /// clutter power can exceed the noise floor by ~17 orders of magnitude,
  /// and the single-subtraction Woodbury form loses the in-span components
  /// to cancellation there.
  CMat solve(const CMat& x) const {
    if (basis_.cols() == 0) return x / sigma0_sq_;
    const CMat a = basis_.adjoint() * x;
    CMat r = x - basis_ * a;
    const CMat b = basis_.adjoint() * r;
    r.noalias() -= basis_ * b;
    CMat span = a + b;
    span.array().colwise() *= inv_eig_.array().cast<cplx>();
    return r / sigma0_sq_ + basis_ * span;
  }

 private:
  int n_;
  double sigma0_sq_;
  CMat basis_;   // left singular vectors of the clutter factor
  Vec inv_eig_;  // 1 / (sigma_i^2 + sigma_0^2)
};

/// Dense clutter-plus-noise covariance J (reference form; prefer
/// ClutterKernel::solve for inverse applications).
inline CMat clutter_plus_noise(const Precoder& w, const Positions& pos,
                               const Scenario& sc, const ArrayGeometry& geom) {
  CMat j = sc.noise_radar * CMat::Identity(pos.count(), pos.count());
  for (int i = 0; i < sc.num_clutter(); ++i) {
    const CMat ai = effective_matrix(sc.clutter_el(i), sc.clutter_az(i), pos, geom);
    const CMat aw = ai * w;
    j += std::norm(sc.clutter_gain(i)) * (aw * aw.adjoint());
  }
  return j;
}

/// Radar SCNR, |alpha_0|^2 tr(A^H J^{-1} A W W^H).
inline double scnr(const Precoder& w, const Positions& pos, const Scenario& sc,
                   const ArrayGeometry& geom) {
  if (w.cols() == 0) return 0.0;
  const ClutterKernel kernel(w, pos, sc, geom);
  const CMat a = effective_matrix(sc.target_el, sc.target_az, pos, geom);
  const CMat aw = a * w;  // N x K
  const double t = (aw.adjoint() * kernel.solve(aw)).real().trace();
  return std::norm(sc.target_gain) * t;
}

/// Communication SINR of user k.
inline double sinr(int k, const Precoder& w, const Scenario& sc,
                   const ArrayGeometry& geom) {
  const CVec h = user_channel(k, sc, geom);
  const Eigen::RowVectorXcd t = h.adjoint() * w;
  double interference = 0.0;
  for (int j = 0; j < t.size(); ++j)
    if (j != k) interference += std::norm(t(j));
  return std::norm(t(k)) / (interference + sc.noise_user(k));
}

inline Vec all_sinr(const Precoder& w, const Scenario& sc,
                    const ArrayGeometry& geom) {
  Vec out(sc.num_users());
  for (int k = 0; k < sc.num_users(); ++k) out(k) = sinr(k, w, sc, geom);
  return out;
}

inline double transmit_power(const Precoder& w) { return w.squaredNorm(); }

}  // namespace fasisac

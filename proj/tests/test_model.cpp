// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fasisac/model.hpp"

using namespace fasisac;

namespace {

ArrayGeometry small_geom(int mx = 2, int my = 2, int n = 2,
                         double lambda = 0.015) {
  return ArrayGeometry(mx, my, lambda / 2.0, n, 4.0 * lambda, lambda / 2.0,
                       lambda);
}

Positions origin_positions(int n) { return Positions(Mat::Zero(2, n)); }

Scenario bare_scenario(double sigma0 = 1.0) {
  Scenario sc;
  sc.target_gain = cplx(1.0, 0.0);
  sc.target_el = kPi / 2.0;
  sc.target_az = 0.0;
  sc.clutter_gain = CVec(0);
  sc.clutter_el = Vec(0);
  sc.clutter_az = Vec(0);
  sc.noise_user = Vec(0);
  sc.sinr_target = Vec(0);
  sc.noise_radar = sigma0;
  sc.power_budget = 1.0;
  return sc;
}

std::mt19937_64 rng(12345);

cplx random_coeff() {
  std::normal_distribution<double> unit(0.0, 1.0);
  return cplx(unit(rng), unit(rng));
}

Scenario random_scenario(int k, int i, int paths, double sigma = 0.25) {
  std::uniform_real_distribution<double> angle(0.0, kPi / 2.0);
  Scenario sc;
  sc.users.resize(k);
  for (auto& up : sc.users) {
    up.gains = CVec(paths);
    up.elevation = Vec(paths);
    up.azimuth = Vec(paths);
    for (int l = 0; l < paths; ++l) {
      up.gains(l) = random_coeff();
      up.elevation(l) = angle(rng);
      up.azimuth(l) = angle(rng);
    }
  }
  sc.target_gain = random_coeff();
  sc.target_el = angle(rng);
  sc.target_az = angle(rng);
  sc.clutter_gain = CVec(i);
  sc.clutter_el = Vec(i);
  sc.clutter_az = Vec(i);
  for (int c = 0; c < i; ++c) {
    sc.clutter_gain(c) = random_coeff();
    sc.clutter_el(c) = angle(rng);
    sc.clutter_az(c) = angle(rng);
  }
  sc.noise_user = Vec::Constant(std::max(k, 1), sigma);
  sc.sinr_target = Vec::Constant(std::max(k, 1), 1.0);
  sc.noise_radar = sigma;
  sc.power_budget = 10.0;
  return sc;
}

Positions random_positions(int n, double region) {
  std::uniform_real_distribution<double> u(0.0, region);
  Mat xy(2, n);
  for (int i = 0; i < 2 * n; ++i) xy(i % 2, i / 2) = u(rng);
  return Positions(xy);
}

Precoder random_precoder(int m, int k) {
  Precoder w(m, k);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = random_coeff();
  return w;
}

}  // namespace

TEST_CASE("transmit steering: zero-phase and single-element cases") {
  auto g = small_geom(2, 2);
  CVec a = transmit_steering(kPi / 2.0, kPi / 2.0, g);
  REQUIRE(a.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(a(i) - cplx(1, 0)) < 1e-12);

  auto g1 = small_geom(1, 1);
  CVec a1 = transmit_steering(0.7, -1.3, g1);
  REQUIRE(a1.size() == 1);
  CHECK(std::abs(a1(0) - cplx(1, 0)) < 1e-15);
}

TEST_CASE("transmit steering: cos-psi ramp hand value") {
  // psi=0, vartheta=0, Mx=1, My=2, d=lambda/2: second element is e^{j pi}.
  ArrayGeometry g(1, 2, 0.015 / 2.0, 1, 0.0, 0.0075, 0.015);
  CVec a = transmit_steering(0.0, 0.0, g);
  CHECK(std::abs(a(0) - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(a(1) - cplx(-1, 0)) < 1e-12);
}

TEST_CASE("transmit steering entries are unit modulus, x-major order") {
  auto g = small_geom(3, 2);
  CVec a = transmit_steering(0.4, 1.1, g);
  for (int i = 0; i < a.size(); ++i) CHECK(std::abs(std::abs(a(i)) - 1.0) < 1e-14);
  // x-major: stepping by My advances the x ramp.
  const cplx ratio_x = a(2) / a(0);
  const cplx expect =
      std::polar(1.0, 2.0 * kPi / g.lambda * g.spacing * std::sin(0.4) * std::cos(1.1));
  CHECK(std::abs(ratio_x - expect) < 1e-12);
}

TEST_CASE("path difference: origin, unit direction, diagonal") {
  CHECK(path_difference(Vec2(0, 0), 1.0, 2.0) == 0.0);
  CHECK(path_difference(Vec2(0.0075, 0), kPi / 2.0, 0.0) ==
        doctest::Approx(0.0075).epsilon(1e-12));
  CHECK(path_difference(Vec2(1, 1), kPi / 4.0, 0.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("receive steering examples") {
  const double lambda = 0.015;
  CVec a0 = receive_steering(0.3, 0.9, origin_positions(3), lambda);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a0(i) - cplx(1, 0)) < 1e-14);

  Mat xy(2, 1);
  xy << lambda / 2.0, 0.0;
  CVec ahalf = receive_steering(kPi / 2.0, 0.0, Positions(xy), lambda);
  CHECK(std::abs(ahalf(0) - cplx(-1, 0)) < 1e-12);

  Mat xy2(2, 2);
  xy2 << 0.0, lambda / 4.0, 0.0, 0.0;
  CVec aq = receive_steering(kPi / 2.0, 0.0, Positions(xy2), lambda);
  CHECK(std::abs(aq(0) - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(aq(1) - cplx(0, 1)) < 1e-12);
}

TEST_CASE("receive steering unit modulus at random positions") {
  for (int t = 0; t < 20; ++t) {
    Positions pos = random_positions(4, 0.06);
    CVec a = receive_steering(0.3 + 0.01 * t, 0.8, pos, 0.015);
    for (int i = 0; i < a.size(); ++i)
      CHECK(std::abs(std::abs(a(i)) - 1.0) < 1e-14);
  }
}

TEST_CASE("user channel: single path, zero gains, two-path sum") {
  auto g = small_geom(1, 2);
  Scenario sc = bare_scenario();
  sc.users.resize(1);
  sc.noise_user = Vec::Constant(1, 1.0);
  sc.sinr_target = Vec::Constant(1, 1.0);

  sc.users[0].gains = CVec::Constant(1, cplx(1, 0));
  sc.users[0].elevation = Vec::Constant(1, kPi / 2.0);
  sc.users[0].azimuth = Vec::Constant(1, kPi / 2.0);
  CVec h = user_channel(0, sc, g);
  CHECK(std::abs(h(0) - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(h(1) - cplx(1, 0)) < 1e-12);

  sc.users[0].gains = CVec::Zero(4);
  sc.users[0].elevation = Vec::Constant(4, 0.3);
  sc.users[0].azimuth = Vec::Constant(4, 0.5);
  CHECK(user_channel(0, sc, g).norm() == 0.0);

  sc.users[0].gains = CVec::Constant(2, cplx(1, 0));
  sc.users[0].elevation = Vec(2);
  sc.users[0].elevation << 0.2, 1.1;
  sc.users[0].azimuth = Vec(2);
  sc.users[0].azimuth << 0.9, 0.4;
  CVec expect = (transmit_steering(0.2, 0.9, g) + transmit_steering(1.1, 0.4, g)) /
                std::sqrt(2.0);
  CHECK((user_channel(0, sc, g) - expect).norm() < 1e-12);
}

TEST_CASE("effective matrix: rank one, Frobenius norm, two-element column") {
  auto g = small_geom(2, 2, 2);
  Positions pos = random_positions(2, g.region);
  CMat a = effective_matrix(0.7, 0.3, pos, g);
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 4);
  CHECK(std::abs(a.norm() - std::sqrt(8.0)) < 1e-12);
  Eigen::JacobiSVD<CMat> svd(a);
  CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));

  ArrayGeometry g1(1, 1, 0.0, 2, 4 * 0.015, 0.0075, 0.015);
  Mat xy(2, 2);
  xy << 0.0, 0.015 / 4.0, 0.0, 0.0;
  CMat a1 = effective_matrix(kPi / 2.0, 0.0, Positions(xy), g1);
  CHECK(std::abs(a1(0, 0) - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(a1(1, 0) - cplx(0, 1)) < 1e-12);
}

TEST_CASE("clutter-plus-noise: no clutter, zero precoder, scalar case") {
  auto g = small_geom(2, 2, 3);
  Scenario sc = random_scenario(1, 0, 2);
  Positions pos = random_positions(3, g.region);
  Precoder w = random_precoder(4, 1);

  CMat j = clutter_plus_noise(w, pos, sc, g);
  CHECK((j - sc.noise_radar * CMat::Identity(3, 3)).norm() < 1e-14);

  Scenario sc2 = random_scenario(1, 3, 2);
  CMat j2 = clutter_plus_noise(Precoder::Zero(4, 1), pos, sc2, g);
  CHECK((j2 - sc2.noise_radar * CMat::Identity(3, 3)).norm() < 1e-14);

  // N = M = 1, |alpha_1|^2 = 1, W = 1, sigma_0^2 = 1 -> J = 2.
  ArrayGeometry g1(1, 1, 0.0, 1, 0.0, 0.0075, 0.015);
  Scenario sc1 = bare_scenario(1.0);
  sc1.clutter_gain = CVec::Constant(1, cplx(1, 0));
  sc1.clutter_el = Vec::Constant(1, 0.4);
  sc1.clutter_az = Vec::Constant(1, 1.2);
  CMat j1 = clutter_plus_noise(Precoder::Constant(1, 1, cplx(1, 0)),
                               origin_positions(1), sc1, g1);
  CHECK(std::abs(j1(0, 0) - cplx(2, 0)) < 1e-12);
}

TEST_CASE("clutter covariance minus noise floor is Hermitian PSD") {
  auto g = small_geom(2, 2, 4);
  for (int t = 0; t < 25; ++t) {
    Scenario sc = random_scenario(2, 3, 2);
    Positions pos = random_positions(4, g.region);
    Precoder w = random_precoder(4, 2);
    CMat j = clutter_plus_noise(w, pos, sc, g);
    CHECK((j - j.adjoint()).norm() < 1e-10 * j.norm());
    Eigen::SelfAdjointEigenSolver<CMat> eig(j - sc.noise_radar * CMat::Identity(4, 4));
    CHECK(eig.eigenvalues().minCoeff() > -1e-10 * j.norm());
  }
}

TEST_CASE("scnr: zero precoder, clutter-free hand value, zero target gain") {
  ArrayGeometry g1(1, 1, 0.0, 2, 4 * 0.015, 0.0075, 0.015);
  Scenario sc = bare_scenario(0.5);
  Positions pos = random_positions(2, g1.region);

  CHECK(scnr(Precoder::Zero(1, 1), pos, sc, g1) == 0.0);

  // I=0, M=1, N=2, W=sqrt(P0): SCNR = 2 P0 / sigma_0^2.
  const double p0 = 3.0;
  Precoder w = Precoder::Constant(1, 1, cplx(std::sqrt(p0), 0));
  CHECK(scnr(w, pos, sc, g1) == doctest::Approx(2.0 * p0 / 0.5).epsilon(1e-12));

  Scenario sc0 = sc;
  sc0.target_gain = 0.0;
  CHECK(scnr(w, pos, sc0, g1) == 0.0);
}

TEST_CASE("scnr invariances: unitary right-multiplication and alpha0 scaling") {
  auto g = small_geom(2, 2, 3);
  for (int t = 0; t < 10; ++t) {
    Scenario sc = random_scenario(2, 3, 2);
    Positions pos = random_positions(3, g.region);
    Precoder w = random_precoder(4, 2);
    const double base = scnr(w, pos, sc, g);

    Eigen::HouseholderQR<CMat> qr(random_precoder(2, 2));
    CMat u = qr.householderQ();
    CHECK(scnr(w * u, pos, sc, g) ==
          doctest::Approx(base).epsilon(1e-9));

    Scenario sc2 = sc;
    sc2.target_gain *= 2.0;
    CHECK(scnr(w, pos, sc2, g) == doctest::Approx(4.0 * base).epsilon(1e-12));
  }
}

TEST_CASE("scnr trace form matches per-column optimal-filter ratios") {
  // Dual route: with v_k = J^{-1} A w_k, the filter SCNR summed over columns
  // equals the trace form.
  auto g = small_geom(2, 3, 4);
  for (int t = 0; t < 15; ++t) {
    Scenario sc = random_scenario(1, 4, 2);
    Positions pos = random_positions(4, g.region);
    Precoder w = random_precoder(6, 3);
    CMat j = clutter_plus_noise(w, pos, sc, g);
    CMat a = effective_matrix(sc.target_el, sc.target_az, pos, g);
    double filter_sum = 0.0;
    for (int k = 0; k < w.cols(); ++k) {
      CVec x = a * w.col(k);
      CVec v = j.llt().solve(x);
      const double num = std::norm((v.adjoint() * x)(0));
      const double den = (v.adjoint() * j * v)(0).real();
      filter_sum += std::norm(sc.target_gain) * num / den;
    }
    const double trace_form = scnr(w, pos, sc, g);
    CHECK(filter_sum == doctest::Approx(trace_form).epsilon(1e-8));
  }
}

TEST_CASE("sinr: single user, zero column, balanced two-user hand value") {
  auto g = small_geom(2, 2);
  Scenario sc = random_scenario(1, 0, 2);
  Precoder w = random_precoder(4, 1);
  CVec h = user_channel(0, sc, g);
  const double expect = std::norm((h.adjoint() * w.col(0))(0)) / sc.noise_user(0);
  CHECK(sinr(0, w, sc, g) == doctest::Approx(expect).epsilon(1e-12));

  CHECK(sinr(0, Precoder::Zero(4, 1), sc, g) == 0.0);

  // K=2 with equal cross terms and sigma^2 = |c|^2 gives SINR = 1/2.
  Scenario sc2 = random_scenario(2, 0, 1);
  CVec h1 = user_channel(0, sc2, g);
  Precoder w2(4, 2);
  w2.col(0) = h1 / h1.squaredNorm();  // h1^H w = 1
  w2.col(1) = w2.col(0);
  sc2.noise_user(0) = 1.0;
  CHECK(sinr(0, w2, sc2, g) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("geometry validation rejects impossible packings") {
  CHECK_THROWS_AS(ArrayGeometry(0, 2, 0.0075, 2, 0.03, 0.0075, 0.015),
                  std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry(2, 2, 0.0075, 2, 0.03, 0.0075, -1.0),
                  std::invalid_argument);
  // 9 antennas cannot fit a 1-lambda region at D = lambda/2 (3x3 grid max is
  // exactly 9; 10 must fail).
  CHECK_NOTHROW(ArrayGeometry(2, 2, 0.0075, 9, 0.015, 0.0075, 0.015));
  CHECK_THROWS_AS(ArrayGeometry(2, 2, 0.0075, 10, 0.015, 0.0075, 0.015),
                  std::invalid_argument);
}

TEST_CASE("positions feasibility predicate") {
  ArrayGeometry g(1, 1, 0.0, 2, 0.03, 0.0075, 0.015);
  Mat xy(2, 2);
  xy << 0.0, 0.0075, 0.0, 0.0;
  CHECK(Positions(xy).feasible(g));
  xy(0, 1) = 0.005;
  CHECK_FALSE(Positions(xy).feasible(g));
  xy(0, 1) = 0.05;  // outside the region
  CHECK_FALSE(Positions(xy).feasible(g));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "qwalk/lattice.hpp"
#include "qwalk/momentum.hpp"
#include "test_util.hpp"

using namespace qwalk;
namespace tu = qwalk::testutil;

namespace {
const double kPiD = kPi<double>;
using Cx = Complex<double>;

Vec4c<double> basis_vec(int c) {
  Vec4c<double> v = Vec4c<double>::Zero();
  v(c) = 1;
  return v;
}
}  // namespace

TEST_CASE("torus validation and indexing") {
  CHECK_THROWS_AS(Torus(1, 5), ValidationError);
  CHECK_THROWS_AS(Torus(5, 1), ValidationError);
  const Torus t(4, 3);
  CHECK(t.sites() == 12);
  CHECK(t.site_index(3, 2) == 11);
  CHECK(t.wrap_x(-1) == 3);
  CHECK(t.wrap_y(3) == 0);
}

TEST_CASE("localized state") {
  const Torus t(5, 5);
  const WalkState<double> s = localized_state(t, 2, 3, basis_vec(kCoinL));
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-14));
  int support = 0;
  for (Index i = 0; i < t.sites(); ++i)
    if (s.amps.col(i).norm() > 0) ++support;
  CHECK(support == 1);

  Vec4c<double> esc;
  esc << 0.5, -0.5, -0.5, 0.5;
  CHECK_NOTHROW(localized_state(t, 0, 0, esc));

  Vec4c<double> short_vec = 0.9 * basis_vec(kCoinL);
  CHECK_THROWS_AS(localized_state(t, 0, 0, short_vec), ValidationError);
  CHECK_THROWS_AS(localized_state(t, 5, 0, basis_vec(kCoinL)), ValidationError);
}

TEST_CASE("coin field rejects non-unitary matrices") {
  Mat4c<double> bad = Mat4c<double>::Identity();
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS((CoinField<double>(bad)), ValidationError);
  CoinField<double> cf(Mat4c<double>::Identity());
  CHECK_THROWS_AS(cf.set_site(0, 0, bad), ValidationError);
}

TEST_CASE("step with the SWAP coin moves an L walker left") {
  const Torus t(6, 6);
  const CoinField<double> cf(swap_gate<double>());
  const WalkState<double> s = localized_state(t, 3, 3, basis_vec(kCoinL));
  const WalkState<double> out = step(s, cf);
  CHECK(std::abs(out.amps(kCoinL, t.site_index(2, 3)) - Cx(1, 0)) < 1e-15);
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("step preserves the norm over 100 steps") {
  auto g = tu::rng(21);
  const Torus t(9, 7);
  const CoinField<double> cf(cclass_coin(tu::random_coin_params(g)));
  WalkState<double> s(t);
  for (Index i = 0; i < t.sites(); ++i) s.amps.col(i) = tu::random_unit_coin_vector(g);
  s.amps /= s.norm();
  s = evolve(s, cf, 100);
  CHECK(std::abs(s.norm() - 1.0) < 1e-12);
}

TEST_CASE("norm drift stays below 1e-9 over 1000 steps") {
  auto g = tu::rng(22);
  const Torus t(16, 16);
  const CoinField<double> cf(cclass_coin(tu::random_coin_params(g)));
  WalkState<double> s = localized_state(t, 0, 0, tu::random_unit_coin_vector(g));
  s = evolve(s, cf, 1000);
  CHECK(std::abs(s.norm() - 1.0) < 1e-9);
}

TEST_CASE("evolve with zero steps is the identity") {
  auto g = tu::rng(23);
  const Torus t(4, 4);
  const CoinField<double> cf(cclass_coin(tu::random_coin_params(g)));
  const WalkState<double> s = localized_state(t, 1, 2, tu::random_unit_coin_vector(g));
  const WalkState<double> out = evolve(s, cf, 0);
  CHECK(tu::max_abs_diff(out.amps, s.amps) == 0.0);
  CHECK_THROWS_AS(evolve(s, cf, -1), ValidationError);
}

TEST_CASE("translation covariance on homogeneous coins") {
  auto g = tu::rng(24);
  const Torus t(8, 8);
  const CoinField<double> cf(cclass_coin(tu::random_coin_params(g)));
  const Vec4c<double> v = tu::random_unit_coin_vector(g);

  const Index dx = 3, dy = 5;
  const WalkState<double> a = evolve(localized_state(t, 1, 2, v), cf, 7);
  const WalkState<double> b = evolve(localized_state(t, t.wrap_x(1 + dx), t.wrap_y(2 + dy), v),
                                     cf, 7);
  double worst = 0;
  for (Index y = 0; y < t.height; ++y)
    for (Index x = 0; x < t.width; ++x)
      worst = std::max(worst,
                       (b.amps.col(t.site_index(t.wrap_x(x + dx), t.wrap_y(y + dy))) -
                        a.amps.col(t.site_index(x, y)))
                           .cwiseAbs()
                           .maxCoeff());
  CHECK(worst < 1e-12);
}

TEST_CASE("plane waves evolve by the momentum-space eigenvalue") {
  // The momentum-(k,l) plane wave carries real-space amplitudes
  // e^{-i(kx+ly)} under this project's Fourier convention.
  auto g = tu::rng(25);
  const Torus t(12, 10);
  const Mat4c<double> coin = cclass_coin(tu::random_coin_params(g));
  const CoinField<double> cf(coin);

  for (const auto& [a, b] : {std::pair<int, int>{3, 7}, {0, 0}, {11, 4}}) {
    const double k = 2 * kPiD * a / double(t.width);
    const double l = 2 * kPiD * b / double(t.height);
    Eigen::ComplexEigenSolver<Mat4c<double>> solver(u_tilde(coin, k, l), true);
    REQUIRE(solver.info() == Eigen::Success);
    for (int band = 0; band < 4; ++band) {
      const Vec4c<double> v = solver.eigenvectors().col(band);
      const Cx lambda = solver.eigenvalues()(band);
      WalkState<double> s(t);
      for (Index y = 0; y < t.height; ++y)
        for (Index x = 0; x < t.width; ++x)
          s.amps.col(t.site_index(x, y)) =
              std::polar(1.0, -(k * double(x) + l * double(y))) * v;
      s.amps /= s.norm();
      const Mat4Xc<double> expected = lambda * s.amps;
      const WalkState<double> out = step(s, cf);
      CHECK(tu::max_abs_diff(out.amps, expected) < 1e-10);
    }
  }
}

TEST_CASE("position distribution") {
  const Torus t(5, 4);
  const WalkState<double> s = localized_state(t, 2, 1, basis_vec(kCoinU));
  const MatX<double> p = position_distribution(s);
  CHECK(p(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));

  auto g = tu::rng(26);
  const CoinField<double> cf(cclass_coin(tu::random_coin_params(g)));
  const MatX<double> q = position_distribution(evolve(s, cf, 9));
  CHECK(q.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(q.minCoeff() >= 0.0);
}

TEST_CASE("Grover walk traps a non-escaping initial state") {
  // Frozen via an independent dense-evolution implementation of the same
  // conventions (numpy prototype); the paper states the trapping only
  // qualitatively.
  const Torus t(81, 81);
  const CoinField<double> cf(grover_coin<double>());
  const WalkState<double> out = evolve(localized_state(t, 0, 0, basis_vec(kCoinL)), cf, 40);
  const double p0 = out.amps.col(t.site_index(0, 0)).squaredNorm();
  CHECK(p0 == doctest::Approx(0.34046870587953737).epsilon(1e-9));
  CHECK(p0 > 0.1);
}

TEST_CASE("performance case: 40 steps on a 10x80 torus") {
  const Torus t(10, 80);
  const CoinField<double> cf(cclass_coin(transformed_grover_params<double>()));
  WalkState<double> s = localized_state(t, 0, 0, basis_vec(kCoinR));
  s = evolve(s, cf, 40);
  CHECK(std::abs(s.norm() - 1.0) < 1e-10);
}

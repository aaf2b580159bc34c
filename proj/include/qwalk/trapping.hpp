#pragma once

// Closed-form localized eigenstates and revival states of the coin class,
// the T-step return-probability quadratic form, its exact minimizer, the
// closed-form escaping state, and the (delta1, delta2) trapping map.

#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "qwalk/coin.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

// Stationary eigenstate with eigenvalue sign (= +1 or -1), supported on the
// plaquette (x,y), (x,y+1), (x+1,y), (x+1,y+1). The printed 1/2 prefactor
// already normalizes it.
template <class Scalar>
WalkState<Scalar> stationary_state(const CoinParams<Scalar>& p, const Torus& t, Index x, Index y,
                                   int sign) {
  if (!finite(p)) throw ValidationError("stationary_state: non-finite parameter");
  if (sign != 1 && sign != -1) throw ValidationError("stationary_state: sign must be +-1");
  const Scalar half(0.5);
  const Scalar s1 = std::sin(p.c1.delta), c1 = std::cos(p.c1.delta);
  const Scalar s2 = std::sin(p.c2.delta), c2 = std::cos(p.c2.delta);
  const Scalar sg(sign);

  WalkState<Scalar> st(t);
  const Index x0 = t.wrap_x(x), y0 = t.wrap_y(y);
  const Index x1 = t.wrap_x(x + 1), y1 = t.wrap_y(y + 1);

  auto& a = st.amps;
  a(kCoinL, t.site_index(x0, y0)) += half * (-std::polar(Scalar(1), -p.c1.beta) * s1);
  a(kCoinD, t.site_index(x0, y0)) += half * (-std::polar(Scalar(1), -p.c1.alpha) * c1);

  a(kCoinL, t.site_index(x0, y1)) += half * sg * (-std::polar(Scalar(1), -p.c2.beta) * s2);
  a(kCoinU, t.site_index(x0, y1)) += half * sg * (-std::polar(Scalar(1), -p.c2.alpha) * c2);

  a(kCoinD, t.site_index(x1, y0)) += half * sg * (std::polar(Scalar(1), p.c2.alpha) * c2);
  a(kCoinR, t.site_index(x1, y0)) += half * sg * (-std::polar(Scalar(1), p.c2.beta + p.phi) * s2);

  a(kCoinU, t.site_index(x1, y1)) += half * (std::polar(Scalar(1), p.c1.alpha) * c1);
  a(kCoinR, t.site_index(x1, y1)) += half * (-std::polar(Scalar(1), p.c1.beta + p.phi) * s1);
  return st;
}

// (|psi_{+1}> + sign |psi_{-1}>) / sqrt(2); revives after two steps.
template <class Scalar>
WalkState<Scalar> revival_state(const CoinParams<Scalar>& p, const Torus& t, Index x, Index y,
                                int sign) {
  if (sign != 1 && sign != -1) throw ValidationError("revival_state: sign must be +-1");
  WalkState<Scalar> plus = stationary_state(p, t, x, y, +1);
  const WalkState<Scalar> minus = stationary_state(p, t, x, y, -1);
  plus.amps = (plus.amps + Scalar(sign) * minus.amps) / std::sqrt(Scalar(2));
  return plus;
}

// Gram matrix M = A^dagger A of the T-step return amplitudes: column j of A
// holds the origin-site amplitudes of the walk started in coin basis state
// e_j, so c^dagger M c is the T-step return probability of coin state c.
// The torus must hold the light cone without aliasing: min(L, M) >= 2T + 1.
template <class Scalar>
Mat4c<Scalar> return_matrix(const Mat4c<Scalar>& coin, int steps, const Torus& t) {
  if (steps < 0) throw ValidationError("return_matrix: negative step count");
  if (std::min(t.width, t.height) < 2 * static_cast<Index>(steps) + 1)
    throw ValidationError("return_matrix: torus too small, light cone would wrap");
  const CoinField<Scalar> cf(coin);
  const Index origin = t.site_index(0, 0);
  Mat4c<Scalar> a;
  for (int j = 0; j < 4; ++j) {
    Vec4c<Scalar> e = Vec4c<Scalar>::Zero();
    e(j) = Scalar(1);
    const WalkState<Scalar> out = evolve(localized_state(t, 0, 0, e), cf, steps);
    a.col(j) = out.amps.col(origin);
  }
  Mat4c<Scalar> m = a.adjoint() * a;
  m = ((m + m.adjoint()) / Scalar(2)).eval();  // clean Hermitizing for the solver
  return m;
}

template <class Scalar>
struct MinReturn {
  Scalar probability;
  Vec4c<Scalar> coin_state;  // minimizing initial coin state
};

// Exact global minimum of the return probability over unit coin states:
// the smallest eigenvalue and eigenvector of the Gram matrix.
template <class Scalar>
MinReturn<Scalar> min_return_probability(const Mat4c<Scalar>& coin, int steps, const Torus& t) {
  const Mat4c<Scalar> m = return_matrix(coin, steps, t);
  Eigen::SelfAdjointEigenSolver<Mat4c<Scalar>> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericalError("min_return_probability: eigensolver failed");
  const Scalar lam = std::max(solver.eigenvalues()(0), Scalar(0));
  return {lam, solver.eigenvectors().col(0)};
}

// Closed-form escaping coin state, valid when cos 2 delta1 = cos 2 delta2 on
// the branch delta2 = delta1 + k pi.
template <class Scalar>
Vec4c<Scalar> escaping_state(const CoinParams<Scalar>& p, Scalar condition_tol = Scalar(1e-9)) {
  if (!finite(p)) throw ValidationError("escaping_state: non-finite parameter");
  const Scalar lhs = std::cos(2 * p.c1.delta), rhs = std::cos(2 * p.c2.delta);
  if (std::abs(lhs - rhs) > condition_tol)
    throw NotWeaklyTrappingError("escaping_state: cos 2 delta1 != cos 2 delta2");
  const Scalar d_plus = std::abs(std::remainder(p.c2.delta - p.c1.delta, kPi<Scalar>));
  const Scalar d_minus = std::abs(std::remainder(p.c2.delta + p.c1.delta, kPi<Scalar>));
  if (d_plus > d_minus)
    throw UnsupportedBranchError(
        "escaping_state: delta2 = -delta1 + k pi branch has no closed form; "
        "use min_return_probability's minimizer");

  const Scalar c = std::cos(p.c1.delta), s = std::sin(p.c1.delta);
  const Scalar a1 = p.c1.alpha, b1 = p.c1.beta, a2 = p.c2.alpha, b2 = p.c2.beta;
  Vec4c<Scalar> v;
  v(kCoinL) = std::polar(Scalar(1), -b1) * c;
  v(kCoinD) = -std::polar(Scalar(1), -a1) * s;
  v(kCoinU) = -std::polar(Scalar(1), -(a2 + b1 - b2)) * s;
  v(kCoinR) = -std::polar(Scalar(1), -(a1 + a2 - b2 - p.phi)) * c;
  return v / std::sqrt(Scalar(2));
}

// Minimum return probability swept over a (delta1, delta2) grid with all
// other coin parameters held fixed.
template <class Scalar>
struct TrapMapConfig {
  int n1 = 46;
  int n2 = 46;
  Scalar d1_min = 0, d1_max = kPi<Scalar>;
  Scalar d2_min = 0, d2_max = kPi<Scalar>;
  Scalar alpha1 = kPi<Scalar> / 2, beta1 = kPi<Scalar> / 2;
  Scalar alpha2 = kPi<Scalar> / 2, beta2 = kPi<Scalar> / 2;
  Scalar phi = kPi<Scalar>;
  int steps = 40;
  Index torus_width = 81, torus_height = 81;

  Scalar d1_at(int i) const { return d1_min + (d1_max - d1_min) * Scalar(i) / Scalar(n1 - 1); }
  Scalar d2_at(int j) const { return d2_min + (d2_max - d2_min) * Scalar(j) / Scalar(n2 - 1); }
  CoinParams<Scalar> coin_at(int i, int j) const {
    return {{alpha1, beta1, d1_at(i)}, {alpha2, beta2, d2_at(j)}, phi};
  }
};

template <class Scalar>
struct TrapMapResult {
  TrapMapConfig<Scalar> config;
  MatX<Scalar> min_prob;  // n1 x n2, row = delta1 index
};

template <class Scalar>
TrapMapResult<Scalar> trap_map(const TrapMapConfig<Scalar>& cfg, unsigned threads = 0) {
  if (cfg.n1 < 2 || cfg.n2 < 2) throw ValidationError("trap_map: grid must be >= 2 per axis");
  const Torus t(cfg.torus_width, cfg.torus_height);
  TrapMapResult<Scalar> res{cfg, MatX<Scalar>(cfg.n1, cfg.n2)};
  parallel_for(static_cast<Index>(cfg.n1) * cfg.n2, [&](Index p) {
    const int i = static_cast<int>(p / cfg.n2);
    const int j = static_cast<int>(p % cfg.n2);
    const Mat4c<Scalar> coin = cclass_coin(cfg.coin_at(i, j));
    res.min_prob(i, j) = min_return_probability(coin, cfg.steps, t).probability;
  }, threads);
  return res;
}

}  // namespace qwalk

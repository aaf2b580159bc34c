#pragma once

// Coin operators of the trapping walk family: SU(2) blocks, the SWAP and
// controlled-phase gates, the 7-parameter coin class built from them, and
// the fixed coins (Grover, marked-vertex) used by the search experiment.

#include <cmath>

#include "qwalk/types.hpp"

namespace qwalk {

template <class Scalar>
struct Su2Params {
  Scalar alpha{};
  Scalar beta{};
  Scalar delta{};
};

template <class Scalar>
struct CoinParams {
  Su2Params<Scalar> c1;
  Su2Params<Scalar> c2;
  Scalar phi{};
};

template <class Scalar>
bool finite(const Su2Params<Scalar>& p) {
  return std::isfinite(p.alpha) && std::isfinite(p.beta) && std::isfinite(p.delta);
}

template <class Scalar>
bool finite(const CoinParams<Scalar>& p) {
  return finite(p.c1) && finite(p.c2) && std::isfinite(p.phi);
}

// [[e^{-ia} cos d, -e^{-ib} sin d], [e^{ib} sin d, e^{ia} cos d]]; det = 1.
template <class Scalar>
Mat2c<Scalar> su2_matrix(const Su2Params<Scalar>& p) {
  if (!finite(p)) throw ValidationError("su2_matrix: non-finite parameter");
  using C = Complex<Scalar>;
  const Scalar c = std::cos(p.delta);
  const Scalar s = std::sin(p.delta);
  const C ea = std::polar(Scalar(1), p.alpha);
  const C eb = std::polar(Scalar(1), p.beta);
  Mat2c<Scalar> m;
  m << std::conj(ea) * c, -std::conj(eb) * s, eb * s, ea * c;
  return m;
}

// W = |L><L| + |D><U| + |U><D| + |R><R|; W = W^-1 = W^dagger.
template <class Scalar>
Mat4c<Scalar> swap_gate() {
  Mat4c<Scalar> w = Mat4c<Scalar>::Zero();
  w(kCoinL, kCoinL) = Scalar(1);
  w(kCoinD, kCoinU) = Scalar(1);
  w(kCoinU, kCoinD) = Scalar(1);
  w(kCoinR, kCoinR) = Scalar(1);
  return w;
}

// P(phi) = Diag(1, 1, 1, e^{i phi}).
template <class Scalar>
Mat4c<Scalar> phase_gate(Scalar phi) {
  if (!std::isfinite(phi)) throw ValidationError("phase_gate: non-finite parameter");
  Mat4c<Scalar> p = Mat4c<Scalar>::Identity();
  p(kCoinR, kCoinR) = std::polar(Scalar(1), phi);
  return p;
}

// Kronecker product of two 2x2 blocks in the (L,D,U,R) <-> two-qubit ordering.
template <class DerivedA, class DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, 4, 4> tensor_product(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  static_assert(DerivedA::RowsAtCompileTime == 2 && DerivedA::ColsAtCompileTime == 2);
  static_assert(DerivedB::RowsAtCompileTime == 2 && DerivedB::ColsAtCompileTime == 2);
  Eigen::Matrix<typename DerivedA::Scalar, 4, 4> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.template block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// C = P(phi) (C1 x C2) P(-phi) W, the 7-parameter trapping coin class.
template <class Scalar>
Mat4c<Scalar> cclass_coin(const CoinParams<Scalar>& p) {
  if (!finite(p)) throw ValidationError("cclass_coin: non-finite parameter");
  const Mat4c<Scalar> kron = tensor_product(su2_matrix(p.c1), su2_matrix(p.c2));
  return phase_gate(p.phi) * kron * phase_gate(-p.phi) * swap_gate<Scalar>();
}

// Grover diffusion coin, entries 1/2 - delta_ij.
template <class Scalar>
Mat4c<Scalar> grover_coin() {
  Mat4c<Scalar> g = Mat4c<Scalar>::Constant(Complex<Scalar>(Scalar(0.5), 0));
  g.diagonal().array() -= Scalar(1);
  return g;
}

template <class Scalar>
Mat2c<Scalar> pauli_x() {
  Mat2c<Scalar> s;
  s << Scalar(0), Scalar(1), Scalar(1), Scalar(0);
  return s;
}

// Marked-vertex coin of the search walk: -sigma_x (x) sigma_x.
template <class Scalar>
Mat4c<Scalar> marked_coin() {
  return Mat4c<Scalar>(-tensor_product(pauli_x<Scalar>(), pauli_x<Scalar>()));
}

// Max-norm residual of C^dagger C - I.
template <class Derived>
typename Derived::RealScalar unitarity_residual(const Eigen::MatrixBase<Derived>& m) {
  using MatT = Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime,
                             Derived::ColsAtCompileTime>;
  MatT res = m.adjoint() * m;
  res -= MatT::Identity(m.rows(), m.cols());
  return res.cwiseAbs().maxCoeff();
}

// Coin parameters of the Grover point, delta1 = delta2 = pi/4, alphas = betas = pi/2, phi = pi.
template <class Scalar>
CoinParams<Scalar> grover_params() {
  const Scalar h = kPi<Scalar> / 2;
  const Scalar q = kPi<Scalar> / 4;
  return CoinParams<Scalar>{{h, h, q}, {h, h, q}, kPi<Scalar>};
}

// Parameters of the transformed Grover coin C^G (sigma_x x sigma_x) used by
// the original spatial search: alpha1 = beta2 = pi/2, alpha2 = beta1 = -pi/2.
template <class Scalar>
CoinParams<Scalar> transformed_grover_params() {
  const Scalar h = kPi<Scalar> / 2;
  const Scalar q = kPi<Scalar> / 4;
  return CoinParams<Scalar>{{h, -h, q}, {-h, h, q}, kPi<Scalar>};
}

}  // namespace qwalk

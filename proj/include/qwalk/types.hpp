#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qwalk {

template <class Scalar> using Complex = std::complex<Scalar>;
template <class Scalar> using Mat2c = Eigen::Matrix<Complex<Scalar>, 2, 2>;
template <class Scalar> using Mat4c = Eigen::Matrix<Complex<Scalar>, 4, 4>;
template <class Scalar> using Vec4c = Eigen::Matrix<Complex<Scalar>, 4, 1>;
template <class Scalar> using Mat4Xc = Eigen::Matrix<Complex<Scalar>, 4, Eigen::Dynamic>;
template <class Scalar> using MatXc = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar> using VecXc = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;
template <class Scalar> using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar> using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

// Coin basis order, fixed globally: (L, D, U, R) = (|00>, |01>, |10>, |11>).
inline constexpr int kCoinL = 0;
inline constexpr int kCoinD = 1;
inline constexpr int kCoinU = 2;
inline constexpr int kCoinR = 3;
inline constexpr int kCoinDim = 4;

template <class Scalar>
inline constexpr Scalar kPi = std::numbers::pi_v<Scalar>;

// Error taxonomy; the CLI maps these onto exit codes 1/2/3.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eq. (12) violated: no localized escaping state exists.
struct NotWeaklyTrappingError : ValidationError {
  using ValidationError::ValidationError;
};
// Eq. (12) holds on the delta2 = -delta1 + k*pi branch, for which no closed
// form is available; callers should fall back to min_return_probability.
struct UnsupportedBranchError : ValidationError {
  using ValidationError::ValidationError;
};
// Edge-state detection requested on a gapless bulk pair.
struct NoGapError : ValidationError {
  using ValidationError::ValidationError;
};

// Phase of a unit-modulus complex number, branch (-pi, pi].
template <class Scalar>
Scalar principal_phase(const Complex<Scalar>& z) {
  Scalar w = std::arg(z);
  if (w <= -kPi<Scalar>) w = kPi<Scalar>;
  return w;
}

// Distance between two angles on the circle, in [0, pi].
template <class Scalar>
Scalar circular_distance(Scalar a, Scalar b) {
  return std::abs(std::remainder(a - b, Scalar(2) * kPi<Scalar>));
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace qwalk

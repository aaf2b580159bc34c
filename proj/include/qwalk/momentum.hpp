#pragma once

// Momentum-space one-step operator, quasi-energy band structure, flat-band
// and gap diagnostics, and the split-step comparison.

#include <algorithm>
#include <array>
#include <string>

#include <Eigen/Eigenvalues>

#include "qwalk/coin.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

// Uniform grid k_a = 2 pi a / nk - pi, l_b = 2 pi b / nl - pi.
// Point index p = b * nk + a.
struct MomentumGrid {
  int nk;
  int nl;

  MomentumGrid(int nk_, int nl_) : nk(nk_), nl(nl_) {
    if (nk < 2 || nl < 2) throw ValidationError("MomentumGrid: nk, nl must be >= 2");
  }

  Index points() const { return static_cast<Index>(nk) * nl; }

  template <class Scalar>
  Scalar k_at(int a) const {
    return Scalar(2) * kPi<Scalar> * Scalar(a) / Scalar(nk) - kPi<Scalar>;
  }
  template <class Scalar>
  Scalar l_at(int b) const {
    return Scalar(2) * kPi<Scalar> * Scalar(b) / Scalar(nl) - kPi<Scalar>;
  }
};

// D~ = Diag(e^{-ik}, e^{-il}, e^{il}, e^{ik}).
template <class Scalar>
Mat4c<Scalar> shift_diag(Scalar k, Scalar l) {
  Mat4c<Scalar> d = Mat4c<Scalar>::Zero();
  d(kCoinL, kCoinL) = std::polar(Scalar(1), -k);
  d(kCoinD, kCoinD) = std::polar(Scalar(1), -l);
  d(kCoinU, kCoinU) = std::polar(Scalar(1), l);
  d(kCoinR, kCoinR) = std::polar(Scalar(1), k);
  return d;
}

// U~ = D~ C.
template <class Scalar>
Mat4c<Scalar> u_tilde(const Mat4c<Scalar>& coin, Scalar k, Scalar l) {
  return shift_diag(k, l) * coin;
}

enum class BandFlag : int { kDispersive = 0, kFlatZero = 1, kFlatPi = 2 };

// Eigenphases of U~ over a momentum grid, sorted ascending in (-pi, pi] per
// point. At each point the eigenvalue closest to +1 is flagged kFlatZero and
// the closest remaining one to -1 kFlatPi; whether the coin really is
// trapping is judged from the recorded deviations, never by reassignment.
template <class Scalar>
struct BandStructure {
  MomentumGrid grid;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 4> omegas;
  Eigen::Matrix<int, Eigen::Dynamic, 4> flags;
  Scalar max_flat_dev_zero = 0;  // max |lambda - 1| over grid, flagged band
  Scalar max_flat_dev_pi = 0;    // max |lambda + 1| over grid, flagged band
};

template <class Scalar>
std::array<Complex<Scalar>, 4> eigenvalues4(const Mat4c<Scalar>& m, const std::string& where) {
  Eigen::ComplexEigenSolver<Mat4c<Scalar>> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed at " + where);
  std::array<Complex<Scalar>, 4> ev;
  for (int i = 0; i < 4; ++i) ev[i] = solver.eigenvalues()(i);
  return ev;
}

template <class Scalar>
BandStructure<Scalar> band_structure(const Mat4c<Scalar>& coin, const MomentumGrid& g,
                                     unsigned threads = 0) {
  BandStructure<Scalar> b{g,
                          Eigen::Matrix<Scalar, Eigen::Dynamic, 4>(g.points(), 4),
                          Eigen::Matrix<int, Eigen::Dynamic, 4>(g.points(), 4), 0, 0};
  VecX<Scalar> dev0(g.points()), devp(g.points());

  parallel_for(g.points(), [&](Index p) {
    const int a = static_cast<int>(p % g.nk);
    const int bidx = static_cast<int>(p / g.nk);
    const Scalar k = g.k_at<Scalar>(a);
    const Scalar l = g.l_at<Scalar>(bidx);
    const auto ev = eigenvalues4(u_tilde(coin, k, l),
                                 "(k,l)=(" + std::to_string(k) + "," + std::to_string(l) + ")");

    int i0 = 0, ip = -1;
    for (int i = 1; i < 4; ++i)
      if (std::abs(ev[i] - Scalar(1)) < std::abs(ev[i0] - Scalar(1))) i0 = i;
    for (int i = 0; i < 4; ++i) {
      if (i == i0) continue;
      if (ip < 0 || std::abs(ev[i] + Scalar(1)) < std::abs(ev[ip] + Scalar(1))) ip = i;
    }
    dev0(p) = std::abs(ev[i0] - Scalar(1));
    devp(p) = std::abs(ev[ip] + Scalar(1));

    std::array<std::pair<Scalar, int>, 4> rows;
    for (int i = 0; i < 4; ++i) {
      const int flag = (i == i0)   ? static_cast<int>(BandFlag::kFlatZero)
                       : (i == ip) ? static_cast<int>(BandFlag::kFlatPi)
                                   : static_cast<int>(BandFlag::kDispersive);
      rows[i] = {principal_phase(ev[i]), flag};
    }
    std::sort(rows.begin(), rows.end());
    for (int i = 0; i < 4; ++i) {
      b.omegas(p, i) = rows[i].first;
      b.flags(p, i) = rows[i].second;
    }
  }, threads);

  b.max_flat_dev_zero = dev0.maxCoeff();
  b.max_flat_dev_pi = devp.maxCoeff();
  return b;
}

template <class Scalar>
struct FlatBandReport {
  bool flat;
  Scalar max_deviation;
};

// True iff at every grid point one eigenvalue lies within tol of +1 and one
// within tol of -1, as complex numbers. tol = 0 always fails in floating
// point and is allowed for exactly that documented purpose.
template <class Scalar>
FlatBandReport<Scalar> flat_band_check(const Mat4c<Scalar>& coin, const MomentumGrid& g,
                                       Scalar tol, unsigned threads = 0) {
  if (!(tol >= 0)) throw ValidationError("flat_band_check: tol must be non-negative");
  const BandStructure<Scalar> b = band_structure(coin, g, threads);
  const Scalar dev = std::max(b.max_flat_dev_zero, b.max_flat_dev_pi);
  return {dev <= tol, dev};
}

template <class Scalar>
struct GapWidths {
  Scalar gap0;
  Scalar gapPi;
};

// Minimal circular distance of the dispersive eigenphases from 0 and pi.
template <class Scalar>
GapWidths<Scalar> gap_widths(const BandStructure<Scalar>& b) {
  Scalar g0 = kPi<Scalar>, gp = kPi<Scalar>;
  for (Index p = 0; p < b.omegas.rows(); ++p)
    for (int i = 0; i < 4; ++i) {
      if (b.flags(p, i) != static_cast<int>(BandFlag::kDispersive)) continue;
      g0 = std::min(g0, circular_distance(b.omegas(p, i), Scalar(0)));
      gp = std::min(gp, circular_distance(b.omegas(p, i), kPi<Scalar>));
    }
  return {g0, gp};
}

// Split-step one-step operator in momentum space:
// Diag(e^{-i(k-l)/2}, e^{i(k-l)/2}) C2 Diag(e^{-i(k+l)/2}, e^{i(k+l)/2}) C1.
template <class Scalar>
Mat2c<Scalar> splitstep_u(const Mat2c<Scalar>& c1, const Mat2c<Scalar>& c2, Scalar k, Scalar l) {
  Mat2c<Scalar> dm = Mat2c<Scalar>::Zero();
  dm(0, 0) = std::polar(Scalar(1), -(k - l) / 2);
  dm(1, 1) = std::polar(Scalar(1), (k - l) / 2);
  Mat2c<Scalar> dp = Mat2c<Scalar>::Zero();
  dp(0, 0) = std::polar(Scalar(1), -(k + l) / 2);
  dp(1, 1) = std::polar(Scalar(1), (k + l) / 2);
  return dm * c2 * dp * c1;
}

// Max circular deviation, over the grid, between the split-step eigenphase
// pair and the dispersive eigenphase pair of the phi = 0 coin-class walk,
// compared as multisets.
template <class Scalar>
Scalar spectral_match(const CoinParams<Scalar>& p, const MomentumGrid& g,
                      Scalar flat_tol = Scalar(1e-8), unsigned threads = 0) {
  if (!finite(p)) throw ValidationError("spectral_match: non-finite parameter");
  if (p.phi != Scalar(0)) throw ValidationError("spectral_match: requires phi = 0");
  const Mat4c<Scalar> coin = cclass_coin(p);
  const Mat2c<Scalar> c1 = su2_matrix(p.c1);
  const Mat2c<Scalar> c2 = su2_matrix(p.c2);

  VecX<Scalar> dev(g.points());
  parallel_for(g.points(), [&](Index pt) {
    const int a = static_cast<int>(pt % g.nk);
    const int bidx = static_cast<int>(pt / g.nk);
    const Scalar k = g.k_at<Scalar>(a);
    const Scalar l = g.l_at<Scalar>(bidx);
    const auto ev = eigenvalues4(u_tilde(coin, k, l), "spectral_match grid point");

    int i0 = 0, ip = -1;
    for (int i = 1; i < 4; ++i)
      if (std::abs(ev[i] - Scalar(1)) < std::abs(ev[i0] - Scalar(1))) i0 = i;
    for (int i = 0; i < 4; ++i) {
      if (i == i0) continue;
      if (ip < 0 || std::abs(ev[i] + Scalar(1)) < std::abs(ev[ip] + Scalar(1))) ip = i;
    }
    if (std::abs(ev[i0] - Scalar(1)) > flat_tol || std::abs(ev[ip] + Scalar(1)) > flat_tol)
      throw NumericalError("spectral_match: flat bands not found");
    std::array<Scalar, 2> w;
    int n = 0;
    for (int i = 0; i < 4; ++i)
      if (i != i0 && i != ip) w[n++] = principal_phase(ev[i]);

    Eigen::ComplexEigenSolver<Mat2c<Scalar>> s2(splitstep_u(c1, c2, k, l), false);
    if (s2.info() != Eigen::Success) throw NumericalError("spectral_match: 2x2 eigensolver failed");
    const Scalar v0 = principal_phase<Scalar>(s2.eigenvalues()(0));
    const Scalar v1 = principal_phase<Scalar>(s2.eigenvalues()(1));

    const Scalar straight =
        std::max(circular_distance(w[0], v0), circular_distance(w[1], v1));
    const Scalar crossed =
        std::max(circular_distance(w[0], v1), circular_distance(w[1], v0));
    dev(pt) = std::min(straight, crossed);
  }, threads);
  return dev.maxCoeff();
}

}  // namespace qwalk

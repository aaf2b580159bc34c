#pragma once

// Real-space walk states on finite tori and the coined-shift evolution.
//
// Conventions (fixed project-wide):
//   - amplitude storage: coin index fastest, then x, then y
//     (column s = y*width + x of a 4 x (width*height) matrix);
//   - step = coin application followed by the shift
//     L -> (x-1, y), D -> (x, y-1), U -> (x, y+1), R -> (x+1, y)
//     with periodic wraparound, matching U = S (I x C) and
//     D~ = Diag(e^{-ik}, e^{-il}, e^{il}, e^{ik}) under the Fourier
//     convention psi~(k,l) = sum e^{i(kx+ly)} psi(x,y).

#include <cmath>
#include <utility>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

struct Torus {
  Index width;   // x extent
  Index height;  // y extent

  Torus(Index w, Index h) : width(w), height(h) {
    if (w < 2 || h < 2) throw ValidationError("Torus: extents must be >= 2");
  }

  Index sites() const { return width * height; }
  Index site_index(Index x, Index y) const { return y * width + x; }
  Index wrap_x(Index x) const { return ((x % width) + width) % width; }
  Index wrap_y(Index y) const { return ((y % height) + height) % height; }

  bool operator==(const Torus& o) const { return width == o.width && height == o.height; }
};

template <class Scalar>
struct WalkState {
  Torus torus;
  Mat4Xc<Scalar> amps;  // 4 x sites, column = site index

  explicit WalkState(const Torus& t) : torus(t), amps(Mat4Xc<Scalar>::Zero(4, t.sites())) {}

  Scalar norm() const { return amps.norm(); }
};

// Site-dependent coin assignment: one default coin plus sparse per-site
// overrides (e.g. the marked vertex, or a fully disordered field).
template <class Scalar>
class CoinField {
 public:
  explicit CoinField(const Mat4c<Scalar>& default_coin, Scalar unitary_tol = Scalar(1e-12))
      : default_(default_coin), tol_(unitary_tol) {
    check_unitary(default_coin);
  }

  // Later entries win if a site is set twice.
  void set_site(Index x, Index y, const Mat4c<Scalar>& coin) {
    check_unitary(coin);
    overrides_.push_back({x, y, coin});
  }

  const Mat4c<Scalar>& default_coin() const { return default_; }
  const std::vector<std::tuple<Index, Index, Mat4c<Scalar>>>& overrides() const {
    return overrides_;
  }
  bool homogeneous() const { return overrides_.empty(); }

  // Coin application, all sites: out = C_site * psi_site.
  void apply(const Torus& t, const Mat4Xc<Scalar>& in, Mat4Xc<Scalar>& out) const {
    out.noalias() = default_ * in;
    for (const auto& [x, y, coin] : overrides_) {
      const Index s = t.site_index(t.wrap_x(x), t.wrap_y(y));
      out.col(s).noalias() = coin * in.col(s);
    }
  }

 private:
  void check_unitary(const Mat4c<Scalar>& c) const {
    if (!all_finite(c) || unitarity_residual(c) > tol_)
      throw ValidationError("CoinField: coin matrix is not unitary");
  }

  Mat4c<Scalar> default_;
  Scalar tol_;
  std::vector<std::tuple<Index, Index, Mat4c<Scalar>>> overrides_;
};

// |x0>_P (x) coin_vec, coin_vec a unit 4-vector.
template <class Scalar>
WalkState<Scalar> localized_state(const Torus& t, Index x0, Index y0,
                                  const Vec4c<Scalar>& coin_vec) {
  if (!all_finite(coin_vec) || std::abs(coin_vec.norm() - Scalar(1)) > Scalar(1e-12))
    throw ValidationError("localized_state: coin vector is not unit norm");
  if (x0 < 0 || x0 >= t.width || y0 < 0 || y0 >= t.height)
    throw ValidationError("localized_state: position outside torus");
  WalkState<Scalar> s(t);
  s.amps.col(t.site_index(x0, y0)) = coin_vec;
  return s;
}

// One walk step; writes to a fresh buffer, so results do not depend on any
// traversal order.
template <class Scalar>
WalkState<Scalar> step(const WalkState<Scalar>& s, const CoinField<Scalar>& cf) {
  const Torus& t = s.torus;
  const Index w = t.width, h = t.height;
  Mat4Xc<Scalar> coined(4, t.sites());
  cf.apply(t, s.amps, coined);

  WalkState<Scalar> out(t);
  for (Index y = 0; y < h; ++y) {
    const Index yd = (y + 1 == h) ? 0 : y + 1;   // source row for D
    const Index yu = (y == 0) ? h - 1 : y - 1;   // source row for U
    for (Index x = 0; x < w; ++x) {
      const Index xl = (x + 1 == w) ? 0 : x + 1;  // source column for L
      const Index xr = (x == 0) ? w - 1 : x - 1;  // source column for R
      const Index d = t.site_index(x, y);
      out.amps(kCoinL, d) = coined(kCoinL, t.site_index(xl, y));
      out.amps(kCoinD, d) = coined(kCoinD, t.site_index(x, yd));
      out.amps(kCoinU, d) = coined(kCoinU, t.site_index(x, yu));
      out.amps(kCoinR, d) = coined(kCoinR, t.site_index(xr, y));
    }
  }
  return out;
}

template <class Scalar>
WalkState<Scalar> evolve(WalkState<Scalar> s, const CoinField<Scalar>& cf, int steps) {
  if (steps < 0) throw ValidationError("evolve: negative step count");
  for (int i = 0; i < steps; ++i) s = step(s, cf);
  return s;
}

// p(x, y) = sum_c |psi(x, y, c)|^2, returned as a height x width matrix.
template <class Scalar>
MatX<Scalar> position_distribution(const WalkState<Scalar>& s) {
  const Torus& t = s.torus;
  MatX<Scalar> p(t.height, t.width);
  for (Index y = 0; y < t.height; ++y)
    for (Index x = 0; x < t.width; ++x)
      p(y, x) = s.amps.col(t.site_index(x, y)).squaredNorm();
  return p;
}

}  // namespace qwalk

#pragma once

// Strip geometry with two bulk regions on a transverse-periodic torus,
// edge-state detection inside the bulk gaps, and the (delta1, delta2)
// topological map.
//
// The momentum axis is x (k stays a good quantum number); the transverse
// axis is y, periodic, so the strip has two interfaces: between the wrap
// seam (y = Ny-1 | y = 0, interface 0) and between the regions
// (y = widthA-1 | y = widthA, interface 1).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qwalk/coin.hpp"
#include "qwalk/momentum.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

template <class Scalar>
struct StripConfig {
  CoinParams<Scalar> coin_a;
  CoinParams<Scalar> coin_b;
  int width_a = 20;
  int width_b = 20;

  int transverse_sites() const { return width_a + width_b; }
  int dim() const { return 4 * transverse_sites(); }
};

// One-step operator at fixed momentum k: per-site coin (A or B by region),
// then the shift. x displacements contribute phases e^{-+ik} (L/R rows);
// D and U move between transverse sites with periodic wrap.
template <class Scalar>
MatXc<Scalar> strip_operator(const StripConfig<Scalar>& cfg, Scalar k) {
  if (cfg.width_a < 1 || cfg.width_b < 1)
    throw ValidationError("strip_operator: region widths must be >= 1");
  const int ny = cfg.transverse_sites();
  const int n = cfg.dim();
  const Mat4c<Scalar> ca = cclass_coin(cfg.coin_a);
  const Mat4c<Scalar> cb = cclass_coin(cfg.coin_b);

  MatXc<Scalar> coined = MatXc<Scalar>::Zero(n, n);
  for (int y = 0; y < ny; ++y)
    coined.template block<4, 4>(4 * y, 4 * y) = (y < cfg.width_a) ? ca : cb;

  MatXc<Scalar> out = MatXc<Scalar>::Zero(n, n);
  const Complex<Scalar> ph_l = std::polar(Scalar(1), -k);
  const Complex<Scalar> ph_r = std::polar(Scalar(1), k);
  for (int y = 0; y < ny; ++y) {
    const int yd = (y + 1) % ny;       // source site for the D row
    const int yu = (y + ny - 1) % ny;  // source site for the U row
    out.row(4 * y + kCoinL) = ph_l * coined.row(4 * y + kCoinL);
    out.row(4 * y + kCoinR) = ph_r * coined.row(4 * y + kCoinR);
    out.row(4 * y + kCoinD) = coined.row(4 * yd + kCoinD);
    out.row(4 * y + kCoinU) = coined.row(4 * yu + kCoinU);
  }
  return out;
}

// Eigen-decomposition of the strip operator over a k grid. States are sorted
// by eigenphase per k; transverse weight profiles and the weights near the
// two interfaces are precomputed for detection.
template <class Scalar>
struct StripSpectrum {
  StripConfig<Scalar> config;
  std::vector<Scalar> ks;
  std::vector<VecX<Scalar>> omegas;           // per k, sorted ascending
  std::vector<MatXc<Scalar>> vectors;         // per k, columns follow omegas
  std::vector<MatX<Scalar>> profiles;         // per k, ny x dim transverse weights
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 2>> interface_weight;  // per k, dim x 2
  int interface_window = 4;                   // sites counted on each side
};

template <class Scalar>
std::vector<Scalar> uniform_k_grid(int nk) {
  if (nk < 2) throw ValidationError("uniform_k_grid: need at least 2 samples");
  std::vector<Scalar> ks(nk);
  for (int a = 0; a < nk; ++a) ks[a] = Scalar(2) * kPi<Scalar> * Scalar(a) / Scalar(nk) - kPi<Scalar>;
  return ks;
}

// k grid avoiding the symmetric momenta 0 and +-pi, where edge branches of
// the real-parameter slice cross the flat bands exactly and eigenvectors mix
// inside the degenerate subspace.
template <class Scalar>
std::vector<Scalar> offset_k_grid(int nk, Scalar cell_fraction = Scalar(0.5)) {
  if (nk < 2) throw ValidationError("offset_k_grid: need at least 2 samples");
  std::vector<Scalar> ks(nk);
  for (int a = 0; a < nk; ++a)
    ks[a] = Scalar(2) * kPi<Scalar> * (Scalar(a) + cell_fraction) / Scalar(nk) - kPi<Scalar>;
  return ks;
}

template <class Scalar>
StripSpectrum<Scalar> strip_spectrum(const StripConfig<Scalar>& cfg,
                                     const std::vector<Scalar>& ks, int interface_window = 4,
                                     unsigned threads = 0) {
  const int ny = cfg.transverse_sites();
  const int n = cfg.dim();
  if (interface_window < 1 || 2 * interface_window > ny)
    throw ValidationError("strip_spectrum: interface window out of range");
  StripSpectrum<Scalar> sp;
  sp.config = cfg;
  sp.ks = ks;
  sp.omegas.resize(ks.size());
  sp.vectors.resize(ks.size());
  sp.profiles.resize(ks.size());
  sp.interface_weight.resize(ks.size());
  sp.interface_window = interface_window;

  parallel_for(static_cast<Index>(ks.size()), [&](Index i) {
    Eigen::ComplexEigenSolver<MatXc<Scalar>> solver(strip_operator(cfg, ks[i]), true);
    if (solver.info() != Eigen::Success)
      throw NumericalError("strip_spectrum: eigensolver failed at k = " + std::to_string(ks[i]));

    std::vector<int> order(n);
    VecX<Scalar> om(n);
    for (int j = 0; j < n; ++j) {
      om(j) = principal_phase<Scalar>(solver.eigenvalues()(j));
      order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return om(a) < om(b) || (om(a) == om(b) && a < b);
    });

    VecX<Scalar> omega(n);
    MatXc<Scalar> vecs(n, n);
    MatX<Scalar> prof(ny, n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 2> iw(n, 2);
    for (int j = 0; j < n; ++j) {
      const int src = order[j];
      omega(j) = om(src);
      vecs.col(j) = solver.eigenvectors().col(src);
      for (int y = 0; y < ny; ++y)
        prof(y, j) = vecs.col(j).template segment<4>(4 * y).squaredNorm();
      Scalar w0 = 0, w1 = 0;
      for (int d = -interface_window; d < interface_window; ++d) {
        w0 += prof(((d % ny) + ny) % ny, j);
        w1 += prof((cfg.width_a + d + ny) % ny, j);
      }
      iw(j, 0) = w0;
      iw(j, 1) = w1;
    }
    sp.omegas[i] = std::move(omega);
    sp.vectors[i] = std::move(vecs);
    sp.profiles[i] = std::move(prof);
    sp.interface_weight[i] = std::move(iw);
  }, threads);
  return sp;
}

// Greedy nearest-eigenvector matching between adjacent k samples; ties are
// broken by smallest |d omega|. Returns, per state at sample i, the matched
// state index at sample (i+1) mod nk.
template <class Scalar>
std::vector<int> match_next(const StripSpectrum<Scalar>& sp, Index i) {
  const Index nexti = (i + 1) % static_cast<Index>(sp.ks.size());
  const int n = static_cast<int>(sp.omegas[i].size());
  const MatX<Scalar> overlap = (sp.vectors[nexti].adjoint() * sp.vectors[i]).cwiseAbs();

  struct Cand {
    Scalar ov;
    Scalar dw;
    int from, to;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      cands.push_back({overlap(b, a), circular_distance(sp.omegas[nexti](b), sp.omegas[i](a)), a, b});
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.ov != y.ov) return x.ov > y.ov;
    if (x.dw != y.dw) return x.dw < y.dw;
    if (x.from != y.from) return x.from < y.from;
    return x.to < y.to;
  });
  std::vector<int> match(n, -1);
  std::vector<char> taken(n, 0);
  int assigned = 0;
  for (const Cand& c : cands) {
    if (assigned == n) break;
    if (match[c.from] >= 0 || taken[c.to]) continue;
    match[c.from] = c.to;
    taken[c.to] = 1;
    ++assigned;
  }
  return match;
}

// Branch ids over the whole spectrum, traced by the greedy matching above.
template <class Scalar>
std::vector<std::vector<int>> trace_branches(const StripSpectrum<Scalar>& sp) {
  const Index nk = static_cast<Index>(sp.ks.size());
  const int n = static_cast<int>(sp.omegas[0].size());
  std::vector<std::vector<int>> branch(nk, std::vector<int>(n, -1));
  for (int j = 0; j < n; ++j) branch[0][j] = j;
  for (Index i = 0; i + 1 < nk; ++i) {
    const std::vector<int> match = match_next(sp, i);
    for (int j = 0; j < n; ++j) branch[i + 1][match[j]] = branch[i][j];
  }
  return branch;
}

template <class Scalar>
struct BulkGaps {
  Scalar gap0;
  Scalar gapPi;
};

// Common bulk gaps of the two strip coins, from the momentum band structure.
template <class Scalar>
BulkGaps<Scalar> bulk_common_gaps(const StripConfig<Scalar>& cfg, const MomentumGrid& grid,
                                  unsigned threads = 0) {
  const GapWidths<Scalar> ga = gap_widths(band_structure(cclass_coin(cfg.coin_a), grid, threads));
  const GapWidths<Scalar> gb = gap_widths(band_structure(cclass_coin(cfg.coin_b), grid, threads));
  return {std::min(ga.gap0, gb.gap0), std::min(ga.gapPi, gb.gapPi)};
}

struct EdgeDetectOptions {
  double gap_tol = 0.05;            // bulk gap below this counts as closed
  double localization_threshold = 0.9;
  double flat_tol = 1e-8;           // skip the flat-band states at 0 and pi
  double gap_interior = 0.95;       // only accept states inside this fraction of the gap
};

template <class Scalar>
struct EdgeState {
  Scalar k;
  Scalar omega;
  int gap_id;        // 0 = gap around omega = 0, 1 = gap around omega = pi
  int interface_id;  // 0 = wrap seam, 1 = region boundary
  int velocity_sign; // sign of d omega / d k along the matched branch
};

// In-gap, interface-localized states with branch velocity signs.
// Throws NoGapError when both common bulk gaps are closed.
template <class Scalar>
std::vector<EdgeState<Scalar>> detect_edge_states(const StripSpectrum<Scalar>& sp,
                                                  const BulkGaps<Scalar>& gaps,
                                                  const EdgeDetectOptions& opt = {}) {
  const bool open0 = gaps.gap0 > Scalar(opt.gap_tol);
  const bool openPi = gaps.gapPi > Scalar(opt.gap_tol);
  if (!open0 && !openPi)
    throw NoGapError("detect_edge_states: both bulk gaps are closed");

  const Index nk = static_cast<Index>(sp.ks.size());
  const int n = static_cast<int>(sp.omegas[0].size());
  std::vector<EdgeState<Scalar>> found;
  for (Index i = 0; i < nk; ++i) {
    const std::vector<int> match = match_next(sp, i);
    const Index nexti = (i + 1) % nk;
    const Scalar dk = std::remainder(sp.ks[nexti] - sp.ks[i], Scalar(2) * kPi<Scalar>);
    for (int j = 0; j < n; ++j) {
      const Scalar om = sp.omegas[i](j);
      const Scalar d0 = circular_distance(om, Scalar(0));
      const Scalar dp = circular_distance(om, kPi<Scalar>);
      if (d0 < Scalar(opt.flat_tol) || dp < Scalar(opt.flat_tol)) continue;
      int gap_id;
      if (open0 && d0 < Scalar(opt.gap_interior) * gaps.gap0)
        gap_id = 0;
      else if (openPi && dp < Scalar(opt.gap_interior) * gaps.gapPi)
        gap_id = 1;
      else
        continue;
      const Scalar w0 = sp.interface_weight[i](j, 0);
      const Scalar w1 = sp.interface_weight[i](j, 1);
      if (std::max(w0, w1) < Scalar(opt.localization_threshold)) continue;
      const Scalar dw =
          std::remainder(sp.omegas[nexti](match[j]) - om, Scalar(2) * kPi<Scalar>);
      const Scalar v = dw / dk;
      found.push_back({sp.ks[i], om, gap_id, w0 > w1 ? 0 : 1, v > 0 ? 1 : (v < 0 ? -1 : 0)});
    }
  }
  return found;
}

// Net spectral flow per gap and interface: signed crossings of a reference
// line placed halfway into the gap, counted along matched branch segments
// around the full k circle. A protected chiral branch contributes +-1 per
// traversal; accidental bound branches enter and leave through the same band
// edge and net to zero.
template <class Scalar>
struct EdgeFlow {
  int winding[2][2] = {{0, 0}, {0, 0}};  // [gap][interface]

  bool protected_gap(int gap) const {
    return winding[gap][0] != 0 || winding[gap][1] != 0;
  }
  bool any() const { return protected_gap(0) || protected_gap(1); }
};

template <class Scalar>
EdgeFlow<Scalar> edge_flow(const StripSpectrum<Scalar>& sp, const BulkGaps<Scalar>& gaps,
                           const EdgeDetectOptions& opt = {}) {
  const bool open0 = gaps.gap0 > Scalar(opt.gap_tol);
  const bool openPi = gaps.gapPi > Scalar(opt.gap_tol);
  if (!open0 && !openPi) throw NoGapError("edge_flow: both bulk gaps are closed");

  // reference lines: halfway into each open gap
  Scalar refs[2] = {gaps.gap0 / 2, kPi<Scalar> - gaps.gapPi / 2};
  const Index nk = static_cast<Index>(sp.ks.size());
  const int n = static_cast<int>(sp.omegas[0].size());
  const Scalar jump_cap = kPi<Scalar> / 2;  // larger steps indicate a mismatch

  EdgeFlow<Scalar> flow;
  for (Index i = 0; i < nk; ++i) {
    const std::vector<int> match = match_next(sp, i);
    const Index nexti = (i + 1) % nk;
    for (int j = 0; j < n; ++j) {
      const Scalar wi = sp.omegas[i](j);
      const Scalar wn = sp.omegas[nexti](match[j]);
      // flat states do not move; any matched segment starting or ending on a
      // flat value is a matching artifact inside the degenerate subspace
      if (circular_distance(wi, Scalar(0)) < Scalar(opt.flat_tol) ||
          circular_distance(wi, kPi<Scalar>) < Scalar(opt.flat_tol) ||
          circular_distance(wn, Scalar(0)) < Scalar(opt.flat_tol) ||
          circular_distance(wn, kPi<Scalar>) < Scalar(opt.flat_tol))
        continue;

      const Scalar d = std::remainder(wn - wi, Scalar(2) * kPi<Scalar>);
      if (std::abs(d) > jump_cap) continue;

      // attribute the segment to the interface holding most of its weight;
      // extended states never live inside the gaps, so no hard gate is needed
      const Scalar w0 = sp.interface_weight[i](j, 0) + sp.interface_weight[nexti](match[j], 0);
      const Scalar w1 = sp.interface_weight[i](j, 1) + sp.interface_weight[nexti](match[j], 1);
      if (std::max(w0, w1) < Scalar(1))  // avg below 0.5: bulk-like, skip
        continue;
      const int ifc = w0 > w1 ? 0 : 1;

      for (int gap = 0; gap < 2; ++gap) {
        if (gap == 0 && !open0) continue;
        if (gap == 1 && !openPi) continue;
        // signed crossing of the arc (wi -> wi + d) through the line
        Scalar s = std::remainder(refs[gap] - wi, Scalar(2) * kPi<Scalar>);
        if (d > 0 && s > 0 && s <= d) flow.winding[gap][ifc] += 1;
        if (d < 0 && s <= 0 && s > d) flow.winding[gap][ifc] -= 1;
      }
    }
  }
  return flow;
}

// Protected-edge-state verdict from the spectral flow. In this coin family
// the two gaps close together on the cos 2 delta1 = cos 2 delta2 lines, so a
// genuine phase boundary flips the flow in both gaps at once; demanding
// agreement across gaps and opposite flow at the two interfaces rejects the
// +-1 attribution noise that interface hybridization can produce.
template <class Scalar>
bool flow_protected(const EdgeFlow<Scalar>& f, bool open0, bool openPi) {
  if (open0 && openPi) {
    return f.winding[0][0] == f.winding[1][0] && f.winding[0][1] == f.winding[1][1] &&
           f.winding[0][0] == -f.winding[0][1] && f.winding[0][0] != 0;
  }
  const int g = open0 ? 0 : 1;
  return f.winding[g][0] == -f.winding[g][1] && f.winding[g][0] != 0;
}

// Chirality audit of detected states: a protected interface carries states
// of one velocity sign only, while accidental (non-topological) bound
// branches mix both signs.
template <class Scalar>
struct GapChirality {
  int count[2] = {0, 0};  // per interface
  int net[2] = {0, 0};    // summed velocity signs per interface
};

template <class Scalar>
std::array<GapChirality<Scalar>, 2> chirality_summary(const std::vector<EdgeState<Scalar>>& states) {
  std::array<GapChirality<Scalar>, 2> out{};
  for (const auto& s : states) {
    out[s.gap_id].count[s.interface_id] += 1;
    out[s.gap_id].net[s.interface_id] += s.velocity_sign;
  }
  return out;
}

// Operational phase test: a gap hosts protected edge states iff both
// interfaces carry enough detections, each interface is chirally clean, and
// the two interfaces propagate in opposite directions.
template <class Scalar>
bool protected_edge_states_present(const std::vector<EdgeState<Scalar>>& states, int min_count = 4,
                                   double chirality_ratio = 0.8) {
  const auto sum = chirality_summary(states);
  for (int gap = 0; gap < 2; ++gap) {
    const auto& g = sum[gap];
    if (g.count[0] < min_count || g.count[1] < min_count) continue;
    const double r0 = std::abs(double(g.net[0])) / g.count[0];
    const double r1 = std::abs(double(g.net[1])) / g.count[1];
    if (r0 >= chirality_ratio && r1 >= chirality_ratio && g.net[0] * g.net[1] < 0) return true;
  }
  return false;
}

// Binary phase field over (delta1, delta2): a grid coin is marked
// phase-distinct from the reference coin iff the strip made of the two
// carries gap-crossing edge states (nonzero spectral flow in some gap).
// Gapless grid points cannot be classified and are assigned the reference
// phase.
template <class Scalar>
struct TopoMapConfig {
  int n1 = 46;
  int n2 = 46;
  Scalar d1_min = 0, d1_max = kPi<Scalar>;
  Scalar d2_min = 0, d2_max = kPi<Scalar>;
  Scalar alpha1 = kPi<Scalar> / 2, beta1 = kPi<Scalar> / 2;
  Scalar alpha2 = kPi<Scalar> / 2, beta2 = kPi<Scalar> / 2;
  Scalar phi = kPi<Scalar>;
  CoinParams<Scalar> reference{{kPi<Scalar> / 2, kPi<Scalar> / 2, kPi<Scalar> / 10},
                               {kPi<Scalar> / 2, kPi<Scalar> / 2, 4 * kPi<Scalar> / 10},
                               kPi<Scalar>};
  int width_a = 20;
  int width_b = 20;
  int k_points = 201;
  int bulk_grid = 32;
  int interface_window = 4;
  EdgeDetectOptions detect{};

  Scalar d1_at(int i) const { return d1_min + (d1_max - d1_min) * Scalar(i) / Scalar(n1 - 1); }
  Scalar d2_at(int j) const { return d2_min + (d2_max - d2_min) * Scalar(j) / Scalar(n2 - 1); }
  CoinParams<Scalar> coin_at(int i, int j) const {
    return {{alpha1, beta1, d1_at(i)}, {alpha2, beta2, d2_at(j)}, phi};
  }
};

template <class Scalar>
struct TopoMapResult {
  TopoMapConfig<Scalar> config;
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> phase;  // n1 x n2, 0 or 1
};

template <class Scalar>
TopoMapResult<Scalar> topo_map(const TopoMapConfig<Scalar>& cfg, unsigned threads = 0) {
  if (cfg.n1 < 2 || cfg.n2 < 2) throw ValidationError("topo_map: grid must be >= 2 per axis");
  const MomentumGrid bulk_grid(cfg.bulk_grid, cfg.bulk_grid);
  const std::vector<Scalar> ks = uniform_k_grid<Scalar>(cfg.k_points);
  const GapWidths<Scalar> ref_gaps =
      gap_widths(band_structure(cclass_coin(cfg.reference), bulk_grid, 1));

  TopoMapResult<Scalar> res{
      cfg, Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>::Zero(cfg.n1, cfg.n2)};
  parallel_for(static_cast<Index>(cfg.n1) * cfg.n2, [&](Index p) {
    const int i = static_cast<int>(p / cfg.n2);
    const int j = static_cast<int>(p % cfg.n2);
    const StripConfig<Scalar> strip{cfg.coin_at(i, j), cfg.reference, cfg.width_a, cfg.width_b};
    const GapWidths<Scalar> g =
        gap_widths(band_structure(cclass_coin(strip.coin_a), bulk_grid, 1));
    const BulkGaps<Scalar> gaps{std::min(g.gap0, ref_gaps.gap0),
                                std::min(g.gapPi, ref_gaps.gapPi)};
    if (gaps.gap0 <= Scalar(cfg.detect.gap_tol) && gaps.gapPi <= Scalar(cfg.detect.gap_tol)) {
      res.phase(i, j) = 0;
      return;
    }
    const bool open0 = gaps.gap0 > Scalar(cfg.detect.gap_tol);
    const bool openPi = gaps.gapPi > Scalar(cfg.detect.gap_tol);
    const StripSpectrum<Scalar> sp = strip_spectrum(strip, ks, cfg.interface_window, 1);
    const EdgeFlow<Scalar> flow = edge_flow(sp, gaps, cfg.detect);
    bool distinct = flow_protected(flow, open0, openPi);
    if (!distinct && flow.any()) {
      // ambiguous flow (e.g. a sample landed inside an interface
      // hybridization window): retry on a half-cell shifted k grid
      std::vector<Scalar> shifted = ks;
      const Scalar half = (ks.size() > 1 ? (ks[1] - ks[0]) : Scalar(1)) / 2;
      for (auto& k : shifted) k += half;
      const StripSpectrum<Scalar> sp2 = strip_spectrum(strip, shifted, cfg.interface_window, 1);
      distinct = flow_protected(edge_flow(sp2, gaps, cfg.detect), open0, openPi);
    }
    res.phase(i, j) = distinct ? 1 : 0;
  }, threads);
  return res;
}

}  // namespace qwalk

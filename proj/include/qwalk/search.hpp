#pragma once

// Spatial search on L x M tori: bulk coin everywhere, the marked-vertex coin
// -sigma_x (x) sigma_x at one site, uniform initial state, and the
// marked-vertex probability trace.

#include <cmath>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

template <class Scalar>
struct SearchConfig {
  Torus torus;
  CoinParams<Scalar> bulk;
  Index marked_x = 0;
  Index marked_y = 0;
  int measuring_time;  // defaults to round(sqrt(2 L M))
  int record_steps;    // trace length; defaults to 2 * measuring_time
};

template <class Scalar>
SearchConfig<Scalar> make_search_config(const Torus& t, const CoinParams<Scalar>& bulk,
                                        Index marked_x = 0, Index marked_y = 0,
                                        int measuring_time = -1, int record_steps = -1) {
  if (marked_x < 0 || marked_x >= t.width || marked_y < 0 || marked_y >= t.height)
    throw ValidationError("search: marked vertex outside torus");
  if (!finite(bulk)) throw ValidationError("search: non-finite coin parameter");
  const int tm = measuring_time >= 0
                     ? measuring_time
                     : static_cast<int>(std::llround(std::sqrt(2.0 * double(t.width) * double(t.height))));
  if (tm < 1) throw ValidationError("search: measuring time must be >= 1");
  const int rec = record_steps >= 0 ? record_steps : 2 * tm;
  if (rec < tm) throw ValidationError("search: record_steps shorter than measuring time");
  return SearchConfig<Scalar>{t, bulk, marked_x, marked_y, tm, rec};
}

template <class Scalar>
CoinField<Scalar> build_search_coinfield(const SearchConfig<Scalar>& cfg) {
  if (cfg.marked_x < 0 || cfg.marked_x >= cfg.torus.width || cfg.marked_y < 0 ||
      cfg.marked_y >= cfg.torus.height)
    throw ValidationError("build_search_coinfield: marked vertex outside torus");
  CoinField<Scalar> cf(cclass_coin(cfg.bulk));
  cf.set_site(cfg.marked_x, cfg.marked_y, marked_coin<Scalar>());
  return cf;
}

// Equal superposition of all position (x) coin basis states.
template <class Scalar>
WalkState<Scalar> uniform_state(const Torus& t) {
  WalkState<Scalar> s(t);
  s.amps.setConstant(Complex<Scalar>(Scalar(1) / std::sqrt(Scalar(4) * Scalar(t.sites())), 0));
  return s;
}

template <class Scalar>
struct SearchRun {
  SearchConfig<Scalar> config;
  std::vector<Scalar> p_marked;  // marked-vertex probability at t = 0..record_steps
};

template <class Scalar>
SearchRun<Scalar> run_search(const SearchConfig<Scalar>& cfg) {
  const CoinField<Scalar> cf = build_search_coinfield(cfg);
  const Index marked = cfg.torus.site_index(cfg.marked_x, cfg.marked_y);
  WalkState<Scalar> psi = uniform_state<Scalar>(cfg.torus);
  SearchRun<Scalar> run{cfg, {}};
  run.p_marked.reserve(cfg.record_steps + 1);
  run.p_marked.push_back(psi.amps.col(marked).squaredNorm());
  for (int t = 1; t <= cfg.record_steps; ++t) {
    psi = step(psi, cf);
    run.p_marked.push_back(psi.amps.col(marked).squaredNorm());
  }
  return run;
}

template <class Scalar>
struct SearchComparison {
  SearchRun<Scalar> run_a;
  SearchRun<Scalar> run_b;
  Scalar p_a_at_t;
  Scalar p_b_at_t;
  Scalar ratio;  // p_b / p_a at the measuring time
};

template <class Scalar>
SearchComparison<Scalar> compare_search(const SearchConfig<Scalar>& a,
                                        const SearchConfig<Scalar>& b) {
  if (!(a.torus == b.torus) || a.marked_x != b.marked_x || a.marked_y != b.marked_y)
    throw ValidationError("compare_search: configurations use different torus or marked vertex");
  if (a.measuring_time != b.measuring_time)
    throw ValidationError("compare_search: configurations use different measuring times");
  SearchComparison<Scalar> cmp{run_search(a), run_search(b), 0, 0, 0};
  cmp.p_a_at_t = cmp.run_a.p_marked.at(a.measuring_time);
  cmp.p_b_at_t = cmp.run_b.p_marked.at(b.measuring_time);
  cmp.ratio = cmp.p_b_at_t / cmp.p_a_at_t;
  return cmp;
}

}  // namespace qwalk

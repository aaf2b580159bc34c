#pragma once

// File exporters for the experiment outputs. All numeric output is printed
// with %.17g so reruns are byte-identical.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/lattice.hpp"
#include "qwalk/momentum.hpp"
#include "qwalk/search.hpp"
#include "qwalk/topology.hpp"
#include "qwalk/trapping.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline translation
  if (!out) throw IoError("cannot open output file: " + path);
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_output(path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// State dump: header line with torus extents and step count, then one row
// per site, coin components in basis order (L, D, U, R).
inline void write_state_csv(const std::string& path, const WalkState<double>& s, int steps) {
  std::ostringstream out;
  out << "# L=" << s.torus.width << " M=" << s.torus.height << " steps=" << steps << "\n";
  out << "x,y,re_L,im_L,re_D,im_D,re_U,im_U,re_R,im_R\n";
  for (Index y = 0; y < s.torus.height; ++y)
    for (Index x = 0; x < s.torus.width; ++x) {
      out << x << "," << y;
      const auto col = s.amps.col(s.torus.site_index(x, y));
      for (int c = 0; c < 4; ++c)
        out << "," << fmt_double(col(c).real()) << "," << fmt_double(col(c).imag());
      out << "\n";
    }
  write_text_file(path, out.str());
}

struct StateDump {
  Torus torus;
  int steps;
  WalkState<double> state;
};

inline StateDump read_state_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file: " + path);
  std::string header;
  std::getline(in, header);
  long long w = 0, h = 0;
  int steps = 0;
  if (std::sscanf(header.c_str(), "# L=%lld M=%lld steps=%d", &w, &h, &steps) != 3)
    throw IoError("bad state CSV header: " + path);
  std::string columns;
  std::getline(in, columns);
  Torus t(static_cast<Index>(w), static_cast<Index>(h));
  StateDump dump{t, steps, WalkState<double>(t)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 10) throw IoError("bad state CSV row: " + path);
    const Index s = t.site_index(static_cast<Index>(vals[0]), static_cast<Index>(vals[1]));
    for (int c = 0; c < 4; ++c)
      dump.state.amps(c, s) = Complex<double>(vals[2 + 2 * c], vals[3 + 2 * c]);
  }
  return dump;
}

// Band export: one row per grid point, eigenphases ascending, flat flags
// from BandFlag (0 dispersive, 1 flat at 0, 2 flat at pi).
inline void write_band_csv(const std::string& path, const BandStructure<double>& b) {
  std::ostringstream out;
  out << "# nk=" << b.grid.nk << " nl=" << b.grid.nl << "\n";
  out << "k,l,omega1,omega2,omega3,omega4,flat1,flat2,flat3,flat4\n";
  for (Index p = 0; p < b.omegas.rows(); ++p) {
    const int a = static_cast<int>(p % b.grid.nk);
    const int bi = static_cast<int>(p / b.grid.nk);
    out << fmt_double(b.grid.k_at<double>(a)) << "," << fmt_double(b.grid.l_at<double>(bi));
    for (int i = 0; i < 4; ++i) out << "," << fmt_double(b.omegas(p, i));
    for (int i = 0; i < 4; ++i) out << "," << b.flags(p, i);
    out << "\n";
  }
  write_text_file(path, out.str());
}

inline void write_gap_json(const std::string& path, const GapWidths<double>& g, double tol,
                           const MomentumGrid& grid) {
  write_json_file(path, nlohmann::json{{"gap0", g.gap0},
                                       {"gapPi", g.gapPi},
                                       {"tol", tol},
                                       {"grid", {{"nk", grid.nk}, {"nl", grid.nl}}}});
}

inline void write_trapmap_csv(const std::string& path, const TrapMapResult<double>& r) {
  std::ostringstream out;
  out << "delta1,delta2,min_prob\n";
  for (int i = 0; i < r.config.n1; ++i)
    for (int j = 0; j < r.config.n2; ++j)
      out << fmt_double(r.config.d1_at(i)) << "," << fmt_double(r.config.d2_at(j)) << ","
          << fmt_double(r.min_prob(i, j)) << "\n";
  write_text_file(path, out.str());
}

inline void write_strip_csv(const std::string& path, const StripSpectrum<double>& sp) {
  const auto branch = trace_branches(sp);
  std::ostringstream out;
  out << "# width_a=" << sp.config.width_a << " width_b=" << sp.config.width_b
      << " interface_window=" << sp.interface_window << "\n";
  out << "k,omega,interface_weight,branch_id\n";
  for (size_t i = 0; i < sp.ks.size(); ++i)
    for (Index j = 0; j < sp.omegas[i].size(); ++j) {
      const double iw = std::max(sp.interface_weight[i](j, 0), sp.interface_weight[i](j, 1));
      out << fmt_double(sp.ks[i]) << "," << fmt_double(sp.omegas[i](j)) << "," << fmt_double(iw)
          << "," << branch[i][j] << "\n";
    }
  write_text_file(path, out.str());
}

inline void write_topomap_csv(const std::string& path, const TopoMapResult<double>& r) {
  std::ostringstream out;
  out << "delta1,delta2,phase_flag\n";
  for (int i = 0; i < r.config.n1; ++i)
    for (int j = 0; j < r.config.n2; ++j)
      out << fmt_double(r.config.d1_at(i)) << "," << fmt_double(r.config.d2_at(j)) << ","
          << r.phase(i, j) << "\n";
  write_text_file(path, out.str());
}

inline void write_search_csv(const std::string& path, const SearchRun<double>& run) {
  std::ostringstream out;
  out << "t,p_marked\n";
  for (size_t t = 0; t < run.p_marked.size(); ++t)
    out << t << "," << fmt_double(run.p_marked[t]) << "\n";
  write_text_file(path, out.str());
}

}  // namespace qwalk

#pragma once

// Export of an SdpProblem in the SDPA sparse format (".dat-s"), single block.
//
// SDPA's file defines:  max tr(F_0 Y)  s.t.  tr(F_k Y) = c_k,  Y >= 0.
// Our problem is        min tr(C Z)    s.t.  tr(A_k Z) = b_k,  Z >= 0,
// so we write F_0 = -C, F_k = A_k, c = b; the SDPA dual optimum is the
// negated objective of this problem. A comment line in the file records that.

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "certrot/relaxation.hpp"

namespace certrot {

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Upper-triangle (row <= col) entries of a constraint's symmetric matrix.
inline std::map<std::pair<int, int>, double> upper_entries(const ConstraintMatrix& cm) {
  std::map<std::pair<int, int>, double> out;
  for (const ConstraintEntry& e : cm.entries) {
    if (e.row <= e.col) out[{e.row, e.col}] += e.value;
  }
  return out;
}

}  // namespace detail

inline void write_sdpa_sparse(const SdpProblem& p, std::ostream& os) {
  const int m = static_cast<int>(p.constraints.size());
  os << "* single-block SDP: file encodes max tr(F0 Y) with F0 = -C;\n";
  os << "* the exported problem's optimum is -1 * (min tr(C Z)).\n";
  os << m << " = mDIM\n";
  os << "1 = nBLOCK\n";
  os << p.dim << " = bLOCKsTRUCT\n";
  for (int k = 0; k < m; ++k) {
    os << detail::fmt_g17(p.constraints[static_cast<std::size_t>(k)].rhs)
       << (k + 1 < m ? " " : "\n");
  }
  // F0 = -C, upper triangle, 1-based indices.
  for (int i = 0; i < p.dim; ++i) {
    for (int j = i; j < p.dim; ++j) {
      const double v = -p.cost(i, j);
      if (v != 0.0) {
        os << "0 1 " << (i + 1) << ' ' << (j + 1) << ' ' << detail::fmt_g17(v) << '\n';
      }
    }
  }
  for (int k = 0; k < m; ++k) {
    for (const auto& [rc, v] : detail::upper_entries(p.constraints[static_cast<std::size_t>(k)])) {
      if (v != 0.0) {
        os << (k + 1) << " 1 " << (rc.first + 1) << ' ' << (rc.second + 1) << ' '
           << detail::fmt_g17(v) << '\n';
      }
    }
  }
}

inline void write_sdpa_sparse(const SdpProblem& p, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_sdpa_sparse: cannot open " + path);
  write_sdpa_sparse(p, os);
  if (!os) throw std::runtime_error("write_sdpa_sparse: write failed for " + path);
}

}  // namespace certrot

#ifndef SPLITDYN_HARNESS_CSV_HPP
#define SPLITDYN_HARNESS_CSV_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../diagnostics.hpp"
#include "../types.hpp"

namespace splitdyn {

namespace detail {

/// All CSV numbers go through one %.17g formatter so identical runs produce
/// byte-identical files.
[[nodiscard]] inline std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace detail

/// time,dH,dJx,dJy,dJz,dLx,dLy,dLz,dCx,dCy,dCz -- one row per sample.
inline void write_invariants_csv(const std::string& path, const InvariantSeries& series) {
  std::ofstream out = detail::open_csv(path);
  out << "time,dH,dJx,dJy,dJz,dLx,dLy,dLz,dCx,dCy,dCz\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out << detail::g17(series.times[i]) << ',' << detail::g17(series.dH[i]);
    for (int k = 0; k < 3; ++k) out << ',' << detail::g17(series.dJ[i][k]);
    for (int k = 0; k < 3; ++k) out << ',' << detail::g17(series.dL[i][k]);
    for (int k = 0; k < 3; ++k) out << ',' << detail::g17(series.dC[i][k]);
    out << '\n';
  }
}

/// time then q and p per particle:
/// time,q0x,q0y,q0z,p0x,p0y,p0z,q1x,... -- one row per sample.
inline void write_trajectory_csv(const std::string& path,
                                 const std::vector<PhaseState>& trajectory) {
  std::ofstream out = detail::open_csv(path);
  out << "time";
  if (!trajectory.empty())
    for (std::size_t a = 0; a < trajectory.front().q.size(); ++a) {
      const std::string i = std::to_string(a);
      out << ",q" << i << "x,q" << i << "y,q" << i << "z,p" << i << "x,p" << i << "y,p" << i
          << "z";
    }
  out << '\n';
  for (const PhaseState& s : trajectory) {
    out << detail::g17(s.time);
    for (std::size_t a = 0; a < s.q.size(); ++a) {
      for (int k = 0; k < 3; ++k) out << ',' << detail::g17(s.q[a][k]);
      for (int k = 0; k < 3; ++k) out << ',' << detail::g17(s.p[a][k]);
    }
    out << '\n';
  }
}

/// dt,rel_err_q,rel_err_p,order_q,order_p -- first row's orders print as nan.
inline void write_convergence_csv(const std::string& path,
                                  const std::vector<ConvergenceRow>& rows) {
  std::ofstream out = detail::open_csv(path);
  out << "dt,rel_err_q,rel_err_p,order_q,order_p\n";
  for (const ConvergenceRow& row : rows)
    out << detail::g17(row.dt) << ',' << detail::g17(row.rel_err_q) << ','
        << detail::g17(row.rel_err_p) << ',' << detail::g17(row.order_q) << ','
        << detail::g17(row.order_p) << '\n';
}

}  // namespace splitdyn

#endif

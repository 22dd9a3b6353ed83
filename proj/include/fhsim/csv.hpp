#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "fhsim/frame_grid.hpp"
#include "fhsim/sim.hpp"

namespace fhsim {

// External unit is Mbps with one decimal; identical values always format to
// identical bytes.
inline std::string format_mbps(Bps v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.1f", static_cast<double>(v) / 1e6);
  return buf;
}

inline std::string format_time_s(std::int64_t t_ms) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", static_cast<double>(t_ms) / 1e3);
  return buf;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "capacity_mbps,config,achieved_dl_mbps,achieved_ul_mbps,fh_dl_mbps,fh_ul_mbps\n";
  for (const auto& r : rows)
    os << format_mbps(r.capacity) << ',' << r.config << ',' << format_mbps(r.achieved_dl) << ','
       << format_mbps(r.achieved_ul) << ',' << format_mbps(r.fh_dl) << ','
       << format_mbps(r.fh_ul) << '\n';
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "offered_mbps,config,access_mbps,fh_dl_mbps,fh_ul_mbps\n";
  for (const auto& r : rows)
    os << format_mbps(r.offered) << ',' << r.config << ',' << format_mbps(r.access) << ','
       << format_mbps(r.fh_dl) << ',' << format_mbps(r.fh_ul) << '\n';
}

inline void write_timeseries_csv(std::ostream& os, const TimeSeries& ts) {
  os << "time_s,capacity_dl_mbps,capacity_ul_mbps,config,offered_dl_mbps,offered_ul_mbps,"
        "achieved_dl_mbps,achieved_ul_mbps,fh_dl_mbps,fh_ul_mbps,event\n";
  for (const auto& r : ts.rows)
    os << format_time_s(r.t_ms) << ',' << format_mbps(r.capacity_dl) << ','
       << format_mbps(r.capacity_ul) << ',' << r.config << ',' << format_mbps(r.offered_dl) << ','
       << format_mbps(r.offered_ul) << ',' << format_mbps(r.achieved_dl) << ','
       << format_mbps(r.achieved_ul) << ',' << format_mbps(r.fh_dl) << ','
       << format_mbps(r.fh_ul) << ',' << r.event << '\n';
}

// Debug dump of one scheduled grid, one row per (slot, symbol).
inline void write_grid_dump_csv(std::ostream& os, const FrameGrid& grid) {
  os << "slot,symbol,direction,occupied_rbs,transported\n";
  for (int s = 0; s < grid.horizon_slots(); ++s) {
    for (int y = 0; y < Numerology::symbols_per_slot; ++y) {
      const auto kind = grid.symbol_kind(s, y);
      const char dir =
          kind == FrameGrid::SymbolKind::dl ? 'D' : kind == FrameGrid::SymbolKind::ul ? 'U' : 'G';
      std::int64_t occupied_rbs = 0;
      for (std::int64_t rb = 0; rb < grid.n_rb(); ++rb) {
        bool used = grid.signaling(s, y, rb);
        for (int l = 0; !used && l < grid.layers(); ++l) used = grid.occupied(s, y, rb, l);
        if (used) ++occupied_rbs;
      }
      const bool transported = kind == FrameGrid::SymbolKind::ul
                                   ? grid.any_payload(s, y)
                                   : kind == FrameGrid::SymbolKind::dl && occupied_rbs > 0;
      os << s << ',' << y << ',' << dir << ',' << occupied_rbs << ',' << (transported ? 1 : 0)
         << '\n';
    }
  }
}

}  // namespace fhsim

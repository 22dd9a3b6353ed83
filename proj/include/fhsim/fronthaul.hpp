#pragma once

#include <algorithm>
#include <vector>

#include "fhsim/core.hpp"
#include "fhsim/frame_grid.hpp"
#include "fhsim/phy.hpp"

namespace fhsim {

struct CapacitySegment {
  std::int64_t start_ms{0};
  Bps dl{0};
  Bps ul{0};

  bool operator==(const CapacitySegment&) const = default;
};

// Piecewise-constant fronthaul capacity over time, right-continuous.
struct CapacityProfile {
  // Stands in for "no fronthaul constraint" (4 Pbps).
  static constexpr Bps unlimited = 4'000'000'000'000'000;

  std::vector<CapacitySegment> segments{{0, unlimited, unlimited}};

  static CapacityProfile constant(Bps dl, Bps ul) { return CapacityProfile{{{0, dl, ul}}}; }

  bool symmetric() const {
    return std::all_of(segments.begin(), segments.end(),
                       [](const CapacitySegment& s) { return s.dl == s.ul; });
  }

  void validate() const {
    if (segments.empty()) throw ValidationError("capacity profile has no segments");
    if (segments.front().start_ms != 0)
      throw ValidationError("capacity profile must start at t = 0");
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (segments[i].dl < 0 || segments[i].ul < 0)
        throw ValidationError("capacity must be >= 0");
      if (i > 0 && segments[i].start_ms <= segments[i - 1].start_ms)
        throw ValidationError("capacity segment times must be strictly increasing");
    }
  }

  bool operator==(const CapacityProfile&) const = default;
};

inline DirPair capacity_at(const CapacityProfile& profile, std::int64_t t_ms) {
  if (t_ms < 0) throw OutOfRange("capacity_at: negative time");
  const CapacitySegment* cur = &profile.segments.front();
  for (const auto& seg : profile.segments) {
    if (seg.start_ms > t_ms) break;
    cur = &seg;
  }
  return DirPair{cur->dl, cur->ul};
}

enum class ThrottlePolicy { all_or_nothing, proportional };

// The calibration knobs of the model in one bag. Rates in bps, times in ms.
struct ModelParams {
  Bps control_overhead{300'000'000};  // constant antenna-control rate, each direction
  ThrottlePolicy throttle_policy{ThrottlePolicy::all_or_nothing};
  SchedulingPolicy scheduling{SchedulingPolicy::spread};
  int signaling_symbols{2};  // always-on UL symbols per UL slot
  int signaling_rbs{4};
  int horizon_slots{20};
  Ratio ack_ratio{Ratio::from_ppm(20'000)};  // UL demand per unit of DL access rate
  Ratio hysteresis{Ratio::from_ppm(100'000)};
  std::int64_t min_dwell_ms{2000};

  bool operator==(const ModelParams&) const = default;
};

// Access throughput and fronthaul load at one operating point.
struct ThrottleResult {
  Bps dl_access{0};
  Bps ul_access{0};
  DirPair fh{};
  bool feasible{false};
};

namespace detail {

// Fronthaul load when the access carries (dl_load, ul user load): grid
// scheduled with ack coupling, plus the constant control overhead.
inline DirPair fh_at_load(const CellConfig& cell, const UeProfile& ue, const TddPattern& tdd,
                          Bps dl_load, Bps ul_user_load, const ModelParams& params) {
  const Bps acc_ul = access_capacity(cell, ue, Direction::ul, tdd);
  const Bps ul_total = std::min<Bps>(ul_user_load + ack_traffic(dl_load, params.ack_ratio), acc_ul);
  FrameGrid grid = baseline_signaling(build_grid(cell, tdd, params.horizon_slots),
                                      params.signaling_symbols, params.signaling_rbs);
  const Allocation alloc = schedule_demand(grid, dl_load, ul_total, params.scheduling, cell, ue);
  DirPair fh = fh_load_from_grid(grid, alloc, cell);
  fh.dl += params.control_overhead;
  fh.ul += params.control_overhead;
  return fh;
}

}  // namespace detail

// Couples offered access demand to available fronthaul capacity.
//
// all_or_nothing: if the fronthaul load implied by the demand fits, the
// access runs at full rate; otherwise the binding direction stalls. A
// binding UL fronthaul stalls DL access as well, since DL acknowledgments
// ride the UL.
//
// proportional: scales the demand down by the largest factor whose implied
// load fits, found by bisection to 1 Mbps resolution.
inline ThrottleResult throttle(const CellConfig& cell, const UeProfile& ue, const TddPattern& tdd,
                               Bps demand_dl_bps, Bps demand_ul_bps, DirPair capacity,
                               ThrottlePolicy policy, const ModelParams& params) {
  if (demand_dl_bps < 0 || demand_ul_bps < 0) throw OutOfRange("demand must be >= 0");
  if (capacity.dl < 0 || capacity.ul < 0) throw OutOfRange("capacity must be >= 0");

  const Bps acc_dl = access_capacity(cell, ue, Direction::dl, tdd);
  const Bps acc_ul = access_capacity(cell, ue, Direction::ul, tdd);
  auto fits = [&](const DirPair& fh) { return fh.dl <= capacity.dl && fh.ul <= capacity.ul; };
  auto evaluate = [&](Bps dl_demand, Bps ul_demand) {
    return detail::fh_at_load(cell, ue, tdd, std::min(dl_demand, acc_dl),
                              std::min(ul_demand, acc_ul), params);
  };

  const DirPair full = evaluate(demand_dl_bps, demand_ul_bps);
  if (fits(full))
    return ThrottleResult{std::min(demand_dl_bps, acc_dl), std::min(demand_ul_bps, acc_ul), full,
                          true};

  if (policy == ThrottlePolicy::all_or_nothing) {
    const bool ul_binds = full.ul > capacity.ul;
    const Bps dl = 0;
    const Bps ul = ul_binds ? 0 : std::min(demand_ul_bps, acc_ul);
    return ThrottleResult{dl, ul, evaluate(dl, ul), false};
  }

  // proportional: bisect the demand scale in ppm. Zero demand may still not
  // fit (signaling floor + control overhead); report it honestly.
  std::int64_t lo = 0, hi = 1'000'000;
  auto at_scale = [&](std::int64_t ppm) {
    return std::pair<Bps, Bps>{muldiv(demand_dl_bps, ppm, 1'000'000),
                               muldiv(demand_ul_bps, ppm, 1'000'000)};
  };
  if (!fits(evaluate(0, 0)))
    return ThrottleResult{0, 0, evaluate(0, 0), false};
  const Bps dmax = std::max(demand_dl_bps, demand_ul_bps);
  for (int iter = 0; iter < 40; ++iter) {
    if (muldiv(dmax, hi - lo, 1'000'000) <= 1'000'000) break;  // 1 Mbps resolution
    const std::int64_t mid = lo + (hi - lo) / 2;
    const auto [d, u] = at_scale(mid);
    if (fits(evaluate(d, u)))
      lo = mid;
    else
      hi = mid;
  }
  const auto [d, u] = at_scale(lo);
  return ThrottleResult{std::min(d, acc_dl), std::min(u, acc_ul), evaluate(d, u), false};
}

// Minimum symmetric fronthaul capacity at which throttle sustains the full
// access capacity in the given traffic direction.
inline Bps threshold_capacity(const CellConfig& cell, const UeProfile& ue, const TddPattern& tdd,
                              const ModelParams& params, Direction direction_of_traffic) {
  const DirPair req = required_fh(cell, ue, tdd, params.control_overhead);
  if (direction_of_traffic == Direction::dl) return std::max(req.dl, req.ul);
  // UL-only traffic needs the full UL requirement; the DL side carries just
  // the control overhead.
  return std::max(req.ul, params.control_overhead);
}

}  // namespace fhsim

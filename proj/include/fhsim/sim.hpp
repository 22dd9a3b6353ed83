#pragma once

#include <atomic>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fhsim/controller.hpp"
#include "fhsim/core.hpp"
#include "fhsim/frame_grid.hpp"
#include "fhsim/fronthaul.hpp"
#include "fhsim/phy.hpp"

namespace fhsim {

struct Traffic {
  Bps dl_demand{1'000'000'000};
  Bps ul_demand{0};

  bool operator==(const Traffic&) const = default;
};

struct Scenario {
  ConfigCatalog catalog;
  UeProfile ue{};
  TddPattern tdd{};
  CapacityProfile capacity{};
  std::optional<std::string> capacity_trace_file;  // provenance, kept for round-trip
  Traffic traffic{};
  ModelParams params{};
  std::int64_t step_ms{100};
  std::int64_t duration_ms{10'000};
  std::uint64_t seed{1};
  Ratio demand_jitter{};  // +/- fraction of the constant demand, 0 = CBR

  void validate() const {
    catalog.validate();
    ue.validate();
    tdd.validate();
    capacity.validate();
    if (step_ms <= 0) throw ValidationError("sim: step_s must be > 0");
    if (duration_ms < step_ms) throw ValidationError("sim: duration_s must be >= step_s");
    if (traffic.dl_demand < 0 || traffic.ul_demand < 0)
      throw ValidationError("traffic: demand must be >= 0");
    if (demand_jitter.ppm() < 0 || demand_jitter.ppm() > 500'000)
      throw ValidationError("sim: jitter must be in [0, 0.5]");
    if (params.horizon_slots <= 0 || params.horizon_slots % tdd.period_slots() != 0)
      throw ValidationError("sim: horizon_slots must be a positive multiple of the TDD period");
    if (params.signaling_symbols < 0 || params.signaling_symbols > Numerology::symbols_per_slot)
      throw ValidationError("sim: signaling_symbols outside 0..14");
    for (const auto& cell : catalog.configs)
      if (params.signaling_rbs < 0 || params.signaling_rbs > cell.rb_count())
        throw ValidationError("sim: signaling_rbs exceed bandwidth of cell." + cell.name);
    if (params.ack_ratio.ppm() < 0 || params.ack_ratio.ppm() > 200'000)
      throw ValidationError("traffic: ack_ratio outside [0, 0.2]");
    if (params.control_overhead < 0)
      throw ValidationError("fronthaul: control_overhead_mbps must be >= 0");
    if (params.hysteresis.ppm() < 0) throw ValidationError("controller: hysteresis must be >= 0");
    if (params.min_dwell_ms < 0) throw ValidationError("controller: dwell_s must be >= 0");
  }

  bool operator==(const Scenario&) const = default;
};

struct TimeSeriesRow {
  std::int64_t t_ms{0};
  Bps capacity_dl{0};
  Bps capacity_ul{0};
  std::string config;
  Bps offered_dl{0};
  Bps offered_ul{0};
  Bps achieved_dl{0};
  Bps achieved_ul{0};
  Bps fh_dl{0};
  Bps fh_ul{0};
  std::string event;  // "from->to" on a reconfiguration, else empty
};

struct TimeSeries {
  std::vector<TimeSeriesRow> rows;
};

namespace detail {

// Deterministic symmetric jitter draw in [-amplitude, +amplitude] ppm.
inline std::int64_t jitter_ppm(std::mt19937_64& rng, Ratio amplitude) {
  if (amplitude.ppm() == 0) return 0;
  const std::uint64_t span = static_cast<std::uint64_t>(2 * amplitude.ppm() + 1);
  return static_cast<std::int64_t>(rng() % span) - amplitude.ppm();
}

template <typename Fn>
inline void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(jobs, static_cast<int>(count));
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Time-stepped co-simulation: sample capacity, adapt the cell configuration,
// schedule the offered demand, throttle against the link. Deterministic for
// a given seed; the only randomness is the optional demand jitter.
inline TimeSeries run(const Scenario& sc) {
  sc.validate();
  TimeSeries out;
  std::mt19937_64 rng(sc.seed);
  ControllerState state = ControllerState::initial(sc.catalog, capacity_at(sc.capacity, 0), sc.ue,
                                                   sc.tdd, sc.params);
  const std::int64_t steps = sc.duration_ms / sc.step_ms;
  out.rows.reserve(static_cast<std::size_t>(steps));
  for (std::int64_t k = 0; k < steps; ++k) {
    const std::int64_t t = k * sc.step_ms;
    const DirPair cap = capacity_at(sc.capacity, t);
    auto [next_state, event] =
        controller_step(state, t, cap, sc.catalog, sc.ue, sc.tdd, sc.params);
    state = next_state;
    const CellConfig& cell = *sc.catalog.find(state.current);

    const Bps offered_dl =
        sc.traffic.dl_demand +
        muldiv(sc.traffic.dl_demand, detail::jitter_ppm(rng, sc.demand_jitter), 1'000'000);
    const Bps offered_ul =
        sc.traffic.ul_demand +
        muldiv(sc.traffic.ul_demand, detail::jitter_ppm(rng, sc.demand_jitter), 1'000'000);

    const ThrottleResult th = throttle(cell, sc.ue, sc.tdd, offered_dl, offered_ul, cap,
                                       sc.params.throttle_policy, sc.params);
    TimeSeriesRow row{t,
                      cap.dl,
                      cap.ul,
                      state.current,
                      offered_dl,
                      offered_ul,
                      th.dl_access,
                      th.ul_access,
                      th.fh.dl,
                      th.fh.ul,
                      event ? event->from + "->" + event->to : ""};
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct SweepRow {
  Bps capacity{0};
  std::string config;
  Bps achieved_dl{0};
  Bps achieved_ul{0};
  Bps fh_dl{0};
  Bps fh_ul{0};
};

// One throttle evaluation per (symmetric capacity, config) point over
// [cap_min, cap_max). Points are independent; output order is by capacity
// then catalog order, regardless of job count.
inline std::vector<SweepRow> sweep_capacity(const Scenario& sc, Bps cap_min, Bps cap_max,
                                            Bps cap_step, int jobs = 1) {
  sc.validate();
  if (cap_step <= 0) throw OutOfRange("sweep: step must be > 0");
  if (cap_min < 0 || cap_min >= cap_max) return {};
  const std::size_t n_caps = static_cast<std::size_t>((cap_max - cap_min + cap_step - 1) / cap_step);
  const std::size_t n_cfgs = sc.catalog.configs.size();
  std::vector<SweepRow> rows(n_caps * n_cfgs);
  detail::parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const Bps cap = cap_min + static_cast<Bps>(i / n_cfgs) * cap_step;
    const CellConfig& cell = sc.catalog.configs[i % n_cfgs];
    const ThrottleResult th =
        throttle(cell, sc.ue, sc.tdd, sc.traffic.dl_demand, sc.traffic.ul_demand,
                 DirPair{cap, cap}, sc.params.throttle_policy, sc.params);
    rows[i] = SweepRow{cap, cell.name, th.dl_access, th.ul_access, th.fh.dl, th.fh.ul};
  });
  return rows;
}

struct CurveRow {
  Bps offered{0};
  std::string config;
  Bps access{0};
  Bps fh_dl{0};
  Bps fh_ul{0};
};

// Access-vs-fronthaul relation with no fronthaul constraint: the demand in
// one direction is swept linearly and the raw grid loads are recorded
// (control overhead excluded, so per-config ratios stay exact).
inline std::vector<CurveRow> curve_access_vs_fh(const Scenario& sc, Direction direction,
                                                Bps demand_max, int n_points, int jobs = 1) {
  sc.validate();
  if (n_points < 2) throw OutOfRange("curve: need at least 2 points");
  if (demand_max < 0) throw OutOfRange("curve: demand_max must be >= 0");
  const std::size_t n_cfgs = sc.catalog.configs.size();
  std::vector<CurveRow> rows(static_cast<std::size_t>(n_points) * n_cfgs);
  detail::parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const std::size_t point = i / n_cfgs;
    const Bps offered = muldiv(demand_max, static_cast<std::int64_t>(point), n_points - 1);
    const CellConfig& cell = sc.catalog.configs[i % n_cfgs];

    const Bps acc = access_capacity(cell, sc.ue, direction, sc.tdd);
    const Bps achieved = std::min(offered, acc);
    const Bps dl_load = direction == Direction::dl ? achieved : 0;
    const Bps ul_user = direction == Direction::ul ? achieved : 0;
    const Bps acc_ul = access_capacity(cell, sc.ue, Direction::ul, sc.tdd);
    const Bps ul_total =
        std::min<Bps>(ul_user + ack_traffic(dl_load, sc.params.ack_ratio), acc_ul);

    FrameGrid grid = baseline_signaling(build_grid(cell, sc.tdd, sc.params.horizon_slots),
                                        sc.params.signaling_symbols, sc.params.signaling_rbs);
    const Allocation alloc =
        schedule_demand(grid, dl_load, ul_total, sc.params.scheduling, cell, sc.ue);
    const DirPair fh = fh_load_from_grid(grid, alloc, cell);
    rows[i] = CurveRow{offered, cell.name, achieved, fh.dl, fh.ul};
  });
  return rows;
}

}  // namespace fhsim

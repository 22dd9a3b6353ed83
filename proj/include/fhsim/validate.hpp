#pragma once

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fhsim/csv.hpp"
#include "fhsim/scenario_io.hpp"
#include "fhsim/sim.hpp"

namespace fhsim {

struct CheckResult {
  std::string name;
  bool pass{false};
  std::string detail;
};

namespace detail {

inline void check(std::vector<CheckResult>& out, const std::string& name, bool pass,
                  const std::string& detail = "") {
  out.push_back(CheckResult{name, pass, detail});
}

}  // namespace detail

// Model invariant battery for a loaded scenario. Every check is
// deterministic; randomized checks derive from the scenario seed.
inline std::vector<CheckResult> validate_scenario(const Scenario& sc) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(sc.seed);
  const auto& cfgs = sc.catalog.configs;

  // duty partition
  {
    const Frac d = duty(sc.tdd, Direction::dl);
    const Frac u = duty(sc.tdd, Direction::ul);
    const Frac g = gap_fraction(sc.tdd);
    const bool ok = d.num * u.den * g.den + u.num * d.den * g.den + g.num * d.den * u.den ==
                    d.den * u.den * g.den;
    detail::check(out, "tdd-duty-partition", ok,
                  "dl " + std::to_string(d.value()) + " + ul " + std::to_string(u.value()) +
                      " + gap " + std::to_string(g.value()));
  }

  // zero inputs give zero rates
  {
    CellConfig zero = cfgs.front();
    zero.rb_count_override = 0;
    const DirPair req = required_fh(zero, sc.ue, sc.tdd, 0);
    detail::check(out, "zero-rb-zero-rates", req.dl == 0 && req.ul == 0);
  }

  // UL fronthaul trade invariance: doubling RBs while halving ports
  {
    bool ok = true;
    int pairs = 0;
    for (const auto& a : cfgs)
      for (const auto& b : cfgs) {
        if (a.rb_count() != 2 * b.rb_count() || 2 * a.gnb_ports != b.gnb_ports ||
            a.n_iq != b.n_iq)
          continue;
        ++pairs;
        ok = ok && fh_rate_ul(a, Frac{1, 1}, duty(sc.tdd, Direction::ul)) ==
                       fh_rate_ul(b, Frac{1, 1}, duty(sc.tdd, Direction::ul));
      }
    detail::check(out, "ul-rate-trade-invariance", ok, std::to_string(pairs) + " pair(s)");
  }

  // halved bandwidth halves DL fronthaul rate and access capacity
  {
    bool ok = true;
    int pairs = 0;
    for (const auto& a : cfgs)
      for (const auto& b : cfgs) {
        if (a.rb_count() != 2 * b.rb_count() || a.gnb_ports != b.gnb_ports ||
            a.qm_dl != b.qm_dl || a.code_rate != b.code_rate || a.overhead != b.overhead)
          continue;
        ++pairs;
        const Frac d = duty(sc.tdd, Direction::dl);
        const int layers = effective_layers(a, sc.ue, Direction::dl);
        ok = ok &&
             fh_rate_dl(a, layers, a.rb_count(), d) == 2 * fh_rate_dl(b, layers, b.rb_count(), d);
        const Bps acc_a = access_capacity(a, sc.ue, Direction::dl, sc.tdd);
        const Bps acc_b = access_capacity(b, sc.ue, Direction::dl, sc.tdd);
        ok = ok && (acc_a - 2 * acc_b >= -1 && acc_a - 2 * acc_b <= 1);
      }
    detail::check(out, "factor-two-scaling", ok, std::to_string(pairs) + " pair(s)");
  }

  // fronthaul requirement is set by the uplink for every catalog entry
  {
    bool ok = true;
    for (const auto& c : cfgs) {
      const DirPair req = required_fh(c, sc.ue, sc.tdd, sc.params.control_overhead);
      ok = ok && req.ul >= req.dl;
    }
    detail::check(out, "threshold-bound-by-ul", ok);
  }

  // saturated grid reproduces the closed-form rates
  {
    bool dl_ok = true, ul_ok = true;
    for (const auto& c : cfgs) {
      FrameGrid grid = baseline_signaling(build_grid(c, sc.tdd, sc.params.horizon_slots),
                                          sc.params.signaling_symbols, sc.params.signaling_rbs);
      const Bps acc_dl = access_capacity(c, sc.ue, Direction::dl, sc.tdd);
      const Bps acc_ul = access_capacity(c, sc.ue, Direction::ul, sc.tdd);
      const Allocation alloc =
          schedule_demand(grid, acc_dl, acc_ul, sc.params.scheduling, c, sc.ue);
      const DirPair fh = fh_load_from_grid(grid, alloc, c);
      const Bps formula_dl = fh_rate_dl(c, effective_layers(c, sc.ue, Direction::dl),
                                        c.rb_count(), duty(sc.tdd, Direction::dl));
      const Bps quantum = muldiv(Numerology::n_sc_per_rb * alloc.qm_dl, 1'000'000'000,
                                 grid.horizon_duration_ns());
      dl_ok = dl_ok && fh.dl >= formula_dl - quantum && fh.dl <= formula_dl + quantum;
      ul_ok = ul_ok && fh.ul == fh_rate_ul(c, Frac{1, 1}, duty(sc.tdd, Direction::ul));
    }
    detail::check(out, "grid-vs-formula-dl", dl_ok, "within one RB-symbol quantum");
    detail::check(out, "grid-vs-formula-ul", ul_ok, "full transport at saturation");
  }

  // symbol transport rule against an independent RE-enumeration oracle
  {
    const std::vector<std::string> patterns{"DU", "DSU", "DDSU", "DDDSU"};
    bool ok = true;
    for (int trial = 0; trial < 50 && ok; ++trial) {
      TddPattern tdd;
      tdd.slot_sequence = patterns[rng() % patterns.size()];
      tdd.s_slot_split = {6, 2, 6};
      tdd.s_slot_carries_data = rng() % 2 == 0;
      CellConfig cell = cfgs.front();
      cell.rb_count_override = 2 + static_cast<std::int64_t>(rng() % 7);
      cell.gnb_ports = 1 + static_cast<int>(rng() % 4);
      const int horizon = tdd.period_slots() * (1 + static_cast<int>(rng() % 3));
      FrameGrid grid = build_grid(cell, tdd, horizon);
      std::set<std::pair<int, int>> touched_ul;  // oracle bookkeeping, first principles
      auto ul_by_layout = [&](int slot, int sym) {
        const char t = tdd.slot_sequence[slot % tdd.period_slots()];
        return t == 'U' || (t == 'S' && sym >= Numerology::symbols_per_slot - tdd.s_slot_split[2]);
      };
      const int sig_syms = static_cast<int>(rng() % 3);
      const int sig_rbs = static_cast<int>(rng() % (*cell.rb_count_override + 1));
      grid = baseline_signaling(std::move(grid), sig_syms, sig_rbs);
      if (sig_rbs > 0)
        for (int s = 0; s < horizon; ++s)
          if (tdd.slot_sequence[s % tdd.period_slots()] == 'U')
            for (int k = 0; k < sig_syms; ++k)
              touched_ul.insert({s, Numerology::symbols_per_slot - 1 - k});
      const int sprinkles = static_cast<int>(rng() % 40);
      for (int n = 0; n < sprinkles; ++n) {
        const int slot = static_cast<int>(rng() % horizon);
        const int sym = static_cast<int>(rng() % Numerology::symbols_per_slot);
        const std::int64_t rb = static_cast<std::int64_t>(rng() % *cell.rb_count_override);
        const int layer = static_cast<int>(rng() % cell.gnb_ports);
        const Direction dir = ul_by_layout(slot, sym) ? Direction::ul : Direction::dl;
        if (!grid.data_legal(slot, sym, dir)) continue;
        grid.set_occupied(slot, sym, rb, layer);
        if (dir == Direction::ul) touched_ul.insert({slot, sym});
      }
      ok = ul_transport_symbols(grid) == static_cast<int>(touched_ul.size());
    }
    detail::check(out, "ul-transport-oracle", ok, "50 randomized grids");
  }

  // achieved access is non-decreasing in capacity (proportional throttling
  // resolves to 1 Mbps, which bounds its wiggle room)
  {
    const CellConfig& c = cfgs.front();
    const Bps thr = threshold_capacity(c, sc.ue, sc.tdd, sc.params, Direction::dl);
    const Bps slack =
        sc.params.throttle_policy == ThrottlePolicy::proportional ? 1'000'000 : 0;
    bool ok = true;
    Bps prev = -1;
    for (int i = 0; i <= 12; ++i) {
      const Bps cap = muldiv(thr, i, 8);
      const ThrottleResult t =
          throttle(c, sc.ue, sc.tdd, sc.traffic.dl_demand, sc.traffic.ul_demand,
                   DirPair{cap, cap}, sc.params.throttle_policy, sc.params);
      ok = ok && t.dl_access + slack >= prev;
      prev = t.dl_access;
    }
    detail::check(out, "throttle-monotonicity", ok);
  }

  // on/off shape: exactly one jump, at the threshold
  {
    bool ok = true;
    for (const auto& c : cfgs) {
      const Bps thr = threshold_capacity(c, sc.ue, sc.tdd, sc.params, Direction::dl);
      const Bps step = 100'000'000;
      int jumps = 0;
      Bps jump_at = -1, prev = -1;
      for (Bps cap = thr > 5 * step ? thr - 5 * step : 0; cap < thr + 5 * step; cap += step) {
        const ThrottleResult t =
            throttle(c, sc.ue, sc.tdd, sc.traffic.dl_demand, sc.traffic.ul_demand,
                     DirPair{cap, cap}, ThrottlePolicy::all_or_nothing, sc.params);
        if (prev >= 0 && t.dl_access != prev) {
          ++jumps;
          jump_at = cap;
        }
        prev = t.dl_access;
      }
      ok = ok && jumps == 1 && jump_at >= thr && jump_at - step < thr;
    }
    detail::check(out, "throttle-on-off-shape", ok, "single jump within one step of threshold");
  }

  // controller selection equals exhaustive enumeration
  {
    Bps max_thr = 0;
    for (const auto& c : cfgs)
      max_thr = std::max(max_thr, threshold_capacity(c, sc.ue, sc.tdd, sc.params, Direction::dl));
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
      const Bps cap = static_cast<Bps>(rng() % static_cast<std::uint64_t>(max_thr * 3 / 2 + 1));
      const Selection sel = select_config(sc.catalog, DirPair{cap, cap}, sc.ue, sc.tdd, sc.params);
      const CellConfig* best = nullptr;
      for (const auto& c : cfgs) {  // brute force
        const DirPair req = required_fh(c, sc.ue, sc.tdd, sc.params.control_overhead);
        if (req.dl > cap || req.ul > cap) continue;
        if (!best ||
            access_capacity(c, sc.ue, Direction::dl, sc.tdd) >
                access_capacity(*best, sc.ue, Direction::dl, sc.tdd) ||
            (access_capacity(c, sc.ue, Direction::dl, sc.tdd) ==
                 access_capacity(*best, sc.ue, Direction::dl, sc.tdd) &&
             (c.gnb_ports < best->gnb_ports ||
              (c.gnb_ports == best->gnb_ports && c.bandwidth_mhz < best->bandwidth_mhz))))
          best = &c;
      }
      if (best)
        ok = sel.feasible && sel.name == best->name;
      else
        ok = !sel.feasible;
    }
    detail::check(out, "controller-selection-oracle", ok, "100 random capacities");
  }

  // scenario round-trip through the canonical dump
  {
    bool ok = false;
    std::string why;
    try {
      const Scenario back = parse_scenario(dump_scenario(sc), "<dump>");
      ok = back == sc;
    } catch (const Error& e) {
      why = e.what();
    }
    detail::check(out, "scenario-roundtrip", ok, why);
  }

  // byte-identical reruns
  {
    Scenario short_sc = sc;
    short_sc.duration_ms = std::min<std::int64_t>(sc.duration_ms, 20 * sc.step_ms);
    std::ostringstream a, b;
    write_timeseries_csv(a, run(short_sc));
    write_timeseries_csv(b, run(short_sc));
    detail::check(out, "determinism", a.str() == b.str());
  }

  return out;
}

}  // namespace fhsim

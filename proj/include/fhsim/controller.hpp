#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fhsim/core.hpp"
#include "fhsim/fronthaul.hpp"
#include "fhsim/phy.hpp"

namespace fhsim {

struct ConfigCatalog {
  std::vector<CellConfig> configs;

  const CellConfig* find(std::string_view name) const {
    for (const auto& c : configs)
      if (c.name == name) return &c;
    return nullptr;
  }

  void validate() const {
    if (configs.empty()) throw ValidationError("catalog: no cell configurations");
    for (std::size_t i = 0; i < configs.size(); ++i) {
      configs[i].validate();
      for (std::size_t j = i + 1; j < configs.size(); ++j)
        if (configs[i].name == configs[j].name)
          throw ValidationError("catalog: duplicate cell name '" + configs[i].name + "'");
    }
  }

  bool operator==(const ConfigCatalog&) const = default;
};

struct Selection {
  std::string name;
  bool feasible{false};
};

namespace detail {

inline Bps symmetric_requirement(const CellConfig& cell, const UeProfile& ue,
                                 const TddPattern& tdd, const ModelParams& params) {
  const DirPair req = required_fh(cell, ue, tdd, params.control_overhead);
  return std::max(req.dl, req.ul);
}

}  // namespace detail

// Greedy feasible-max policy: among configs whose full fronthaul
// requirement fits the capacity in both directions, pick the one with the
// highest DL access capacity; ties go to fewer ports, then lower bandwidth.
// With nothing feasible, the cheapest config is reported, flagged.
inline Selection select_config(const ConfigCatalog& catalog, DirPair capacity,
                               const UeProfile& ue, const TddPattern& tdd,
                               const ModelParams& params) {
  catalog.validate();
  const CellConfig* best = nullptr;
  Bps best_access = -1;
  const CellConfig* cheapest = nullptr;
  Bps cheapest_req = std::numeric_limits<Bps>::max();

  for (const auto& cell : catalog.configs) {
    const DirPair req = required_fh(cell, ue, tdd, params.control_overhead);
    const Bps sym_req = std::max(req.dl, req.ul);
    if (sym_req < cheapest_req) {
      cheapest_req = sym_req;
      cheapest = &cell;
    }
    if (req.dl > capacity.dl || req.ul > capacity.ul) continue;
    const Bps access = access_capacity(cell, ue, Direction::dl, tdd);
    const bool better =
        !best || access > best_access ||
        (access == best_access &&
         (cell.gnb_ports < best->gnb_ports ||
          (cell.gnb_ports == best->gnb_ports && cell.bandwidth_mhz < best->bandwidth_mhz)));
    if (better) {
      best = &cell;
      best_access = access;
    }
  }
  if (best) return Selection{best->name, true};
  return Selection{cheapest->name, false};
}

struct ReconfigEvent {
  std::int64_t t_ms{0};
  std::string from;
  std::string to;
};

struct ControllerState {
  std::string current;
  std::int64_t last_switch_ms{std::numeric_limits<std::int64_t>::min() / 2};

  static ControllerState initial(const ConfigCatalog& catalog, DirPair capacity,
                                 const UeProfile& ue, const TddPattern& tdd,
                                 const ModelParams& params) {
    return ControllerState{select_config(catalog, capacity, ue, tdd, params).name,
                           std::numeric_limits<std::int64_t>::min() / 2};
  }
};

// One controller tick. Downgrades (towards a cheaper fronthaul requirement)
// apply immediately; upgrades additionally need the hysteresis headroom on
// the new config's requirement and the minimum dwell since the last switch.
inline std::pair<ControllerState, std::optional<ReconfigEvent>> controller_step(
    ControllerState state, std::int64_t t_ms, DirPair capacity, const ConfigCatalog& catalog,
    const UeProfile& ue, const TddPattern& tdd, const ModelParams& params) {
  if (t_ms < state.last_switch_ms) throw OutOfRange("controller stepped backwards in time");

  const Selection sel = select_config(catalog, capacity, ue, tdd, params);
  if (sel.name == state.current) return {state, std::nullopt};

  const CellConfig* next = catalog.find(sel.name);
  const CellConfig* cur = catalog.find(state.current);
  const bool upgrade =
      cur && detail::symmetric_requirement(*next, ue, tdd, params) >
                 detail::symmetric_requirement(*cur, ue, tdd, params);
  if (upgrade) {
    const DirPair req = required_fh(*next, ue, tdd, params.control_overhead);
    const std::int64_t headroom_ppm = 1'000'000 + params.hysteresis.ppm();
    const bool enough_headroom =
        static_cast<__int128>(capacity.dl) * 1'000'000 >=
            static_cast<__int128>(req.dl) * headroom_ppm &&
        static_cast<__int128>(capacity.ul) * 1'000'000 >=
            static_cast<__int128>(req.ul) * headroom_ppm;
    if (!enough_headroom || t_ms - state.last_switch_ms < params.min_dwell_ms)
      return {state, std::nullopt};
  }

  ReconfigEvent event{t_ms, state.current, sel.name};
  state.current = sel.name;
  state.last_switch_ms = t_ms;
  return {state, event};
}

}  // namespace fhsim

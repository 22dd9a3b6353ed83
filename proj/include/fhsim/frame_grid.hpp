#pragma once

#include <utility>
#include <vector>

#include "fhsim/core.hpp"
#include "fhsim/phy.hpp"

namespace fhsim {

enum class SchedulingPolicy { frequency_first, time_first, spread };

// Occupancy bitmap over (slot, symbol, RB, layer) for one scheduling
// horizon, plus a separate mask of REs reserved by always-on signaling.
// User data never overlaps the signaling mask; both feed the UL
// symbol-transport rule.
class FrameGrid {
 public:
  FrameGrid(const CellConfig& cell, const TddPattern& tdd, int horizon_slots)
      : tdd_(tdd),
        horizon_slots_(horizon_slots),
        n_rb_(cell.rb_count()),
        layers_(cell.gnb_ports),
        slot_ns_(cell.numerology.slot_duration_ns()),
        occ_(static_cast<std::size_t>(horizon_slots) * symbols_per_slot_ * n_rb_ * layers_, false),
        sig_(static_cast<std::size_t>(horizon_slots) * symbols_per_slot_ * n_rb_, false) {}

  int horizon_slots() const { return horizon_slots_; }
  std::int64_t n_rb() const { return n_rb_; }
  int layers() const { return layers_; }
  const TddPattern& tdd() const { return tdd_; }
  std::int64_t horizon_duration_ns() const { return slot_ns_ * horizon_slots_; }

  char slot_type(int slot) const { return tdd_.slot_type(slot); }

  // Layout direction of a symbol position; gap symbols return no direction.
  enum class SymbolKind { dl, ul, gap };

  SymbolKind symbol_kind(int slot, int sym) const {
    switch (slot_type(slot)) {
      case 'D': return SymbolKind::dl;
      case 'U': return SymbolKind::ul;
      default:
        if (sym < tdd_.s_slot_split[0]) return SymbolKind::dl;
        if (sym >= symbols_per_slot_ - tdd_.s_slot_split[2]) return SymbolKind::ul;
        return SymbolKind::gap;
    }
  }

  // Shared-channel data may use D/U slots always, S-slot symbols only when
  // the pattern says the special slot carries data.
  bool data_legal(int slot, int sym, Direction dir) const {
    const SymbolKind k = symbol_kind(slot, sym);
    if (k == SymbolKind::gap) return false;
    if (slot_type(slot) == 'S' && !tdd_.s_slot_carries_data) return false;
    return (k == SymbolKind::dl) == (dir == Direction::dl);
  }

  bool occupied(int slot, int sym, std::int64_t rb, int layer) const {
    return occ_[cell_index(slot, sym, rb, layer)];
  }

  void set_occupied(int slot, int sym, std::int64_t rb, int layer) {
    const SymbolKind k = symbol_kind(slot, sym);
    if (k == SymbolKind::gap)
      throw OutOfRange("occupancy on a gap symbol");
    if (slot_type(slot) == 'S' && !tdd_.s_slot_carries_data)
      throw OutOfRange("occupancy on a non-data special slot");
    occ_[cell_index(slot, sym, rb, layer)] = true;
  }

  void clear_occupied(int slot, int sym, std::int64_t rb, int layer) {
    occ_[cell_index(slot, sym, rb, layer)] = false;
  }

  bool signaling(int slot, int sym, std::int64_t rb) const {
    return sig_[re_index(slot, sym, rb)];
  }

  void mark_signaling(int slot, int sym, std::int64_t rb) {
    if (symbol_kind(slot, sym) != SymbolKind::ul)
      throw OutOfRange("signaling mask outside UL symbols");
    sig_[re_index(slot, sym, rb)] = true;
  }

  // Any data cell or signaling RE in the symbol.
  bool any_payload(int slot, int sym) const {
    for (std::int64_t rb = 0; rb < n_rb_; ++rb) {
      if (sig_[re_index(slot, sym, rb)]) return true;
      for (int l = 0; l < layers_; ++l)
        if (occ_[cell_index(slot, sym, rb, l)]) return true;
    }
    return false;
  }

  // Data-legal symbol positions for a direction, in time order.
  std::vector<std::pair<int, int>> data_symbols(Direction dir) const {
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < horizon_slots_; ++s)
      for (int y = 0; y < symbols_per_slot_; ++y)
        if (data_legal(s, y, dir)) out.emplace_back(s, y);
    return out;
  }

  // UL-layout symbol positions (transport candidates), in time order.
  std::vector<std::pair<int, int>> ul_symbols() const {
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < horizon_slots_; ++s)
      for (int y = 0; y < symbols_per_slot_; ++y)
        if (symbol_kind(s, y) == SymbolKind::ul) out.emplace_back(s, y);
    return out;
  }

 private:
  static constexpr int symbols_per_slot_ = Numerology::symbols_per_slot;

  std::size_t re_index(int slot, int sym, std::int64_t rb) const {
    check_bounds(slot, sym, rb, 0);
    return (static_cast<std::size_t>(slot) * symbols_per_slot_ + sym) * n_rb_ + rb;
  }

  std::size_t cell_index(int slot, int sym, std::int64_t rb, int layer) const {
    check_bounds(slot, sym, rb, layer);
    return ((static_cast<std::size_t>(slot) * symbols_per_slot_ + sym) * n_rb_ + rb) * layers_ +
           layer;
  }

  void check_bounds(int slot, int sym, std::int64_t rb, int layer) const {
    if (slot < 0 || slot >= horizon_slots_ || sym < 0 || sym >= symbols_per_slot_ || rb < 0 ||
        rb >= n_rb_ || layer < 0 || layer >= layers_)
      throw OutOfRange("grid index out of bounds");
  }

  TddPattern tdd_;
  int horizon_slots_;
  std::int64_t n_rb_;
  int layers_;
  std::int64_t slot_ns_;
  std::vector<bool> occ_;
  std::vector<bool> sig_;
};

inline FrameGrid build_grid(const CellConfig& cell, const TddPattern& tdd, int horizon_slots) {
  tdd.validate();
  if (horizon_slots <= 0 || horizon_slots % tdd.period_slots() != 0)
    throw BadHorizon("horizon of " + std::to_string(horizon_slots) +
                     " slots is not a multiple of the " + std::to_string(tdd.period_slots()) +
                     "-slot TDD period");
  return FrameGrid(cell, tdd, horizon_slots);
}

// Marks the trailing symbols of every full UL slot as carrying always-on
// signaling over the first few RBs (layer 0). These symbols ride the UL
// fronthaul even at zero user traffic.
inline FrameGrid baseline_signaling(FrameGrid grid, int ul_signaling_symbols_per_ul_slot,
                                    int ul_signaling_rbs) {
  if (ul_signaling_symbols_per_ul_slot < 0 ||
      ul_signaling_symbols_per_ul_slot > Numerology::symbols_per_slot)
    throw OutOfRange("signaling symbols per UL slot outside 0..14");
  if (ul_signaling_rbs < 0 || ul_signaling_rbs > grid.n_rb())
    throw OutOfRange("signaling RBs exceed the cell bandwidth");
  for (int s = 0; s < grid.horizon_slots(); ++s) {
    if (grid.slot_type(s) != 'U') continue;
    for (int k = 0; k < ul_signaling_symbols_per_ul_slot; ++k)
      for (std::int64_t rb = 0; rb < ul_signaling_rbs; ++rb)
        grid.mark_signaling(s, Numerology::symbols_per_slot - 1 - k, rb);
  }
  return grid;
}

// Result of scheduling one horizon of demand onto a grid.
struct Allocation {
  std::int64_t dl_bits_carried{0};
  std::int64_t ul_bits_carried{0};
  std::int64_t dl_cells{0};  // occupied (rb, symbol, layer) data cells
  std::int64_t ul_cells{0};
  int qm_dl{0};  // modulation the cells were scheduled with
  int qm_ul{0};
};

namespace detail {

// Goodput of one RB-symbol-layer cell, in bits scaled by 1e12:
// 12 REs * Q_M * R_MAX * (1 - OH).
inline __int128 cell_goodput_scaled(int qm, const CellConfig& cell) {
  return static_cast<__int128>(Numerology::n_sc_per_rb) * qm * cell.code_rate.ppm() *
         cell.overhead.complement().ppm();
}

inline std::int64_t fill_direction(FrameGrid& grid, Direction dir, std::int64_t quanta,
                                   SchedulingPolicy policy, int layers) {
  const auto syms = grid.data_symbols(dir);
  const std::int64_t n_rb = grid.n_rb();
  auto free_cell = [&](const std::pair<int, int>& p, std::int64_t rb, int l) {
    if (l == 0 && grid.signaling(p.first, p.second, rb)) return false;
    return !grid.occupied(p.first, p.second, rb, l);
  };
  std::int64_t placed = 0;
  auto place = [&](const std::pair<int, int>& p, std::int64_t rb, int l) {
    grid.set_occupied(p.first, p.second, rb, l);
    ++placed;
  };

  if (quanta <= 0 || syms.empty() || layers <= 0) return 0;

  switch (policy) {
    case SchedulingPolicy::frequency_first:
      for (const auto& p : syms)
        for (int l = 0; l < layers; ++l)
          for (std::int64_t rb = 0; rb < n_rb; ++rb) {
            if (!free_cell(p, rb, l)) continue;
            place(p, rb, l);
            if (placed == quanta) return placed;
          }
      return placed;

    case SchedulingPolicy::time_first:
      for (int l = 0; l < layers; ++l)
        for (std::int64_t rb = 0; rb < n_rb; ++rb)
          for (const auto& p : syms) {
            if (!free_cell(p, rb, l)) continue;
            place(p, rb, l);
            if (placed == quanta) return placed;
          }
      return placed;

    case SchedulingPolicy::spread: {
      // Round-robin one cell per symbol visit, deepening only once every
      // symbol has been touched. Cursor = linear (layer, rb) index.
      std::vector<std::int64_t> cursor(syms.size(), 0);
      const std::int64_t cells_per_symbol = n_rb * layers;
      bool progress = true;
      while (progress) {
        progress = false;
        for (std::size_t i = 0; i < syms.size(); ++i) {
          std::int64_t& c = cursor[i];
          while (c < cells_per_symbol &&
                 !free_cell(syms[i], c % n_rb, static_cast<int>(c / n_rb)))
            ++c;
          if (c >= cells_per_symbol) continue;
          place(syms[i], c % n_rb, static_cast<int>(c / n_rb));
          ++c;
          progress = true;
          if (placed == quanta) return placed;
        }
      }
      return placed;
    }
  }
  return placed;
}

}  // namespace detail

// Fills the grid until the carried goodput covers the per-horizon demand or
// resources run out. Overshoot is bounded by one RB-symbol-layer quantum.
inline Allocation schedule_demand(FrameGrid& grid, Bps dl_demand_bps, Bps ul_demand_bps,
                                  SchedulingPolicy policy, const CellConfig& cell,
                                  const UeProfile& ue) {
  if (dl_demand_bps < 0 || ul_demand_bps < 0) throw OutOfRange("demand must be >= 0");
  Allocation alloc;
  alloc.qm_dl = std::min(cell.qm_dl, ue.max_qm_dl);
  alloc.qm_ul = std::min(cell.qm_ul, ue.max_qm_ul);

  const std::int64_t horizon_ns = grid.horizon_duration_ns();
  auto run = [&](Direction dir, Bps demand, int qm) {
    const __int128 target_bits = static_cast<__int128>(demand) * horizon_ns / 1'000'000'000;
    const __int128 goodput = detail::cell_goodput_scaled(qm, cell);
    if (goodput <= 0) return std::int64_t{0};
    const __int128 needed = (target_bits * 1'000'000'000'000 + goodput - 1) / goodput;
    const std::int64_t quanta =
        needed > static_cast<__int128>(INT64_MAX) ? INT64_MAX : static_cast<std::int64_t>(needed);
    const std::int64_t placed =
        detail::fill_direction(grid, dir, quanta, policy, effective_layers(cell, ue, dir));
    return placed;
  };

  alloc.dl_cells = run(Direction::dl, dl_demand_bps, alloc.qm_dl);
  alloc.ul_cells = run(Direction::ul, ul_demand_bps, alloc.qm_ul);
  alloc.dl_bits_carried = static_cast<std::int64_t>(
      static_cast<__int128>(alloc.dl_cells) * detail::cell_goodput_scaled(alloc.qm_dl, cell) /
      1'000'000'000'000);
  alloc.ul_bits_carried = static_cast<std::int64_t>(
      static_cast<__int128>(alloc.ul_cells) * detail::cell_goodput_scaled(alloc.qm_ul, cell) /
      1'000'000'000'000);
  return alloc;
}

// Count of UL symbol positions that must cross the fronthaul: any position
// with at least one occupied cell or signaling RE. Symbols with no data
// across all subcarriers are the only ones omitted.
inline int ul_transport_symbols(const FrameGrid& grid) {
  int count = 0;
  for (const auto& [slot, sym] : grid.ul_symbols())
    if (grid.any_payload(slot, sym)) ++count;
  return count;
}

// Fronthaul load implied by a scheduled grid. DL carries the modulated bits
// of occupied cells only; UL carries transported symbols over the full cell
// bandwidth, replicated across every antenna port.
inline DirPair fh_load_from_grid(const FrameGrid& grid, const Allocation& alloc,
                                 const CellConfig& cell) {
  const std::int64_t horizon_ns = grid.horizon_duration_ns();
  const std::int64_t dl_bits = alloc.dl_cells * Numerology::n_sc_per_rb * alloc.qm_dl;
  const std::int64_t ul_bits = static_cast<std::int64_t>(ul_transport_symbols(grid)) *
                               grid.n_rb() * Numerology::n_sc_per_rb * cell.gnb_ports * cell.n_iq;
  auto to_rate = [&](std::int64_t bits) {
    return static_cast<Bps>(static_cast<__int128>(bits) * 1'000'000'000 / horizon_ns);
  };
  return DirPair{to_rate(dl_bits), to_rate(ul_bits)};
}

// UL demand generated by acknowledgments of DL traffic.
inline Bps ack_traffic(Bps dl_access_bps, Ratio ack_ratio) {
  if (ack_ratio.ppm() < 0 || ack_ratio.ppm() > 200'000)
    throw OutOfRange("ack_ratio outside [0, 0.2]");
  if (dl_access_bps < 0) throw OutOfRange("dl_access_bps must be >= 0");
  return apply_ratio(dl_access_bps, ack_ratio);
}

}  // namespace fhsim

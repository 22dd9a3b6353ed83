#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <string>

#include "fhsim/core.hpp"

namespace fhsim {

// 5G NR numerology, normal cyclic prefix. scs = 15 * 2^mu kHz.
struct Numerology {
  int scs_khz{120};

  static constexpr int symbols_per_slot = 14;
  static constexpr int n_sc_per_rb = 12;

  bool valid() const {
    return scs_khz == 15 || scs_khz == 30 || scs_khz == 60 || scs_khz == 120;
  }

  int slots_per_subframe() const { return scs_khz / 15; }

  // OFDM symbols per second; the duration of one symbol is its inverse.
  std::int64_t symbol_rate() const {
    return static_cast<std::int64_t>(symbols_per_slot) * slots_per_subframe() * 1000;
  }

  std::int64_t slot_duration_ns() const { return 1'000'000 / slots_per_subframe(); }

  bool operator==(const Numerology&) const = default;
};

inline std::int64_t symbol_rate(const Numerology& num) { return num.symbol_rate(); }

// eCPRI split options: three downlink, two uplink. Only I_D and I_U have
// rate semantics in this model; the rest are enumerated for completeness.
enum class SplitOption { dl_i, dl_ii, dl_d, ul_i, ul_e };

enum class PayloadKind { data_bits, iq_samples };

inline Direction split_direction(SplitOption s) {
  switch (s) {
    case SplitOption::dl_i:
    case SplitOption::dl_ii:
    case SplitOption::dl_d:
      return Direction::dl;
    default:
      return Direction::ul;
  }
}

// Everything below split I_D carries bit-encoded IQ samples.
inline PayloadKind split_payload(SplitOption s) {
  return s == SplitOption::dl_i ? PayloadKind::data_bits : PayloadKind::iq_samples;
}

inline const char* split_name(SplitOption s) {
  switch (s) {
    case SplitOption::dl_i: return "I_D";
    case SplitOption::dl_ii: return "II_D";
    case SplitOption::dl_d: return "D";
    case SplitOption::ul_i: return "I_U";
    case SplitOption::ul_e: return "E";
  }
  return "?";
}

// Maximum transmission bandwidth in RBs for FR2 at 120 kHz SCS. Other
// numerologies require an explicit rb_count_override in the cell config.
inline std::int64_t rb_count(int bandwidth_mhz, const Numerology& num) {
  if (num.scs_khz == 120) {
    switch (bandwidth_mhz) {
      case 50: return 32;
      case 100: return 66;
      case 200: return 132;
      case 400: return 264;
      default: break;
    }
  }
  throw UnknownBandwidth("no RB table entry for " + std::to_string(bandwidth_mhz) +
                         " MHz at " + std::to_string(num.scs_khz) + " kHz");
}

// Aggregate UE capability; one profile stands in for the whole cell load.
struct UeProfile {
  int max_layers_dl{2};
  int max_layers_ul{2};
  int max_qm_dl{6};
  int max_qm_ul{6};

  void validate() const {
    auto qam_ok = [](int q) { return q == 2 || q == 4 || q == 6 || q == 8; };
    if (max_layers_dl < 1 || max_layers_ul < 1)
      throw ValidationError("ue: layer counts must be >= 1");
    if (!qam_ok(max_qm_dl) || !qam_ok(max_qm_ul))
      throw ValidationError("ue: modulation order must be one of 2/4/6/8");
  }

  bool operator==(const UeProfile&) const = default;
};

// Periodic slot sequence over {D, S, U} plus the special-slot symbol split
// (dl, gap, ul summing to 14). s_slot_carries_data controls whether the
// special slot's D/U symbols count as shared-channel capacity.
struct TddPattern {
  std::string slot_sequence{"DDDSU"};
  std::array<int, 3> s_slot_split{{10, 2, 2}};
  bool s_slot_carries_data{false};

  int period_slots() const { return static_cast<int>(slot_sequence.size()); }

  char slot_type(int slot) const { return slot_sequence[slot % slot_sequence.size()]; }

  void validate() const {
    if (slot_sequence.empty()) throw ValidationError("tdd: empty slot sequence");
    for (char c : slot_sequence)
      if (c != 'D' && c != 'S' && c != 'U')
        throw ValidationError(std::string("tdd: bad slot type '") + c + "'");
    if (s_slot_split[0] < 0 || s_slot_split[1] < 0 || s_slot_split[2] < 0 ||
        s_slot_split[0] + s_slot_split[1] + s_slot_split[2] != Numerology::symbols_per_slot)
      throw ValidationError("tdd: s_slot split must be non-negative and sum to 14");
  }

  bool operator==(const TddPattern&) const = default;
};

namespace detail {

inline Frac reduce(std::int64_t num, std::int64_t den) {
  const std::int64_t g = std::gcd(num, den);
  return Frac{num / g, den / g};
}

}  // namespace detail

// Fraction of symbol time usable for data in the given direction (f_TDD).
inline Frac duty(const TddPattern& tdd, Direction dir) {
  std::int64_t data_symbols = 0;
  for (char c : tdd.slot_sequence) {
    if (c == 'D' && dir == Direction::dl) data_symbols += Numerology::symbols_per_slot;
    if (c == 'U' && dir == Direction::ul) data_symbols += Numerology::symbols_per_slot;
    if (c == 'S' && tdd.s_slot_carries_data)
      data_symbols += dir == Direction::dl ? tdd.s_slot_split[0] : tdd.s_slot_split[2];
  }
  return detail::reduce(data_symbols,
                        static_cast<std::int64_t>(tdd.period_slots()) * Numerology::symbols_per_slot);
}

// Complement of both duties; duty(dl) + duty(ul) + gap_fraction == 1.
inline Frac gap_fraction(const TddPattern& tdd) {
  const Frac d = duty(tdd, Direction::dl);
  const Frac u = duty(tdd, Direction::ul);
  const std::int64_t den = d.den * u.den;
  return detail::reduce(den - d.num * u.den - u.num * d.den, den);
}

// One radio access configuration: the knobs the gNB software can switch.
struct CellConfig {
  std::string name;
  int bandwidth_mhz{100};
  Numerology numerology{};
  int gnb_ports{4};          // antenna ports == max MIMO layers at the gNB
  int qm_dl{6};              // bits per modulated symbol, DL shared channel
  int qm_ul{6};
  int n_iq{18};              // bits per encoded IQ sample on the UL fronthaul
  Ratio code_rate{Ratio::from_ppm(770'000)};  // R_MAX
  Ratio overhead{Ratio::from_ppm(140'000)};   // control-channel overhead share
  SplitOption dl_split{SplitOption::dl_i};
  SplitOption ul_split{SplitOption::ul_i};
  std::optional<std::int64_t> rb_count_override;

  std::int64_t rb_count() const {
    return rb_count_override ? *rb_count_override : fhsim::rb_count(bandwidth_mhz, numerology);
  }

  void validate() const {
    auto qam_ok = [](int q) { return q == 2 || q == 4 || q == 6 || q == 8; };
    auto fail = [&](const std::string& msg) {
      throw ValidationError("cell." + name + ": " + msg);
    };
    if (name.empty()) fail("empty name");
    if (!numerology.valid()) fail("scs_khz must be one of 15/30/60/120");
    if (gnb_ports < 1) fail("ports must be >= 1");
    if (!qam_ok(qm_dl) || !qam_ok(qm_ul)) fail("modulation order must be one of 2/4/6/8");
    if (n_iq < qm_ul) fail("n_iq must be >= qm_ul");
    if (code_rate.ppm() <= 0 || code_rate.ppm() > 1'000'000) fail("code_rate must be in (0,1]");
    if (overhead.ppm() < 0 || overhead.ppm() >= 1'000'000) fail("overhead must be in [0,1)");
    if (rb_count_override) {
      if (*rb_count_override < 0) fail("rb_count_override must be >= 0");
    } else {
      try {
        fhsim::rb_count(bandwidth_mhz, numerology);
      } catch (const UnknownBandwidth& e) {
        fail(e.what());
      }
    }
  }

  bool operator==(const CellConfig&) const = default;
};

// MIMO layers actually usable: the binding limit of gNB ports and UE capability.
inline int effective_layers(const CellConfig& cell, const UeProfile& ue, Direction dir) {
  return std::min(cell.gnb_ports, dir == Direction::dl ? ue.max_layers_dl : ue.max_layers_ul);
}

/// Downlink fronthaul rate for split I_D: coded data bits of the allocated
/// REs, scaled by the TDD duty cycle.
inline Bps fh_rate_dl(const CellConfig& cell, int layers, std::int64_t rb_used, Frac duty_dl) {
  if (rb_used < 0 || rb_used > cell.rb_count())
    throw RbOverflow("rb_used " + std::to_string(rb_used) + " exceeds cell RB count");
  if (layers < 0 || layers > cell.gnb_ports)
    throw RbOverflow("layers " + std::to_string(layers) + " exceeds gNB ports");
  const std::int64_t peak =
      rb_used * Numerology::n_sc_per_rb * layers * cell.qm_dl * cell.numerology.symbol_rate();
  return apply_frac(peak, duty_dl);
}

/// Uplink fronthaul rate for split I_U: IQ samples over the full cell
/// bandwidth and every antenna port, for the transported share of symbols.
/// Partially loaded symbols count whole, so occupancy enters as a fraction
/// of symbols, not of REs.
inline Bps fh_rate_ul(const CellConfig& cell, Frac occupied_symbol_fraction, Frac duty_ul) {
  if (occupied_symbol_fraction.num < 0 || occupied_symbol_fraction.num > occupied_symbol_fraction.den)
    throw OutOfRange("occupied_symbol_fraction outside [0,1]");
  const std::int64_t peak = cell.rb_count() * Numerology::n_sc_per_rb * cell.gnb_ports *
                            cell.n_iq * cell.numerology.symbol_rate();
  return apply_frac(apply_frac(peak, duty_ul), occupied_symbol_fraction);
}

/// Radio access capacity: N_RB * N_SC * N_MIMO * Q_M * R_MAX * f_TDD * (1-OH) / T_S.
inline Bps access_capacity(const CellConfig& cell, const UeProfile& ue, Direction dir,
                           const TddPattern& tdd) {
  const int layers = effective_layers(cell, ue, dir);
  const int qm = dir == Direction::dl ? std::min(cell.qm_dl, ue.max_qm_dl)
                                      : std::min(cell.qm_ul, ue.max_qm_ul);
  const Frac f = duty(tdd, dir);
  const std::int64_t core =
      cell.rb_count() * Numerology::n_sc_per_rb * layers * qm * cell.numerology.symbol_rate();
  const __int128 num = static_cast<__int128>(core) * cell.code_rate.ppm() *
                       cell.overhead.complement().ppm() * f.num;
  const __int128 den = static_cast<__int128>(1'000'000) * 1'000'000 * f.den;
  return static_cast<Bps>(num / den);
}

// Fronthaul rates the link must support: full RB allocation in DL, full
// symbol transport in UL, plus the constant antenna-control overhead.
inline DirPair required_fh(const CellConfig& cell, const UeProfile& ue, const TddPattern& tdd,
                           Bps control_overhead_bps) {
  if (control_overhead_bps < 0) throw OutOfRange("control overhead must be >= 0");
  const Bps dl = fh_rate_dl(cell, effective_layers(cell, ue, Direction::dl), cell.rb_count(),
                            duty(tdd, Direction::dl));
  const Bps ul = fh_rate_ul(cell, Frac{1, 1}, duty(tdd, Direction::ul));
  return DirPair{dl + control_overhead_bps, ul + control_overhead_bps};
}

}  // namespace fhsim

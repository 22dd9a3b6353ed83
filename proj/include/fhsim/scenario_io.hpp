#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fhsim/core.hpp"
#include "fhsim/sim.hpp"

namespace fhsim {

// Scenario files are plain text: bracketed section headers, key = value
// lines, full-line # comments. Unknown sections and keys are rejected.

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

struct KvLine {
  std::string key;
  std::string value;
  int line{0};
  bool used{false};
};

struct Section {
  std::string name;
  int line{0};
  std::vector<KvLine> entries;
};

inline std::vector<Section> parse_sections(const std::string& text, const std::string& source) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ParseError(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail("malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-')
          fail("bad character in section name");
      sections.push_back(Section{name, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value' or a [section] header");
    if (sections.empty()) fail("key outside any section");
    KvLine kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno, false};
    if (kv.key.empty()) fail("empty key");
    for (const auto& prev : sections.back().entries)
      if (prev.key == kv.key)
        throw ValidationError(source + ":" + std::to_string(lineno) + ": [" +
                              sections.back().name + "] duplicate key '" + kv.key + "'");
    sections.back().entries.push_back(std::move(kv));
  }
  return sections;
}

// Fixed-point decimal parser: value * scale, exact, truncation forbidden.
// scale must be a power of ten.
inline std::int64_t parse_scaled(const std::string& s, std::int64_t scale,
                                 const std::string& where) {
  auto fail = [&](const std::string& msg) { throw ValidationError(where + ": " + msg); };
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  bool any = false;
  __int128 whole = 0;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
    whole = whole * 10 + (s[i] - '0');
    if (whole > static_cast<__int128>(INT64_MAX)) fail("value too large");
    any = true;
  }
  __int128 frac = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    std::int64_t fscale = scale;
    bool fdigit = false;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      fdigit = true;
      if (fscale == 1) {
        if (s[i] != '0') fail("more decimal places than the unit resolves");
        continue;
      }
      fscale /= 10;
      frac += static_cast<__int128>(s[i] - '0') * fscale;
    }
    if (!fdigit) fail("digit expected after decimal point");
    any = true;
  }
  if (!any || i != s.size()) fail("not a number: '" + s + "'");
  const __int128 v = whole * scale + frac;
  if (v > static_cast<__int128>(INT64_MAX)) fail("value too large");
  return neg ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
}

inline std::int64_t parse_int(const std::string& s, const std::string& where) {
  return parse_scaled(s, 1, where);
}

inline bool parse_bool(const std::string& s, const std::string& where) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ValidationError(where + ": expected true or false, got '" + s + "'");
}

inline Ratio parse_ratio(const std::string& s, const std::string& where) {
  return Ratio::from_ppm(parse_scaled(s, 1'000'000, where));
}

inline Bps parse_mbps(const std::string& s, const std::string& where) {
  return parse_scaled(s, 1'000'000, where);
}

inline std::int64_t parse_seconds_ms(const std::string& s, const std::string& where) {
  return parse_scaled(s, 1000, where);
}

// Inverse of parse_scaled: exact decimal with trailing zeros trimmed.
inline std::string format_scaled(std::int64_t v, std::int64_t scale) {
  std::string out = v < 0 ? "-" : "";
  const std::int64_t a = v < 0 ? -v : v;
  out += std::to_string(a / scale);
  std::int64_t frac = a % scale;
  if (frac == 0) return out;
  std::string digits;
  for (std::int64_t f = scale / 10; f >= 1; f /= 10) {
    digits += static_cast<char>('0' + (frac / f) % 10);
  }
  while (digits.back() == '0') digits.pop_back();
  return out + "." + digits;
}

}  // namespace detail

inline CapacityProfile load_capacity_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open capacity trace '" + path + "'");
  std::string header;
  if (!std::getline(in, header) ||
      detail::trim(header) != "time_s,capacity_dl_mbps,capacity_ul_mbps")
    throw ParseError(path + ": expected header time_s,capacity_dl_mbps,capacity_ul_mbps");
  CapacityProfile profile;
  profile.segments.clear();
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string l = detail::trim(line);
    if (l.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::istringstream row(l);
    std::string t, dl, ul;
    if (!std::getline(row, t, ',') || !std::getline(row, dl, ',') || !std::getline(row, ul, ','))
      throw ParseError(where + ": expected 3 comma-separated fields");
    profile.segments.push_back(CapacitySegment{detail::parse_seconds_ms(detail::trim(t), where),
                                               detail::parse_mbps(detail::trim(dl), where),
                                               detail::parse_mbps(detail::trim(ul), where)});
  }
  profile.validate();
  return profile;
}

inline Scenario parse_scenario(const std::string& text, const std::string& source,
                               const std::string& base_dir = ".") {
  const auto sections = detail::parse_sections(text, source);
  Scenario sc;
  sc.catalog.configs.clear();
  sc.traffic = Traffic{};

  bool cap_const_set = false, cap_split_set = false;
  Bps cap_dl = CapacityProfile::unlimited, cap_ul = CapacityProfile::unlimited;

  for (const auto& sec : sections) {
    auto where = [&](const detail::KvLine& kv) {
      return source + ":" + std::to_string(kv.line) + ": [" + sec.name + "] " + kv.key;
    };
    auto unknown_key = [&](const detail::KvLine& kv) {
      throw ValidationError(where(kv) + ": unknown key");
    };

    if (sec.name.rfind("cell.", 0) == 0) {
      CellConfig cell;
      cell.name = sec.name.substr(5);
      bool have_bw = false, have_ports = false;
      for (const auto& kv : sec.entries) {
        const std::string w = where(kv);
        if (kv.key == "bandwidth_mhz") {
          cell.bandwidth_mhz = static_cast<int>(detail::parse_int(kv.value, w));
          have_bw = true;
        } else if (kv.key == "scs_khz")
          cell.numerology.scs_khz = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "ports") {
          cell.gnb_ports = static_cast<int>(detail::parse_int(kv.value, w));
          have_ports = true;
        } else if (kv.key == "qm_dl")
          cell.qm_dl = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "qm_ul")
          cell.qm_ul = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "n_iq")
          cell.n_iq = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "code_rate")
          cell.code_rate = detail::parse_ratio(kv.value, w);
        else if (kv.key == "overhead")
          cell.overhead = detail::parse_ratio(kv.value, w);
        else if (kv.key == "rb_count_override")
          cell.rb_count_override = detail::parse_int(kv.value, w);
        else
          unknown_key(kv);
      }
      if (!have_bw)
        throw ValidationError(source + ": [" + sec.name + "] missing key bandwidth_mhz");
      if (!have_ports) throw ValidationError(source + ": [" + sec.name + "] missing key ports");
      sc.catalog.configs.push_back(std::move(cell));
    } else if (sec.name == "ue") {
      for (const auto& kv : sec.entries) {
        const std::string w = where(kv);
        if (kv.key == "max_layers_dl")
          sc.ue.max_layers_dl = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "max_layers_ul")
          sc.ue.max_layers_ul = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "max_qm_dl")
          sc.ue.max_qm_dl = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "max_qm_ul")
          sc.ue.max_qm_ul = static_cast<int>(detail::parse_int(kv.value, w));
        else
          unknown_key(kv);
      }
    } else if (sec.name == "tdd") {
      for (const auto& kv : sec.entries) {
        const std::string w = where(kv);
        if (kv.key == "pattern")
          sc.tdd.slot_sequence = kv.value;
        else if (kv.key == "s_split") {
          std::istringstream split(kv.value);
          std::string a, b, c;
          if (!std::getline(split, a, ',') || !std::getline(split, b, ',') ||
              !std::getline(split, c))
            throw ValidationError(w + ": expected 'dl,gap,ul'");
          sc.tdd.s_slot_split = {static_cast<int>(detail::parse_int(detail::trim(a), w)),
                                 static_cast<int>(detail::parse_int(detail::trim(b), w)),
                                 static_cast<int>(detail::parse_int(detail::trim(c), w))};
        } else if (kv.key == "s_carries_data")
          sc.tdd.s_slot_carries_data = detail::parse_bool(kv.value, w);
        else
          unknown_key(kv);
      }
    } else if (sec.name == "fronthaul") {
      for (const auto& kv : sec.entries) {
        const std::string w = where(kv);
        if (kv.key == "control_overhead_mbps")
          sc.params.control_overhead = detail::parse_mbps(kv.value, w);
        else if (kv.key == "policy") {
          if (kv.value == "all_or_nothing")
            sc.params.throttle_policy = ThrottlePolicy::all_or_nothing;
          else if (kv.value == "proportional")
            sc.params.throttle_policy = ThrottlePolicy::proportional;
          else
            throw ValidationError(w + ": expected all_or_nothing or proportional");
        } else if (kv.key == "capacity_mbps") {
          cap_dl = cap_ul = detail::parse_mbps(kv.value, w);
          cap_const_set = true;
        } else if (kv.key == "capacity_dl_mbps") {
          cap_dl = detail::parse_mbps(kv.value, w);
          cap_split_set = true;
        } else if (kv.key == "capacity_ul_mbps") {
          cap_ul = detail::parse_mbps(kv.value, w);
          cap_split_set = true;
        } else if (kv.key == "trace_file") {
          sc.capacity_trace_file =
              std::filesystem::absolute(std::filesystem::path(base_dir) / kv.value).string();
        } else
          unknown_key(kv);
      }
    } else if (sec.name == "traffic") {
      for (const auto& kv : sec.entries) {
        const std::string w = where(kv);
        if (kv.key == "dl_mbps")
          sc.traffic.dl_demand = detail::parse_mbps(kv.value, w);
        else if (kv.key == "ul_mbps")
          sc.traffic.ul_demand = detail::parse_mbps(kv.value, w);
        else if (kv.key == "ack_ratio")
          sc.params.ack_ratio = detail::parse_ratio(kv.value, w);
        else
          unknown_key(kv);
      }
    } else if (sec.name == "controller") {
      for (const auto& kv : sec.entries) {
        const std::string w = where(kv);
        if (kv.key == "hysteresis")
          sc.params.hysteresis = detail::parse_ratio(kv.value, w);
        else if (kv.key == "dwell_s")
          sc.params.min_dwell_ms = detail::parse_seconds_ms(kv.value, w);
        else
          unknown_key(kv);
      }
    } else if (sec.name == "sim") {
      for (const auto& kv : sec.entries) {
        const std::string w = where(kv);
        if (kv.key == "step_s")
          sc.step_ms = detail::parse_seconds_ms(kv.value, w);
        else if (kv.key == "duration_s")
          sc.duration_ms = detail::parse_seconds_ms(kv.value, w);
        else if (kv.key == "seed")
          sc.seed = static_cast<std::uint64_t>(detail::parse_int(kv.value, w));
        else if (kv.key == "horizon_slots")
          sc.params.horizon_slots = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "scheduling") {
          if (kv.value == "frequency_first")
            sc.params.scheduling = SchedulingPolicy::frequency_first;
          else if (kv.value == "time_first")
            sc.params.scheduling = SchedulingPolicy::time_first;
          else if (kv.value == "spread")
            sc.params.scheduling = SchedulingPolicy::spread;
          else
            throw ValidationError(w + ": expected frequency_first, time_first or spread");
        } else if (kv.key == "signaling_symbols")
          sc.params.signaling_symbols = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "signaling_rbs")
          sc.params.signaling_rbs = static_cast<int>(detail::parse_int(kv.value, w));
        else if (kv.key == "jitter")
          sc.demand_jitter = detail::parse_ratio(kv.value, w);
        else
          unknown_key(kv);
      }
    } else {
      throw ValidationError(source + ":" + std::to_string(sec.line) + ": unknown section [" +
                            sec.name + "]");
    }
  }

  if (sc.capacity_trace_file) {
    if (cap_const_set || cap_split_set)
      throw ValidationError(source +
                            ": [fronthaul] trace_file conflicts with capacity_*_mbps keys");
    sc.capacity = load_capacity_trace(*sc.capacity_trace_file);
  } else {
    if (cap_const_set && cap_split_set)
      throw ValidationError(source +
                            ": [fronthaul] capacity_mbps conflicts with capacity_dl/ul_mbps");
    sc.capacity = CapacityProfile::constant(cap_dl, cap_ul);
  }

  sc.validate();
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path,
                        std::filesystem::path(path).parent_path().string().empty()
                            ? "."
                            : std::filesystem::path(path).parent_path().string());
}

// Canonical dump: every key explicit, fixed section order. Loading the dump
// reproduces an identical Scenario.
inline std::string dump_scenario(const Scenario& sc) {
  using detail::format_scaled;
  std::ostringstream os;
  for (const auto& cell : sc.catalog.configs) {
    os << "[cell." << cell.name << "]\n";
    os << "bandwidth_mhz = " << cell.bandwidth_mhz << "\n";
    os << "scs_khz = " << cell.numerology.scs_khz << "\n";
    os << "ports = " << cell.gnb_ports << "\n";
    os << "qm_dl = " << cell.qm_dl << "\n";
    os << "qm_ul = " << cell.qm_ul << "\n";
    os << "n_iq = " << cell.n_iq << "\n";
    os << "code_rate = " << format_scaled(cell.code_rate.ppm(), 1'000'000) << "\n";
    os << "overhead = " << format_scaled(cell.overhead.ppm(), 1'000'000) << "\n";
    if (cell.rb_count_override) os << "rb_count_override = " << *cell.rb_count_override << "\n";
    os << "\n";
  }
  os << "[ue]\n";
  os << "max_layers_dl = " << sc.ue.max_layers_dl << "\n";
  os << "max_layers_ul = " << sc.ue.max_layers_ul << "\n";
  os << "max_qm_dl = " << sc.ue.max_qm_dl << "\n";
  os << "max_qm_ul = " << sc.ue.max_qm_ul << "\n\n";
  os << "[tdd]\n";
  os << "pattern = " << sc.tdd.slot_sequence << "\n";
  os << "s_split = " << sc.tdd.s_slot_split[0] << "," << sc.tdd.s_slot_split[1] << ","
     << sc.tdd.s_slot_split[2] << "\n";
  os << "s_carries_data = " << (sc.tdd.s_slot_carries_data ? "true" : "false") << "\n\n";
  os << "[fronthaul]\n";
  os << "control_overhead_mbps = " << format_scaled(sc.params.control_overhead, 1'000'000) << "\n";
  os << "policy = "
     << (sc.params.throttle_policy == ThrottlePolicy::all_or_nothing ? "all_or_nothing"
                                                                     : "proportional")
     << "\n";
  if (sc.capacity_trace_file) {
    os << "trace_file = " << *sc.capacity_trace_file << "\n";
  } else if (sc.capacity.segments.size() == 1 &&
             (sc.capacity.segments[0].dl != CapacityProfile::unlimited ||
              sc.capacity.segments[0].ul != CapacityProfile::unlimited)) {
    if (sc.capacity.symmetric())
      os << "capacity_mbps = " << format_scaled(sc.capacity.segments[0].dl, 1'000'000) << "\n";
    else {
      os << "capacity_dl_mbps = " << format_scaled(sc.capacity.segments[0].dl, 1'000'000) << "\n";
      os << "capacity_ul_mbps = " << format_scaled(sc.capacity.segments[0].ul, 1'000'000) << "\n";
    }
  }
  os << "\n[traffic]\n";
  os << "dl_mbps = " << format_scaled(sc.traffic.dl_demand, 1'000'000) << "\n";
  os << "ul_mbps = " << format_scaled(sc.traffic.ul_demand, 1'000'000) << "\n";
  os << "ack_ratio = " << format_scaled(sc.params.ack_ratio.ppm(), 1'000'000) << "\n\n";
  os << "[controller]\n";
  os << "hysteresis = " << format_scaled(sc.params.hysteresis.ppm(), 1'000'000) << "\n";
  os << "dwell_s = " << format_scaled(sc.params.min_dwell_ms, 1000) << "\n\n";
  os << "[sim]\n";
  os << "step_s = " << format_scaled(sc.step_ms, 1000) << "\n";
  os << "duration_s = " << format_scaled(sc.duration_ms, 1000) << "\n";
  os << "seed = " << sc.seed << "\n";
  os << "horizon_slots = " << sc.params.horizon_slots << "\n";
  os << "scheduling = "
     << (sc.params.scheduling == SchedulingPolicy::frequency_first  ? "frequency_first"
         : sc.params.scheduling == SchedulingPolicy::time_first ? "time_first"
                                                                : "spread")
     << "\n";
  os << "signaling_symbols = " << sc.params.signaling_symbols << "\n";
  os << "signaling_rbs = " << sc.params.signaling_rbs << "\n";
  os << "jitter = " << format_scaled(sc.demand_jitter.ppm(), 1'000'000) << "\n";
  return os.str();
}

}  // namespace fhsim

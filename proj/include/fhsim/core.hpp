#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fhsim {

// All rates are carried internally as bits per second in 64-bit integers.
// Fractional factors (code rate, overhead, duty cycles) are applied with
// 128-bit exact arithmetic and truncated once, at the final conversion.
using Bps = std::int64_t;

enum class Direction { dl, ul };

inline const char* direction_name(Direction d) {
  return d == Direction::dl ? "dl" : "ul";
}

struct DirPair {
  Bps dl{0};
  Bps ul{0};

  Bps get(Direction d) const { return d == Direction::dl ? dl : ul; }
  bool operator==(const DirPair&) const = default;
};

// Exact fraction, used for TDD duty cycles and symbol occupancy ratios.
struct Frac {
  std::int64_t num{0};
  std::int64_t den{1};

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Frac& o) const { return num * o.den == o.num * den; }
};

// Fixed-point fraction with parts-per-million resolution; carries the
// dimensionless knobs of the model (code rate, overhead, ack ratio,
// hysteresis margin, jitter amplitude).
class Ratio {
 public:
  constexpr Ratio() = default;

  static constexpr Ratio from_ppm(std::int64_t ppm) {
    Ratio r;
    r.ppm_ = ppm;
    return r;
  }

  constexpr std::int64_t ppm() const { return ppm_; }
  double value() const { return static_cast<double>(ppm_) / 1e6; }
  constexpr Ratio complement() const { return from_ppm(1'000'000 - ppm_); }

  bool operator==(const Ratio&) const = default;

 private:
  std::int64_t ppm_{0};
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (bandwidth, numerology) pair missing from the resource-block table.
struct UnknownBandwidth : Error {
  using Error::Error;
};

// Allocation request exceeds the cell's RB or layer dimensions.
struct RbOverflow : Error {
  using Error::Error;
};

// Scheduling horizon is not a multiple of the TDD period.
struct BadHorizon : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

struct UnknownCell : Error {
  using Error::Error;
};

// Structural error in a scenario or trace file (CLI exit code 2).
struct ParseError : Error {
  using Error::Error;
};

// Semantic error: unknown key, bad value, violated range (CLI exit code 1).
struct ValidationError : Error {
  using Error::Error;
};

// Truncating (v * num) / den in 128-bit intermediate precision.
inline std::int64_t muldiv(std::int64_t v, std::int64_t num, std::int64_t den) {
  return static_cast<std::int64_t>(static_cast<__int128>(v) * num / den);
}

inline Bps apply_ratio(Bps v, Ratio r) { return muldiv(v, r.ppm(), 1'000'000); }

inline Bps apply_frac(Bps v, Frac f) { return muldiv(v, f.num, f.den); }

}  // namespace fhsim

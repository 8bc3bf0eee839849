#pragma once

// Length/time-bounded approximation of the universal prior over the reference
// machine.  lower_m(x) sums 2^-len(p) over all programs p with len(p) <= L
// that, within T steps, emit output starting with x and have consumed every
// one of their bits no later than the step emitting the |x|-th output bit
// (minimal-program accounting; extensions of a counted program are never
// counted for the same x).  The empty program is admitted with length 0, so
// lower_m of the empty string is exactly 1.
//
// Enumeration is dovetailed: a fair round-robin over all programs of length
// 0..L, each round granting every unfinished program a fixed 16-step quantum.
// The final mass is schedule-independent; the per-round snapshots expose the
// monotone (lower semicomputable) approximation.

#include <cstdint>
#include <functional>
#include <optional>

#include "aixilab/bits.hpp"
#include "aixilab/rational.hpp"

namespace aixilab {

struct approximation_params {
  unsigned max_program_bits = 8;  // L
  uint64_t step_budget = 64;      // T: total steps per program
};

inline constexpr uint64_t dovetail_quantum = 16;

struct dovetail_snapshot {
  uint64_t round;       // 1-based round index
  rational mass;        // mass counted so far: nondecreasing in the round
  uint64_t unfinished;  // programs still running
};

using snapshot_callback = std::function<void(const dovetail_snapshot&)>;

// Prior mass of x (exact rational in [0, 1]).
rational lower_m(const bit_string& x, const approximation_params& params,
                 const snapshot_callback& on_round = nullptr);

// Conditional next-symbol probability.  Unnormalized: lower_m(prefix+next) /
// lower_m(prefix), a semimeasure (the two symbol values may sum below one).
// Normalized: mass(prefix+next) / (mass(prefix+0) + mass(prefix+1)).
// Throws zero_prefix_mass when the denominator vanishes.
rational predictive(const bit_string& prefix, uint8_t next_symbol,
                    const approximation_params& params, bool normalize);

// Least length of an enumerated program producing output starting with x
// within the budgets; nullopt when none does.  Upper bound on the complexity
// of x relative to the reference machine.
std::optional<unsigned> complexity_upper(const bit_string& x, const approximation_params& params);

}  // namespace aixilab

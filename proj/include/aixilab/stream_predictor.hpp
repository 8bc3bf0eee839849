#pragma once

// Online observation-stream predictor over the reference machine.
//
// Prediction-only (no actions): the machine's input channel is all fair coins.
// The predictor maintains every live (program prefix, coin path) execution
// state, branching when the machine asks for a program bit (up to L bits, each
// costing a factor 1/2 of mass) or a coin (factor 1/2).  Each cycle a state
// must emit one observation bit within the per-cycle step budget; states that
// halt, run out of program bits, or blow the budget lose their mass, and
// observing a bit discards the states that emitted the other one.  The
// next-bit masses m_b are exact dyadic cylinder masses of the emitted-so-far
// observation string; beyond `max_states` live states the lowest-mass states
// are dropped (deterministically), making the masses lower bounds.

#include <cstdint>
#include <vector>

#include "aixilab/bits.hpp"
#include "aixilab/errors.hpp"
#include "aixilab/machine.hpp"
#include "aixilab/rational.hpp"

namespace aixilab {

struct stream_predictor_params {
  unsigned max_program_bits = 24;       // L
  uint64_t step_budget_per_cycle = 16;  // T
  std::size_t max_states = 1u << 16;    // deterministic mass-pruning cap
  // States whose mass falls below 2^-spread of the current best state are
  // dropped: relative weight under 2^-48 is far below double precision, and
  // this lets the frontier collapse once one explanation dominates.
  uint64_t max_exponent_spread = 48;
};

class stream_predictor {
 public:
  explicit stream_predictor(stream_predictor_params params);

  struct prediction {
    rational m0, m1;  // exact cylinder masses of observed-so-far + next bit
    double p0 = 0.5, p1 = 0.5;  // normalized: p_b = m_b / (m0 + m1)
    int argmax = 0;             // ties resolve to 0
    bool live = false;          // false once every state has died
  };

  // Expands the current cycle (idempotent until the next observe call).
  const prediction& predict();
  // Consumes the true bit: prunes to consistent states and opens a new cycle.
  void observe(uint8_t bit);

  uint64_t cycles_observed() const { return cycles_; }
  std::size_t frontier_states();  // states paused at this cycle's emit

  // Mass share (within the current frontier) of states whose consumed program
  // bits start with `code`; diagnostic for tracking structured explanations.
  double code_prefix_share(const bit_string& code);

 private:
  struct state {
    machine_state m;
    uint64_t code = 0;  // program bits fed, bit i of the prefix at bit i
    uint8_t bit = 0;    // emitted bit while parked in the frontier
  };

  void expand();
  void compact();
  uint64_t exponent(const state& s) const {
    return s.m.consumed() + s.m.input_consumed();
  }

  stream_predictor_params params_;
  std::vector<state> live_;      // states waiting to run this cycle
  std::vector<state> frontier_;  // states paused at this cycle's emit
  bool expanded_ = false;
  prediction current_;
  uint64_t cycles_ = 0;
};

// The 24-bit reference program whose law is "odd observation bits are fair
// coins, each even bit repeats the preceding odd bit":
//   flip loop-open move-right read emit emit move-left loop-close
bit_string copy_pattern_program();

}  // namespace aixilab

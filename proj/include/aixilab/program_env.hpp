#pragma once

// Program-induced environment classes over the reference machine.
//
// A program q is run chronologically: the input channel answers the first
// ceil(log2 |A|) reads of each cycle with the current action's bits, and every
// further read in the cycle with a fair coin.  The coin branches make nu_q a
// (dyadic-rational) semimeasure over percept sequences; coin paths that abort
// (program bits exhausted, natural halt, per-cycle budget blown) lose their
// mass.  Deterministic programs are the zero-coin special case.
//
// Class membership at horizon (L, T, cycles): q belongs iff for every action
// sequence of that length some coin path completes all cycles, and every
// completing coin path has consumed exactly l(q) program bits at its final
// emit.  Members form a prefix-free set, so the raw weights 2^-l(q) satisfy
// the Kraft inequality.

#include <cstdint>
#include <vector>

#include "aixilab/bits.hpp"
#include "aixilab/environment.hpp"
#include "aixilab/mixture.hpp"

namespace aixilab {

struct program_exec_params {
  uint64_t step_budget_per_cycle = 16;  // T
  int num_actions = 2;
  std::size_t max_nodes = 1u << 22;  // branching-executor safety cap
};

struct program_class_params {
  unsigned max_program_bits = 12;  // L
  unsigned cycles = 2;             // membership probe horizon
  program_exec_params exec;
};

class program_environment : public chronological_environment {
 public:
  program_environment(bit_string code, program_exec_params exec);
  std::string name() const override;
  int num_actions() const override { return exec_.num_actions; }

  // Conditional law nu_q(p | h, a) = nu_q(h a p) / nu_q(h), computed exactly
  // by branching over coin reads and pruning against h's percepts.  Throws
  // zero_mass if nu_q(h) = 0.
  std::vector<weighted_percept> percept_distribution(const history& h,
                                                     int action) const override;

  const bit_string& code() const { return code_; }

 private:
  bit_string code_;
  program_exec_params exec_;
};

// All members of the class at the given horizon, in lexicographic order.
std::vector<bit_string> program_class_members(const program_class_params& params);

// The class as a mixture with raw weights 2^-l(q); throws empty_class when no
// program qualifies at this horizon.
mixture program_class(const program_class_params& params);

// --- Observation-only prediction programs -----------------------------------
// Sequence prediction recast as a chronological problem: the program never
// sees actions (every read is a coin) and each emitted bit is one cycle's
// observation.  The percept handed to the agent is (obs, reward = [action ==
// obs]) — the guessing reward is part of the task statement, not of the
// program, so the program class only has to model the observation stream.

class program_prediction_env : public chronological_environment {
 public:
  program_prediction_env(bit_string code, program_exec_params exec);
  std::string name() const override;
  int num_actions() const override { return 2; }

  // nu_q(obs | past observations), with reward filled in by the match rule.
  // Throws zero_mass if the program assigns no mass to the observed stream.
  std::vector<weighted_percept> percept_distribution(const history& h,
                                                     int action) const override;

  const bit_string& code() const { return code_; }

 private:
  bit_string code_;
  program_exec_params exec_;
};

// Membership mirrors the chronological class with one emitted bit per cycle
// and no action sequence to intersect over: q belongs iff some coin path
// emits `cycles` bits and every completing path consumes exactly l(q) program
// bits at the final emit.
std::vector<bit_string> obs_program_class_members(const program_class_params& params);

// The prediction class as a mixture of program_prediction_env components with
// raw weights 2^-l(q); throws empty_class when no program qualifies.
mixture obs_program_class(const program_class_params& params);

}  // namespace aixilab

#pragma once

// Reference monotone machine.
//
// Binary tape, unbounded in both directions, all cells start at 0, head at 0.
// A program is a finite bit string consumed lazily, three bits per opcode,
// most significant bit first.  Opcode table (value -> operation):
//
//   0 000 move-left    head <- head - 1
//   1 001 move-right   head <- head + 1
//   2 010 flip-cell    cell <- 1 - cell
//   3 011 emit-cell    append cell to the output stream
//   4 100 read-input   cell <- next input bit
//   5 101 loop-open    if cell = 0, skip forward past the matching loop-close
//   6 110 loop-close   if cell = 1, jump back to the matching loop-open
//   7 111 halt         natural halt
//
// Every executed opcode costs exactly one step (including emit and read; a
// loop-open skip is part of the loop-open's single step).  A run stops at the
// first of: the output limit is reached, the step budget is exhausted (checked
// before each opcode starts), a program bit beyond the program's length is
// requested, or a natural halt (the halt opcode, or an unmatched loop-close).
// See docs/machine.md for the bit-exact specification and worked traces.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aixilab/bits.hpp"

namespace aixilab {

enum class opcode : uint8_t {
  move_left = 0,
  move_right = 1,
  flip = 2,
  emit = 3,
  read = 4,
  loop_open = 5,
  loop_close = 6,
  halt = 7,
};

const char* opcode_name(opcode op);

enum class machine_status : uint8_t {
  output_limit_reached,
  step_budget_exhausted,
  program_bits_exhausted,
  halted,
};

const char* status_name(machine_status s);

struct execution_result {
  bit_string output;
  uint64_t consumed = 0;  // program bits read
  uint64_t steps = 0;     // opcodes executed
  machine_status status = machine_status::halted;
};

// Resumable machine core.  The state never owns the program or input stream;
// it raises events when it needs a bit, and the driver feeds it.  This single
// core backs plain execution, dovetailed enumeration, chronological runs and
// the branching (coin) executors.
class machine_state {
 public:
  struct event {
    enum class kind : uint8_t {
      need_program_bit,  // feed_program_bit(b) to continue
      need_input_bit,    // feed_input_bit(b) to continue
      emitted,           // one output bit appended; resume with advance()
      budget_paused,     // step limit hit; raise it or stop() to finalize
      stopped,
    };
    kind k;
    uint8_t bit = 0;          // emitted bit, for kind::emitted
    machine_status status{};  // for kind::stopped
  };

  machine_state(uint64_t step_limit, uint64_t output_limit)
      : step_limit_(step_limit), output_limit_(output_limit) {}

  // Runs until the next event.  Idempotent once stopped.
  event advance();

  void feed_program_bit(uint8_t bit);
  void feed_input_bit(uint8_t bit);
  // Driver-imposed stop (e.g. program bits exhausted, input channel closed).
  void stop(machine_status s);

  bool stopped() const { return stopped_.has_value(); }
  machine_status status() const { return *stopped_; }

  const bit_string& output() const { return out_; }
  uint64_t emitted_count() const { return emitted_count_; }
  // Branching enumerators keep thousands of clones alive; they read emitted
  // bits from events and can skip storing the output string entirely.
  void set_record_output(bool record) { record_output_ = record; }
  uint64_t consumed() const { return consumed_; }
  uint64_t input_consumed() const { return input_consumed_; }
  uint64_t steps() const { return steps_; }

  // Budgets may be raised by the driver (per-cycle allowances, dovetailing).
  void set_step_limit(uint64_t limit) { step_limit_ = limit; }
  uint64_t step_limit() const { return step_limit_; }
  void set_output_limit(uint64_t limit) { output_limit_ = limit; }

  void enable_trace() { tracing_ = true; }
  const std::vector<std::string>& trace() const { return trace_; }

  uint8_t cell() const { return tape_get(head_); }
  int64_t head() const { return head_; }

 private:
  uint8_t tape_get(int64_t pos) const;
  void tape_set(int64_t pos, uint8_t v);
  void trace_line(opcode op);
  bool jump_back_to_open();  // false if no matching loop-open exists

  // Tape: cells 0,1,2,... in pos_, cells -1,-2,... in neg_.
  std::vector<uint8_t> pos_, neg_;
  int64_t head_ = 0;

  std::vector<opcode> decoded_;  // instruction slots decoded so far
  uint8_t partial_bits_ = 0;     // bits of the slot currently being decoded
  uint8_t partial_val_ = 0;
  std::size_t pc_ = 0;

  bool skipping_ = false;  // inside a loop-open forward scan
  std::size_t scan_slot_ = 0;
  int skip_depth_ = 0;

  bool awaiting_input_ = false;  // a read opcode is waiting for its bit

  bit_string out_;
  uint64_t emitted_count_ = 0;
  bool record_output_ = true;
  uint64_t consumed_ = 0;
  uint64_t input_consumed_ = 0;
  uint64_t steps_ = 0;
  uint64_t step_limit_;
  uint64_t output_limit_;
  std::optional<machine_status> stopped_;

  bool tracing_ = false;
  std::vector<std::string> trace_;
};

// Runs `program` with `condition_bits` on the input channel.  A read past the
// end of the condition bits is a natural halt.  If `trace` is non-null it
// receives one line per executed opcode: "step, opcode, head, cell, consumed,
// output-so-far", followed by a final status line.
execution_result execute(const bit_string& program, const bit_string& condition_bits,
                         uint64_t step_budget, uint64_t output_limit,
                         std::string* trace = nullptr);

// Chronological run: the program is an environment.  Per interaction cycle it
// must emit one observation bit and one reward bit; the input channel answers
// the first ceil(log2(num_actions)) reads of cycle k with the encoding of
// action a_k (most significant bit first).  Any further read in the same
// cycle, running out of program bits, a natural halt, or exceeding the
// per-cycle step budget before the requested number of cycles completes,
// aborts the run (the program is not a valid environment for this action
// sequence).  Percepts are (observation bit, reward bit).
struct chronological_result {
  bool aborted = true;
  std::string abort_reason;  // empty when not aborted
  std::vector<std::pair<uint8_t, uint8_t>> percepts;
  uint64_t consumed = 0;
  uint64_t steps = 0;
};

chronological_result execute_chronological(const bit_string& program,
                                           const std::vector<int>& actions,
                                           uint64_t step_budget_per_cycle, std::size_t cycles,
                                           int num_actions = 2);

// Encoding width used for actions on the input channel.
int action_bit_width(int num_actions);

}  // namespace aixilab

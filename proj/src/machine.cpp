#include "aixilab/machine.hpp"

#include <cassert>
#include <stdexcept>

namespace aixilab {

const char* opcode_name(opcode op) {
  switch (op) {
    case opcode::move_left: return "move-left";
    case opcode::move_right: return "move-right";
    case opcode::flip: return "flip-cell";
    case opcode::emit: return "emit-cell";
    case opcode::read: return "read-input";
    case opcode::loop_open: return "loop-open";
    case opcode::loop_close: return "loop-close";
    case opcode::halt: return "halt";
  }
  return "?";
}

const char* status_name(machine_status s) {
  switch (s) {
    case machine_status::output_limit_reached: return "OutputLimitReached";
    case machine_status::step_budget_exhausted: return "StepBudgetExhausted";
    case machine_status::program_bits_exhausted: return "ProgramBitsExhausted";
    case machine_status::halted: return "Halted";
  }
  return "?";
}

uint8_t machine_state::tape_get(int64_t pos) const {
  if (pos >= 0) {
    auto i = std::size_t(pos);
    return i < pos_.size() ? pos_[i] : 0;
  }
  auto i = std::size_t(-pos - 1);
  return i < neg_.size() ? neg_[i] : 0;
}

void machine_state::tape_set(int64_t pos, uint8_t v) {
  if (pos >= 0) {
    auto i = std::size_t(pos);
    if (i >= pos_.size()) pos_.resize(i + 1, 0);
    pos_[i] = v;
  } else {
    auto i = std::size_t(-pos - 1);
    if (i >= neg_.size()) neg_.resize(i + 1, 0);
    neg_[i] = v;
  }
}

void machine_state::trace_line(opcode op) {
  if (!tracing_) return;
  trace_.push_back(std::to_string(steps_) + ", " + opcode_name(op) + ", " +
                   std::to_string(head_) + ", " + std::to_string(int(tape_get(head_))) + ", " +
                   std::to_string(consumed_) + ", " + out_.str());
}

bool machine_state::jump_back_to_open() {
  // All slots below pc_ are already decoded (slots decode in order), so the
  // backward scan never consumes program bits.
  int depth = 1;
  std::size_t i = pc_;
  while (i > 0) {
    --i;
    if (decoded_[i] == opcode::loop_close) ++depth;
    if (decoded_[i] == opcode::loop_open) {
      --depth;
      if (depth == 0) {
        pc_ = i;  // the loop-open re-executes and re-tests its cell
        return true;
      }
    }
  }
  return false;
}

machine_state::event machine_state::advance() {
  using K = event::kind;
  while (true) {
    if (stopped_) return {K::stopped, 0, *stopped_};
    if (awaiting_input_) return {K::need_input_bit};

    if (emitted_count_ >= output_limit_) {
      stop(machine_status::output_limit_reached);
      continue;
    }

    if (skipping_) {
      // Forward scan for the matching loop-close; decodes slots on demand.
      // The whole skip belongs to the loop-open's single step.
      if (scan_slot_ >= decoded_.size()) return {K::need_program_bit};
      opcode op = decoded_[scan_slot_];
      ++scan_slot_;
      if (op == opcode::loop_open) ++skip_depth_;
      if (op == opcode::loop_close) {
        --skip_depth_;
        if (skip_depth_ == 0) {
          skipping_ = false;
          pc_ = scan_slot_;
          trace_line(opcode::loop_open);
        }
      }
      continue;
    }

    if (steps_ >= step_limit_) return {K::budget_paused};

    if (pc_ >= decoded_.size()) return {K::need_program_bit};

    const opcode op = decoded_[pc_];
    ++steps_;
    switch (op) {
      case opcode::move_left:
        --head_;
        ++pc_;
        trace_line(op);
        break;
      case opcode::move_right:
        ++head_;
        ++pc_;
        trace_line(op);
        break;
      case opcode::flip:
        tape_set(head_, uint8_t(1 - tape_get(head_)));
        ++pc_;
        trace_line(op);
        break;
      case opcode::emit: {
        uint8_t bit = tape_get(head_);
        ++emitted_count_;
        if (record_output_) out_.push_back(bit);
        ++pc_;
        trace_line(op);
        return {K::emitted, bit};
      }
      case opcode::read:
        awaiting_input_ = true;
        ++pc_;
        return {K::need_input_bit};
      case opcode::loop_open:
        if (tape_get(head_) == 0) {
          skipping_ = true;
          skip_depth_ = 1;
          scan_slot_ = pc_ + 1;
        } else {
          ++pc_;
          trace_line(op);
        }
        break;
      case opcode::loop_close:
        if (tape_get(head_) == 1) {
          if (!jump_back_to_open()) {
            trace_line(op);
            stop(machine_status::halted);  // unmatched loop-close
          } else {
            trace_line(op);
          }
        } else {
          ++pc_;
          trace_line(op);
        }
        break;
      case opcode::halt:
        trace_line(op);
        stop(machine_status::halted);
        break;
    }
  }
}

void machine_state::feed_program_bit(uint8_t bit) {
  assert(!stopped_);
  ++consumed_;
  partial_val_ = uint8_t((partial_val_ << 1) | (bit & 1));  // MSB first
  if (++partial_bits_ == 3) {
    decoded_.push_back(opcode(partial_val_));
    partial_bits_ = 0;
    partial_val_ = 0;
  }
}

void machine_state::feed_input_bit(uint8_t bit) {
  assert(awaiting_input_);
  awaiting_input_ = false;
  ++input_consumed_;
  tape_set(head_, uint8_t(bit & 1));
  trace_line(opcode::read);
}

void machine_state::stop(machine_status s) {
  if (!stopped_) stopped_ = s;
}

execution_result execute(const bit_string& program, const bit_string& condition_bits,
                         uint64_t step_budget, uint64_t output_limit, std::string* trace) {
  machine_state st(step_budget, output_limit);
  if (trace) st.enable_trace();
  while (true) {
    auto ev = st.advance();
    switch (ev.k) {
      case machine_state::event::kind::need_program_bit:
        if (st.consumed() < program.size())
          st.feed_program_bit(program[st.consumed()]);
        else
          st.stop(machine_status::program_bits_exhausted);
        break;
      case machine_state::event::kind::need_input_bit:
        if (st.input_consumed() < condition_bits.size())
          st.feed_input_bit(condition_bits[st.input_consumed()]);
        else
          st.stop(machine_status::halted);  // input channel closed: natural halt
        break;
      case machine_state::event::kind::emitted:
        break;
      case machine_state::event::kind::budget_paused:
        st.stop(machine_status::step_budget_exhausted);
        break;
      case machine_state::event::kind::stopped: {
        execution_result res{st.output(), st.consumed(), st.steps(), st.status()};
        if (trace) {
          std::string text;
          for (const auto& line : st.trace()) text += line + "\n";
          text += std::string("status: ") + status_name(res.status) + ", consumed: " +
                  std::to_string(res.consumed) + ", steps: " + std::to_string(res.steps) +
                  ", output: " + res.output.str() + "\n";
          *trace = text;
        }
        return res;
      }
    }
  }
}

int action_bit_width(int num_actions) {
  if (num_actions < 2) throw std::invalid_argument("need at least two actions");
  int w = 1;
  while ((1 << w) < num_actions) ++w;
  return w;
}

chronological_result execute_chronological(const bit_string& program,
                                           const std::vector<int>& actions,
                                           uint64_t step_budget_per_cycle, std::size_t cycles,
                                           int num_actions) {
  chronological_result res;
  if (actions.size() < cycles) throw std::invalid_argument("need one action per cycle");
  const int width = action_bit_width(num_actions);

  machine_state st(step_budget_per_cycle, 2 * cycles);
  std::size_t completed = 0;       // full percepts so far
  uint64_t cycle_start_steps = 0;  // step count when the current cycle began
  int reads_this_cycle = 0;
  uint8_t pending_obs = 0;
  bool have_obs = false;

  auto fail = [&](const std::string& why) {
    res.aborted = true;
    res.abort_reason = why;
    res.consumed = st.consumed();
    res.steps = st.steps();
    return res;
  };

  while (true) {
    auto ev = st.advance();
    switch (ev.k) {
      case machine_state::event::kind::need_program_bit:
        if (st.consumed() < program.size())
          st.feed_program_bit(program[st.consumed()]);
        else
          return fail("program bits exhausted");
        break;
      case machine_state::event::kind::need_input_bit: {
        if (reads_this_cycle >= width) return fail("read beyond the action encoding");
        const int a = actions[completed];
        const uint8_t bit = uint8_t((a >> (width - 1 - reads_this_cycle)) & 1);
        ++reads_this_cycle;
        st.feed_input_bit(bit);
        break;
      }
      case machine_state::event::kind::budget_paused:
        return fail("per-cycle step budget exhausted");
      case machine_state::event::kind::emitted:
        if (!have_obs) {
          pending_obs = ev.bit;
          have_obs = true;
        } else {
          res.percepts.emplace_back(pending_obs, ev.bit);
          have_obs = false;
          ++completed;
          reads_this_cycle = 0;
          cycle_start_steps = st.steps();
          if (completed < cycles) st.set_step_limit(cycle_start_steps + step_budget_per_cycle);
        }
        break;
      case machine_state::event::kind::stopped:
        if (st.status() == machine_status::output_limit_reached && completed == cycles) {
          res.aborted = false;
          res.abort_reason.clear();
          res.consumed = st.consumed();
          res.steps = st.steps();
          return res;
        }
        return fail(std::string("stopped early: ") + status_name(st.status()));
    }
  }
}

}  // namespace aixilab

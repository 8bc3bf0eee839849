#include "aixilab/solomonoff.hpp"

#include <memory>
#include <vector>

#include "aixilab/errors.hpp"
#include "aixilab/machine.hpp"

namespace aixilab {

namespace {

// Explicit enumeration keeps one live machine per program; cap the space.
constexpr unsigned max_explicit_bits = 18;

void check_params(const approximation_params& p) {
  if (p.max_program_bits > max_explicit_bits)
    throw config_error("max_program_bits: explicit enumeration capped at " +
                       std::to_string(max_explicit_bits) + " bits");
}

inline uint8_t program_bit(uint32_t value, unsigned len, uint64_t index) {
  // Programs of a given length enumerate as integers; bit 0 is the MSB.
  return uint8_t((value >> (len - 1 - index)) & 1);
}

bit_string make_program(uint32_t value, unsigned len) {
  std::vector<uint8_t> bits(len);
  for (unsigned i = 0; i < len; ++i) bits[i] = program_bit(value, len, i);
  return bit_string(std::move(bits));
}

}  // namespace

rational lower_m(const bit_string& x, const approximation_params& params,
                 const snapshot_callback& on_round) {
  check_params(params);
  const unsigned L = params.max_program_bits;
  const uint64_t T = params.step_budget;

  struct live {
    uint32_t value;
    unsigned len;
    std::unique_ptr<machine_state> st;
  };
  std::vector<live> running;
  running.reserve(std::size_t(2) << L);
  for (unsigned len = 0; len <= L; ++len)
    for (uint64_t v = 0; v < (uint64_t(1) << len); ++v)
      running.push_back({uint32_t(v), len, std::make_unique<machine_state>(0, x.size())});

  rational mass(0);
  uint64_t round = 0;
  while (!running.empty()) {
    ++round;
    const uint64_t limit = std::min<uint64_t>(T, round * dovetail_quantum);
    std::vector<live> still;
    still.reserve(running.size());
    for (auto& pr : running) {
      machine_state& st = *pr.st;
      st.set_step_limit(limit);
      bool paused = false;
      while (!paused && !st.stopped()) {
        auto ev = st.advance();
        switch (ev.k) {
          case machine_state::event::kind::need_program_bit:
            if (st.consumed() < pr.len)
              st.feed_program_bit(program_bit(pr.value, pr.len, st.consumed()));
            else
              st.stop(machine_status::program_bits_exhausted);
            break;
          case machine_state::event::kind::need_input_bit:
            st.stop(machine_status::halted);  // lower_m conditions on nothing
            break;
          case machine_state::event::kind::emitted:
            break;
          case machine_state::event::kind::budget_paused:
            if (limit >= T)
              st.stop(machine_status::step_budget_exhausted);
            else
              paused = true;
            break;
          case machine_state::event::kind::stopped:
            break;
        }
      }
      if (st.stopped()) {
        // Minimal-program accounting: count p only when the whole program was
        // consumed by the step that emitted the |x|-th output bit.  The run
        // pauses exactly at that emit (output limit |x|), so the final
        // `consumed` is the count at that step.
        if (st.status() == machine_status::output_limit_reached && st.output() == x &&
            st.consumed() == pr.len)
          mass += pow2_neg(pr.len);
      } else {
        still.push_back(std::move(pr));
      }
    }
    running = std::move(still);
    if (on_round) on_round({round, mass, running.size()});
  }
  return mass;
}

rational predictive(const bit_string& prefix, uint8_t next_symbol,
                    const approximation_params& params, bool normalize) {
  if (next_symbol > 1) throw config_error("next_symbol must be 0 or 1");
  if (normalize) {
    const rational m0 = lower_m(prefix.with(0), params);
    const rational m1 = lower_m(prefix.with(1), params);
    if (m0 + m1 == 0) throw zero_prefix_mass("both one-symbol extensions have zero mass");
    return (next_symbol ? m1 : m0) / (m0 + m1);
  }
  const rational denom = lower_m(prefix, params);
  if (denom == 0) throw zero_prefix_mass("prefix has zero mass under the budgets");
  return lower_m(prefix.with(next_symbol), params) / denom;
}

std::optional<unsigned> complexity_upper(const bit_string& x, const approximation_params& params) {
  check_params(params);
  for (unsigned len = 0; len <= params.max_program_bits; ++len) {
    for (uint64_t v = 0; v < (uint64_t(1) << len); ++v) {
      auto res = execute(make_program(uint32_t(v), len), bit_string{}, params.step_budget, x.size());
      if (res.status == machine_status::output_limit_reached && res.output == x)
        return len;  // lengths ascend, so the first hit is the least
    }
  }
  return std::nullopt;
}

}  // namespace aixilab

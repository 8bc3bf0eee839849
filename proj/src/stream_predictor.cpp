#include "aixilab/stream_predictor.hpp"

#include <algorithm>

namespace aixilab {

namespace {

constexpr uint64_t unbounded_output = uint64_t(1) << 62;

// sum of 2^-e_i as (bigint, common scale): value = sum_scaled * 2^-scale.
struct dyadic_sum {
  bigint sum_scaled = 0;
  uint64_t scale = 0;

  void add_pow2_neg(uint64_t e) {
    if (e > scale) {
      sum_scaled <<= static_cast<unsigned>(e - scale);
      scale = e;
    }
    sum_scaled += bigint(1) << static_cast<unsigned>(scale - e);
  }
  rational value() const {
    if (sum_scaled == 0) return rational(0);
    return rational(sum_scaled, bigint(1) << static_cast<unsigned>(scale));
  }
};

}  // namespace

stream_predictor::stream_predictor(stream_predictor_params params) : params_(params) {
  if (params_.max_program_bits > 63)
    throw config_error("stream predictor supports at most 63 program bits");
  if (params_.max_states == 0)
    throw config_error("stream predictor needs max_states >= 1");
  machine_state root(params_.step_budget_per_cycle, unbounded_output);
  root.set_record_output(false);
  live_.push_back({std::move(root), 0, 0});
}

void stream_predictor::compact() {
  uint64_t best = ~uint64_t(0);
  for (const auto& s : frontier_) best = std::min(best, exponent(s));
  std::erase_if(frontier_, [&](const state& s) {
    return exponent(s) > best + params_.max_exponent_spread;
  });
  if (frontier_.size() <= params_.max_states) return;
  std::stable_sort(frontier_.begin(), frontier_.end(),
                   [&](const state& a, const state& b) { return exponent(a) < exponent(b); });
  frontier_.erase(frontier_.begin() + static_cast<std::ptrdiff_t>(params_.max_states),
                  frontier_.end());
}

void stream_predictor::expand() {
  using kind = machine_state::event::kind;
  std::vector<state> stack = std::move(live_);
  live_.clear();
  std::reverse(stack.begin(), stack.end());  // process in frontier order

  while (!stack.empty()) {
    state n = std::move(stack.back());
    stack.pop_back();
    bool alive = true;
    while (alive) {
      auto ev = n.m.advance();
      switch (ev.k) {
        case kind::need_program_bit: {
          auto len = static_cast<unsigned>(n.m.consumed());
          if (len < params_.max_program_bits) {
            state other = n;
            other.m.feed_program_bit(1);
            other.code |= uint64_t(1) << len;
            stack.push_back(std::move(other));
            n.m.feed_program_bit(0);
          } else {
            alive = false;
          }
          break;
        }
        case kind::need_input_bit: {
          state other = n;
          other.m.feed_input_bit(1);
          stack.push_back(std::move(other));
          n.m.feed_input_bit(0);
          break;
        }
        case kind::emitted:
          n.bit = ev.bit;
          frontier_.push_back(std::move(n));
          alive = false;
          if (frontier_.size() >= 2 * params_.max_states) compact();
          break;
        case kind::budget_paused:
        case kind::stopped:
          alive = false;
          break;
      }
    }
  }
  compact();

  dyadic_sum m0, m1;
  for (const auto& s : frontier_)
    (s.bit ? m1 : m0).add_pow2_neg(exponent(s));
  current_ = prediction{};
  current_.m0 = m0.value();
  current_.m1 = m1.value();
  rational total = current_.m0 + current_.m1;
  current_.live = (total != 0);
  if (current_.live) {
    current_.p1 = to_double(current_.m1 / total);
    current_.p0 = 1.0 - current_.p1;
    current_.argmax = (current_.m1 > current_.m0) ? 1 : 0;
  }
  expanded_ = true;
}

const stream_predictor::prediction& stream_predictor::predict() {
  if (!expanded_) expand();
  return current_;
}

void stream_predictor::observe(uint8_t bit) {
  if (!expanded_) expand();
  live_.clear();
  for (auto& s : frontier_) {
    if (s.bit != bit) continue;
    s.m.set_step_limit(s.m.steps() + params_.step_budget_per_cycle);
    live_.push_back(std::move(s));
  }
  frontier_.clear();
  expanded_ = false;
  ++cycles_;
}

std::size_t stream_predictor::frontier_states() {
  if (!expanded_) expand();
  return frontier_.size();
}

double stream_predictor::code_prefix_share(const bit_string& code) {
  if (!expanded_) expand();
  if (code.size() > 63) return 0.0;
  uint64_t want = 0;
  for (std::size_t i = 0; i < code.size(); ++i)
    if (code[i]) want |= uint64_t(1) << i;
  const uint64_t mask = (code.size() == 64) ? ~uint64_t(0) : ((uint64_t(1) << code.size()) - 1);

  dyadic_sum matched, total;
  for (const auto& s : frontier_) {
    uint64_t e = exponent(s);
    total.add_pow2_neg(e);
    if (s.m.consumed() >= code.size() && (s.code & mask) == want) matched.add_pow2_neg(e);
  }
  rational t = total.value();
  if (t == 0) return 0.0;
  return to_double(matched.value() / t);
}

bit_string copy_pattern_program() {
  // flip loop-open move-right read emit emit move-left loop-close
  return bit_string::parse("010101001100011011000110");
}

}  // namespace aixilab

#include "aixilab/program_env.hpp"

#include <map>
#include <set>
#include <utility>

#include "aixilab/machine.hpp"

namespace aixilab {

namespace {

constexpr uint64_t unbounded_output = uint64_t(1) << 62;

struct branch_node {
  machine_state m;
  bit_string code;  // program bits fed so far (probing mode only)
  unsigned completed = 0;
  int reads_this_cycle = 0;
  bool have_obs = false;
  uint8_t pending_obs = 0;
  unsigned coins = 0;
};

[[noreturn]] void node_cap_blown(std::size_t cap) {
  throw config_error("program branching exceeded the node cap (" + std::to_string(cap) +
                     "); lower max_program_bits / the step budget or raise max_nodes");
}

// Explores all (program bit, coin) branches of the probing tree for one fixed
// action sequence and returns the set of completing leaf prefixes: the program
// bits consumed at the moment the final reward bit of the last cycle was
// emitted.
std::set<bit_string> completing_leaves(const std::vector<int>& actions,
                                       const program_class_params& pc) {
  const auto& exec = pc.exec;
  const int width = action_bit_width(exec.num_actions);
  using kind = machine_state::event::kind;

  std::vector<branch_node> stack;
  stack.push_back({machine_state(exec.step_budget_per_cycle, unbounded_output),
                   bit_string{}, 0, 0, false, 0, 0});
  std::set<bit_string> leaves;
  std::size_t nodes = 0;

  while (!stack.empty()) {
    branch_node n = std::move(stack.back());
    stack.pop_back();
    if (++nodes > exec.max_nodes) node_cap_blown(exec.max_nodes);
    bool alive = true;
    while (alive) {
      auto ev = n.m.advance();
      switch (ev.k) {
        case kind::need_program_bit:
          if (n.code.size() < pc.max_program_bits) {
            branch_node other = n;
            other.m.feed_program_bit(1);
            other.code.push_back(1);
            stack.push_back(std::move(other));
            n.m.feed_program_bit(0);
            n.code.push_back(0);
          } else {
            alive = false;
          }
          break;
        case kind::need_input_bit:
          if (n.reads_this_cycle < width) {
            int a = actions[n.completed];
            n.m.feed_input_bit(static_cast<uint8_t>((a >> (width - 1 - n.reads_this_cycle)) & 1));
            ++n.reads_this_cycle;
          } else {
            branch_node other = n;
            other.m.feed_input_bit(1);
            ++other.coins;
            stack.push_back(std::move(other));
            n.m.feed_input_bit(0);
            ++n.coins;
          }
          break;
        case kind::emitted:
          if (!n.have_obs) {
            n.have_obs = true;
            n.pending_obs = ev.bit;
          } else {
            n.have_obs = false;
            ++n.completed;
            n.reads_this_cycle = 0;
            if (n.completed == pc.cycles) {
              leaves.insert(n.code);
              alive = false;
            } else {
              n.m.set_step_limit(n.m.steps() + exec.step_budget_per_cycle);
            }
          }
          break;
        case kind::budget_paused:
        case kind::stopped:
          alive = false;
          break;
      }
    }
  }
  return leaves;
}

// Observation-only probing: every read is a coin and every emitted bit closes
// one cycle.  Returns the completing leaf prefixes.
std::set<bit_string> obs_completing_leaves(const program_class_params& pc) {
  const auto& exec = pc.exec;
  using kind = machine_state::event::kind;

  std::vector<branch_node> stack;
  stack.push_back({machine_state(exec.step_budget_per_cycle, unbounded_output),
                   bit_string{}, 0, 0, false, 0, 0});
  std::set<bit_string> leaves;
  std::size_t nodes = 0;

  while (!stack.empty()) {
    branch_node n = std::move(stack.back());
    stack.pop_back();
    if (++nodes > exec.max_nodes) node_cap_blown(exec.max_nodes);
    bool alive = true;
    while (alive) {
      auto ev = n.m.advance();
      switch (ev.k) {
        case kind::need_program_bit:
          if (n.code.size() < pc.max_program_bits) {
            branch_node other = n;
            other.m.feed_program_bit(1);
            other.code.push_back(1);
            stack.push_back(std::move(other));
            n.m.feed_program_bit(0);
            n.code.push_back(0);
          } else {
            alive = false;
          }
          break;
        case kind::need_input_bit: {
          branch_node other = n;
          other.m.feed_input_bit(1);
          ++other.coins;
          stack.push_back(std::move(other));
          n.m.feed_input_bit(0);
          ++n.coins;
          break;
        }
        case kind::emitted:
          ++n.completed;
          if (n.completed == pc.cycles) {
            leaves.insert(n.code);
            alive = false;
          } else {
            n.m.set_step_limit(n.m.steps() + exec.step_budget_per_cycle);
          }
          break;
        case kind::budget_paused:
        case kind::stopped:
          alive = false;
          break;
      }
    }
  }
  return leaves;
}

// Lexicographic order puts every proper prefix before its extensions, so one
// forward pass keeping strings not covered by an earlier kept string yields
// the minimal (prefix-free) elements.
std::vector<bit_string> minimal_elements(const std::set<bit_string>& leaves) {
  std::vector<bit_string> kept;
  for (const auto& q : leaves) {
    bool covered = false;
    for (const auto& k : kept)
      if (k.is_prefix_of(q)) {
        covered = true;
        break;
      }
    if (!covered) kept.push_back(q);
  }
  return kept;
}

}  // namespace

std::vector<bit_string> program_class_members(const program_class_params& params) {
  if (params.cycles == 0)
    throw config_error("program class probing needs at least one cycle");
  const int a = params.exec.num_actions;
  std::size_t total_seqs = 1;
  for (unsigned c = 0; c < params.cycles; ++c) total_seqs *= static_cast<std::size_t>(a);

  std::map<bit_string, std::size_t> hits;
  std::vector<int> actions(params.cycles, 0);
  for (std::size_t idx = 0; idx < total_seqs; ++idx) {
    std::size_t rest = idx;
    for (unsigned c = 0; c < params.cycles; ++c) {
      actions[c] = static_cast<int>(rest % static_cast<std::size_t>(a));
      rest /= static_cast<std::size_t>(a);
    }
    for (const auto& q : minimal_elements(completing_leaves(actions, params))) ++hits[q];
  }

  std::vector<bit_string> members;
  for (const auto& [q, count] : hits)
    if (count == total_seqs) members.push_back(q);
  return members;
}

mixture program_class(const program_class_params& params) {
  auto members = program_class_members(params);
  if (members.empty())
    throw empty_class("no program of length <= " + std::to_string(params.max_program_bits) +
                      " is a valid " + std::to_string(params.cycles) +
                      "-cycle environment within " +
                      std::to_string(params.exec.step_budget_per_cycle) +
                      " steps per cycle; raise max_program_bits or the step budget");
  std::vector<mixture_component> comps;
  comps.reserve(members.size());
  for (auto& q : members) {
    auto env = std::make_shared<program_environment>(q, params.exec);
    rational w = pow2_neg(static_cast<unsigned>(q.size()));
    comps.push_back({env->name(), std::move(env), std::move(w)});
  }
  return mixture(std::move(comps));
}

program_environment::program_environment(bit_string code, program_exec_params exec)
    : code_(std::move(code)), exec_(exec) {}

std::string program_environment::name() const { return "program:" + code_.str(); }

std::vector<weighted_percept> program_environment::percept_distribution(const history& h,
                                                                        int action) const {
  const int width = action_bit_width(exec_.num_actions);
  const std::size_t k = h.cycles();
  using kind = machine_state::event::kind;

  std::vector<branch_node> stack;
  stack.push_back({machine_state(exec_.step_budget_per_cycle, unbounded_output),
                   bit_string{}, 0, 0, false, 0, 0});
  rational h_mass = (k == 0) ? rational(1) : rational(0);
  std::map<percept, rational> next;
  std::size_t nodes = 0;

  while (!stack.empty()) {
    branch_node n = std::move(stack.back());
    stack.pop_back();
    if (++nodes > exec_.max_nodes) node_cap_blown(exec_.max_nodes);
    bool alive = true;
    while (alive) {
      auto ev = n.m.advance();
      switch (ev.k) {
        case kind::need_program_bit: {
          auto idx = static_cast<std::size_t>(n.m.consumed());
          if (idx < code_.size()) {
            n.m.feed_program_bit(code_[idx]);
          } else {
            alive = false;
          }
          break;
        }
        case kind::need_input_bit:
          if (n.reads_this_cycle < width) {
            int a = (n.completed < k) ? h.action(n.completed) : action;
            n.m.feed_input_bit(static_cast<uint8_t>((a >> (width - 1 - n.reads_this_cycle)) & 1));
            ++n.reads_this_cycle;
          } else {
            branch_node other = n;
            other.m.feed_input_bit(1);
            ++other.coins;
            stack.push_back(std::move(other));
            n.m.feed_input_bit(0);
            ++n.coins;
          }
          break;
        case kind::emitted:
          if (!n.have_obs) {
            n.have_obs = true;
            n.pending_obs = ev.bit;
          } else {
            percept p{n.pending_obs, rational(int(ev.bit))};
            n.have_obs = false;
            ++n.completed;
            n.reads_this_cycle = 0;
            if (n.completed <= k) {
              if (!(p == h.at(n.completed - 1))) {
                alive = false;
                break;
              }
              if (n.completed == k) h_mass += pow2_neg(n.coins);
              n.m.set_step_limit(n.m.steps() + exec_.step_budget_per_cycle);
            } else {
              next[p] += pow2_neg(n.coins);
              alive = false;
            }
          }
          break;
        case kind::budget_paused:
        case kind::stopped:
          alive = false;
          break;
      }
    }
  }

  if (h_mass == 0)
    throw zero_mass("program " + name() + " assigns zero mass to the conditioning history");
  std::vector<weighted_percept> dist;
  dist.reserve(next.size());
  for (const auto& [p, m] : next) dist.push_back({p, m / h_mass});
  return dist;
}

std::vector<bit_string> obs_program_class_members(const program_class_params& params) {
  if (params.cycles == 0)
    throw config_error("program class probing needs at least one cycle");
  return minimal_elements(obs_completing_leaves(params));
}

mixture obs_program_class(const program_class_params& params) {
  auto members = obs_program_class_members(params);
  if (members.empty())
    throw empty_class("no program of length <= " + std::to_string(params.max_program_bits) +
                      " emits " + std::to_string(params.cycles) +
                      " observation bits within " +
                      std::to_string(params.exec.step_budget_per_cycle) +
                      " steps per cycle; raise max_program_bits or the step budget");
  std::vector<mixture_component> comps;
  comps.reserve(members.size());
  for (auto& q : members) {
    auto env = std::make_shared<program_prediction_env>(q, params.exec);
    rational w = pow2_neg(static_cast<unsigned>(q.size()));
    comps.push_back({env->name(), std::move(env), std::move(w)});
  }
  return mixture(std::move(comps));
}

program_prediction_env::program_prediction_env(bit_string code, program_exec_params exec)
    : code_(std::move(code)), exec_(exec) {}

std::string program_prediction_env::name() const { return "predict:" + code_.str(); }

std::vector<weighted_percept> program_prediction_env::percept_distribution(
    const history& h, int action) const {
  const std::size_t k = h.cycles();
  using kind = machine_state::event::kind;

  std::vector<branch_node> stack;
  stack.push_back({machine_state(exec_.step_budget_per_cycle, unbounded_output),
                   bit_string{}, 0, 0, false, 0, 0});
  rational h_mass = (k == 0) ? rational(1) : rational(0);
  rational next_mass[2] = {rational(0), rational(0)};
  std::size_t nodes = 0;

  while (!stack.empty()) {
    branch_node n = std::move(stack.back());
    stack.pop_back();
    if (++nodes > exec_.max_nodes) node_cap_blown(exec_.max_nodes);
    bool alive = true;
    while (alive) {
      auto ev = n.m.advance();
      switch (ev.k) {
        case kind::need_program_bit: {
          auto idx = static_cast<std::size_t>(n.m.consumed());
          if (idx < code_.size()) {
            n.m.feed_program_bit(code_[idx]);
          } else {
            alive = false;
          }
          break;
        }
        case kind::need_input_bit: {
          branch_node other = n;
          other.m.feed_input_bit(1);
          ++other.coins;
          stack.push_back(std::move(other));
          n.m.feed_input_bit(0);
          ++n.coins;
          break;
        }
        case kind::emitted:
          ++n.completed;
          if (n.completed <= k) {
            if (static_cast<int>(ev.bit) != h.at(n.completed - 1).obs) {
              alive = false;
              break;
            }
            if (n.completed == k) h_mass += pow2_neg(n.coins);
            n.m.set_step_limit(n.m.steps() + exec_.step_budget_per_cycle);
          } else {
            next_mass[ev.bit] += pow2_neg(n.coins);
            alive = false;
          }
          break;
        case kind::budget_paused:
        case kind::stopped:
          alive = false;
          break;
      }
    }
  }

  if (h_mass == 0)
    throw zero_mass("program " + name() + " assigns zero mass to the observed stream");
  std::vector<weighted_percept> dist;
  for (int obs = 0; obs < 2; ++obs) {
    if (next_mass[obs] == 0) continue;
    dist.push_back({percept{obs, rational(action == obs ? 1 : 0)}, next_mass[obs] / h_mass});
  }
  return dist;
}

}  // namespace aixilab

#pragma once

// Chronological environments: percept = (observation, reward), reward an exact
// rational in [0, 1].  An environment is a stateless conditional law
// nu(percept | history, action); per-step laws may be semimeasures (the percept
// probabilities may sum below one; the missing mass is abandonment).

#include <memory>
#include <string>
#include <vector>

#include "aixilab/errors.hpp"
#include "aixilab/rational.hpp"
#include "aixilab/rng.hpp"

namespace aixilab {

struct percept {
  int obs = 0;
  rational reward;

  bool operator==(const percept& o) const { return obs == o.obs && reward == o.reward; }
  // Canonical ordering for deterministic percept enumeration.
  bool operator<(const percept& o) const {
    if (obs != o.obs) return obs < o.obs;
    return reward < o.reward;
  }
};

struct weighted_percept {
  percept p;
  rational prob;
};

// A completed interaction history: action_1 percept_1 ... action_k percept_k.
class history {
 public:
  std::size_t cycles() const { return actions_.size(); }
  bool empty() const { return actions_.empty(); }
  int action(std::size_t k) const { return actions_[k]; }
  const percept& at(std::size_t k) const { return percepts_[k]; }
  const percept& last() const { return percepts_.back(); }

  void push(int action, percept p) {
    actions_.push_back(action);
    percepts_.push_back(std::move(p));
  }
  void pop() {
    actions_.pop_back();
    percepts_.pop_back();
  }

  rational total_reward() const {
    rational t(0);
    for (const auto& p : percepts_) t += p.reward;
    return t;
  }

 private:
  std::vector<int> actions_;
  std::vector<percept> percepts_;
};

class chronological_environment {
 public:
  virtual ~chronological_environment() = default;
  virtual std::string name() const = 0;
  virtual int num_actions() const = 0;

  // Distribution of the next percept given the history and the action taken
  // this cycle.  Entries carry positive probability; the sum is at most one.
  virtual std::vector<weighted_percept> percept_distribution(const history& h,
                                                             int action) const = 0;

  // Generative side.  Default: exact inverse-CDF over percept_distribution
  // with a dyadic 63-bit uniform draw; a strict semimeasure is renormalized
  // (sampling conditions on the environment continuing).
  virtual percept sample(const history& h, int action, rng& r) const;
};

using env_ptr = std::shared_ptr<const chronological_environment>;

}  // namespace aixilab

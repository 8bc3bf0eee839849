#pragma once

// Finite-horizon expectimax over a Bayes mixture: the planning backbone.
//
// Values follow the posterior-predictive semimeasure: a percept's step weight
// is xi(h a p) / xi(h), missing mass earns zero reward, and the recursion
// maximizes over actions at every node with ties resolved to the lowest
// action index.  The exact (rational) planner backs tests and small demos;
// episode-scale policies use the same recursion in double arithmetic.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aixilab/environment.hpp"
#include "aixilab/mixture.hpp"

namespace aixilab {

// The mixture itself viewed as an environment (its posterior-predictive law).
class mixture_env : public chronological_environment {
 public:
  explicit mixture_env(mixture mix, std::string name = "xi");
  std::string name() const override { return name_; }
  int num_actions() const override { return mix_.num_actions(); }
  std::vector<weighted_percept> percept_distribution(const history& h,
                                                     int action) const override;

 private:
  mixture mix_;
  std::string name_;
};

struct value_report {
  std::vector<rational> action_values;  // exact root Q-values
  int best_action = 0;
  rational value;  // max_a action_values[a]
};

// Exact depth-`horizon` expectimax from history h.  Throws zero_mass when the
// mixture assigns no mass to h.
value_report expectimax(const mixture& mix, const history& h, int horizon);

// Expected total reward of following `pol` for `horizon` cycles from h under
// the environment's exact law (semimeasure: abandoned mass earns zero).
rational policy_value(const chronological_environment& env,
                      const std::function<int(const history&)>& pol, const history& h,
                      int horizon);

// --- Episode policies ---------------------------------------------------------

class policy {
 public:
  virtual ~policy() = default;
  virtual std::string name() const = 0;
  virtual int act(const history& h, rng& r) = 0;
  virtual void reset() {}
};

using policy_ptr = std::shared_ptr<policy>;

policy_ptr random_policy(int num_actions);
policy_ptr fixed_action_policy(int action);

// Receding-horizon planner over `model`: at cycle k it plans to depth
// min(depth_cap, lifetime - k) with double arithmetic and an incrementally
// maintained posterior.  If every component has died it falls back to action
// 0.  depth_cap = 1 is the myopic agent.
policy_ptr expectimax_policy(mixture model, int depth_cap, std::size_t lifetime,
                             std::string name = "");

struct episode {
  history h;
  rational total_reward;
};

// Runs `pol` against `env` for `cycles` cycles with a deterministic seed.
episode run_episode(policy& pol, const chronological_environment& env, std::size_t cycles,
                    uint64_t seed);

}  // namespace aixilab

#pragma once

// Explicit desk-scale environment classes with exact rational laws: Bernoulli
// prediction, the selected-bits pattern task, 2x2 matrix games against fixed
// opponents, and tiny MDPs.  Each comes with a matching hand-built model class
// (a mixture) used by the planner and the intelligence-order suite.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aixilab/environment.hpp"
#include "aixilab/mixture.hpp"

namespace aixilab {

// --- Bernoulli prediction -------------------------------------------------
// obs_t ~ Bernoulli(theta) i.i.d., actions {0,1} are guesses,
// reward  = 1 if the guess matches the observation else 0.
class bernoulli_prediction_env : public chronological_environment {
 public:
  explicit bernoulli_prediction_env(rational theta);
  std::string name() const override;
  int num_actions() const override { return 2; }
  std::vector<weighted_percept> percept_distribution(const history& h,
                                                     int action) const override;
  const rational& theta() const { return theta_; }

 private:
  rational theta_;
};

// The 9-point parameter grid {0.15, 0.25, ..., 0.95} used for Bernoulli model
// classes (it contains 3/4 exactly).
std::vector<rational> bernoulli_grid();
// Uniform-prior mixture over bernoulli_prediction_env on the given grid.
mixture bernoulli_model_class(const std::vector<rational>& grid, bool uniform_prior = true);

// --- Selected bits ----------------------------------------------------------
// Cycles t = 1, 2, ...: odd t emits a pseudorandom source bit (a fixed
// function of the seed and t), even t repeats the bit from cycle t-1.
// Actions are guesses, reward = 1 on a match.
class selected_bits_env : public chronological_environment {
 public:
  explicit selected_bits_env(std::uint64_t seed);
  std::string name() const override;
  int num_actions() const override { return 2; }
  std::vector<weighted_percept> percept_distribution(const history& h,
                                                     int action) const override;
  // The deterministic odd-cycle source, exposed so tests and experiments can
  // score predictions without replaying the environment.
  int source_bit(std::size_t t_one_based) const;

 private:
  std::uint64_t seed_;
};

// The matching law with the odd bits uniformly random instead of pinned to a
// seed: odd cycles obs ~ Bernoulli(1/2), even cycles copy the previous obs.
class selected_bits_law_env : public chronological_environment {
 public:
  std::string name() const override { return "selected-bits-law"; }
  int num_actions() const override { return 2; }
  std::vector<weighted_percept> percept_distribution(const history& h,
                                                     int action) const override;
};

// Model class {copy law, iid uniform} with Elias-gamma prior.
mixture selected_bits_model_class();

// --- 2x2 matrix games -------------------------------------------------------
// Simultaneous moves; the agent sees the opponent's move as the observation
// and receives payoff[agent move][opponent move].  The opponent sees the full
// past interaction but not the current move.
class matrix_opponent {
 public:
  virtual ~matrix_opponent() = default;
  virtual std::string name() const = 0;
  // Distribution over the opponent's move {0, 1} given the agent-side history.
  virtual std::vector<std::pair<int, rational>> move_distribution(const history& h) const = 0;
};

using opponent_ptr = std::shared_ptr<const matrix_opponent>;

opponent_ptr always_move_opponent(int move);         // plays `move` every cycle
opponent_ptr tit_for_tat_opponent();                 // repeats the agent's previous move; opens with 0
opponent_ptr bernoulli_opponent(rational p_move1);   // iid moves, P(move 1) = p
// Wraps an arbitrary deterministic move rule (used for bounded-planner
// opponents in the self-play experiment).
opponent_ptr function_opponent(std::string name, std::function<int(const history&)> rule);

class matrix_game_env : public chronological_environment {
 public:
  matrix_game_env(std::string game_name, std::array<std::array<rational, 2>, 2> payoff,
                  opponent_ptr opp);
  std::string name() const override;
  int num_actions() const override { return 2; }
  std::vector<weighted_percept> percept_distribution(const history& h,
                                                     int action) const override;
  const std::array<std::array<rational, 2>, 2>& payoff() const { return payoff_; }

 private:
  std::string game_name_;
  std::array<std::array<rational, 2>, 2> payoff_;
  opponent_ptr opp_;
};

// Prisoner's dilemma payoffs scaled into [0, 1]: action/move 0 = cooperate,
// 1 = defect; (C,C) = 2/3, (C,D) = 0, (D,C) = 1, (D,D) = 1/3.
std::array<std::array<rational, 2>, 2> prisoners_dilemma_payoff();
env_ptr pd_vs(opponent_ptr opp);
// Model class: the same game against {always-C, always-D, tit-for-tat,
// Bernoulli(1/2)} with Elias-gamma prior.
mixture pd_model_class();

// --- Tiny MDPs ---------------------------------------------------------------
// Up to 4 states; obs = the state reached this cycle, reward = r(s, a) of the
// state acted from.  The initial state is 0.  Transition rows must sum to 1
// and rewards must lie in [0, 1]; violations raise malformed_model.
struct mdp_spec {
  std::string name;
  int num_states = 0;
  int num_actions = 0;
  // transition[s][a][s'] = P(s' | s, a)
  std::vector<std::vector<std::vector<rational>>> transition;
  // reward[s][a] in [0, 1]
  std::vector<std::vector<rational>> reward;
};

class tiny_mdp_env : public chronological_environment {
 public:
  explicit tiny_mdp_env(mdp_spec spec);  // validates; throws malformed_model
  std::string name() const override;
  int num_actions() const override { return spec_.num_actions; }
  std::vector<weighted_percept> percept_distribution(const history& h,
                                                     int action) const override;
  const mdp_spec& spec() const { return spec_; }
  int state_after(const history& h) const;

 private:
  mdp_spec spec_;
};

// Two-state chain: action 0 = stay, 1 = go (deterministic switch);
// r(0, stay) = 1/10, r(0, go) = 0, r(1, stay) = 9/10, r(1, go) = 0.
mdp_spec chain_mdp_spec();
// Variants used in the chain model class: "slippery" (go succeeds w.p. 3/4)
// and "dull" (r(1, stay) = 1/2).
mixture chain_mdp_model_class();

// --- Catalog -----------------------------------------------------------------
struct catalog_entry {
  std::string name;
  std::string description;
  int num_actions = 2;
  // The sampled "true" environment; the seed feeds any internal randomness
  // source (only selected-bits uses it).
  std::function<env_ptr(std::uint64_t seed)> make_true_env;
  // The agent-side model class for this environment.
  std::function<mixture()> make_model_class;
};

const std::vector<catalog_entry>& environment_catalog();
const catalog_entry& catalog_lookup(const std::string& name);  // throws malformed_model

}  // namespace aixilab

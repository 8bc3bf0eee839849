#include "aixilab/environments.hpp"

#include <map>
#include <utility>

namespace aixilab {

namespace {

rational match_reward(int action, int obs) { return rational(action == obs ? 1 : 0); }

void check_probability(const rational& p, const std::string& what) {
  if (p < 0 || p > 1) throw malformed_model(what + " must lie in [0, 1], got " + rational_str(p));
}

}  // namespace

// --- Bernoulli prediction ----------------------------------------------------

bernoulli_prediction_env::bernoulli_prediction_env(rational theta) : theta_(std::move(theta)) {
  check_probability(theta_, "bernoulli parameter");
}

std::string bernoulli_prediction_env::name() const {
  return "bernoulli(" + rational_str(theta_) + ")";
}

std::vector<weighted_percept> bernoulli_prediction_env::percept_distribution(
    const history&, int action) const {
  std::vector<weighted_percept> dist;
  if (theta_ < 1) dist.push_back({{0, match_reward(action, 0)}, 1 - theta_});
  if (theta_ > 0) dist.push_back({{1, match_reward(action, 1)}, theta_});
  return dist;
}

std::vector<rational> bernoulli_grid() {
  std::vector<rational> grid;
  for (int k = 0; k < 9; ++k) grid.emplace_back(2 * k + 3, 20);
  return grid;
}

mixture bernoulli_model_class(const std::vector<rational>& grid, bool uniform_prior) {
  std::vector<std::pair<std::string, env_ptr>> envs;
  for (const auto& theta : grid) {
    auto env = std::make_shared<bernoulli_prediction_env>(theta);
    envs.emplace_back(env->name(), std::move(env));
  }
  if (!uniform_prior) return mixture::with_gamma_weights(std::move(envs));
  std::vector<mixture_component> comps;
  rational w(1, static_cast<long>(envs.size()));
  for (auto& [id, env] : envs) comps.push_back({std::move(id), std::move(env), w});
  return mixture(std::move(comps));
}

// --- Selected bits -------------------------------------------------------------

selected_bits_env::selected_bits_env(std::uint64_t seed) : seed_(seed) {}

std::string selected_bits_env::name() const {
  return "selected-bits(" + std::to_string(seed_) + ")";
}

int selected_bits_env::source_bit(std::size_t t_one_based) const {
  return static_cast<int>(derive_seed(seed_, t_one_based) & 1u);
}

std::vector<weighted_percept> selected_bits_env::percept_distribution(const history& h,
                                                                      int action) const {
  std::size_t t = h.cycles() + 1;
  int obs = (t % 2 == 1) ? source_bit(t) : h.at(h.cycles() - 1).obs;
  return {{{obs, match_reward(action, obs)}, rational(1)}};
}

std::vector<weighted_percept> selected_bits_law_env::percept_distribution(const history& h,
                                                                          int action) const {
  std::size_t t = h.cycles() + 1;
  if (t % 2 == 0) {
    int obs = h.at(h.cycles() - 1).obs;
    return {{{obs, match_reward(action, obs)}, rational(1)}};
  }
  return {{{0, match_reward(action, 0)}, rational(1, 2)},
          {{1, match_reward(action, 1)}, rational(1, 2)}};
}

mixture selected_bits_model_class() {
  std::vector<std::pair<std::string, env_ptr>> envs;
  envs.emplace_back("copy-law", std::make_shared<selected_bits_law_env>());
  envs.emplace_back("iid-uniform", std::make_shared<bernoulli_prediction_env>(rational(1, 2)));
  return mixture::with_gamma_weights(std::move(envs));
}

// --- Matrix games ----------------------------------------------------------------

namespace {

class always_move_t : public matrix_opponent {
 public:
  explicit always_move_t(int move) : move_(move) {}
  std::string name() const override { return "always-" + std::to_string(move_); }
  std::vector<std::pair<int, rational>> move_distribution(const history&) const override {
    return {{move_, rational(1)}};
  }

 private:
  int move_;
};

class tit_for_tat_t : public matrix_opponent {
 public:
  std::string name() const override { return "tit-for-tat"; }
  std::vector<std::pair<int, rational>> move_distribution(const history& h) const override {
    int move = h.empty() ? 0 : h.action(h.cycles() - 1);
    return {{move, rational(1)}};
  }
};

class bernoulli_opponent_t : public matrix_opponent {
 public:
  explicit bernoulli_opponent_t(rational p) : p_(std::move(p)) {
    check_probability(p_, "opponent move probability");
  }
  std::string name() const override { return "bernoulli(" + rational_str(p_) + ")"; }
  std::vector<std::pair<int, rational>> move_distribution(const history&) const override {
    std::vector<std::pair<int, rational>> dist;
    if (p_ < 1) dist.emplace_back(0, 1 - p_);
    if (p_ > 0) dist.emplace_back(1, p_);
    return dist;
  }

 private:
  rational p_;
};

class function_opponent_t : public matrix_opponent {
 public:
  function_opponent_t(std::string name, std::function<int(const history&)> rule)
      : name_(std::move(name)), rule_(std::move(rule)) {}
  std::string name() const override { return name_; }
  std::vector<std::pair<int, rational>> move_distribution(const history& h) const override {
    return {{rule_(h), rational(1)}};
  }

 private:
  std::string name_;
  std::function<int(const history&)> rule_;
};

}  // namespace

opponent_ptr always_move_opponent(int move) { return std::make_shared<always_move_t>(move); }
opponent_ptr tit_for_tat_opponent() { return std::make_shared<tit_for_tat_t>(); }
opponent_ptr bernoulli_opponent(rational p) {
  return std::make_shared<bernoulli_opponent_t>(std::move(p));
}
opponent_ptr function_opponent(std::string name, std::function<int(const history&)> rule) {
  return std::make_shared<function_opponent_t>(std::move(name), std::move(rule));
}

matrix_game_env::matrix_game_env(std::string game_name,
                                 std::array<std::array<rational, 2>, 2> payoff, opponent_ptr opp)
    : game_name_(std::move(game_name)), payoff_(std::move(payoff)), opp_(std::move(opp)) {
  for (const auto& row : payoff_)
    for (const auto& r : row) check_probability(r, "matrix game payoff");
}

std::string matrix_game_env::name() const { return game_name_ + "-vs-" + opp_->name(); }

std::vector<weighted_percept> matrix_game_env::percept_distribution(const history& h,
                                                                    int action) const {
  std::map<percept, rational> merged;
  for (const auto& [move, prob] : opp_->move_distribution(h))
    merged[{move, payoff_[action][move]}] += prob;
  std::vector<weighted_percept> dist;
  for (const auto& [p, prob] : merged)
    if (prob != 0) dist.push_back({p, prob});
  return dist;
}

std::array<std::array<rational, 2>, 2> prisoners_dilemma_payoff() {
  return {{{rational(2, 3), rational(0)}, {rational(1), rational(1, 3)}}};
}

env_ptr pd_vs(opponent_ptr opp) {
  return std::make_shared<matrix_game_env>("pd", prisoners_dilemma_payoff(), std::move(opp));
}

mixture pd_model_class() {
  std::vector<std::pair<std::string, env_ptr>> envs;
  for (auto& opp : {always_move_opponent(0), always_move_opponent(1), tit_for_tat_opponent(),
                    bernoulli_opponent(rational(1, 2))}) {
    auto env = pd_vs(opp);
    envs.emplace_back(env->name(), std::move(env));
  }
  return mixture::with_gamma_weights(std::move(envs));
}

// --- Tiny MDPs ---------------------------------------------------------------------

tiny_mdp_env::tiny_mdp_env(mdp_spec spec) : spec_(std::move(spec)) {
  if (spec_.num_states < 1 || spec_.num_states > 4)
    throw malformed_model("mdp '" + spec_.name + "': need 1..4 states");
  if (spec_.num_actions < 1 || spec_.num_actions > 4)
    throw malformed_model("mdp '" + spec_.name + "': need 1..4 actions");
  auto n = static_cast<std::size_t>(spec_.num_states);
  auto a = static_cast<std::size_t>(spec_.num_actions);
  if (spec_.transition.size() != n || spec_.reward.size() != n)
    throw malformed_model("mdp '" + spec_.name + "': transition/reward tables sized off the state count");
  for (std::size_t s = 0; s < n; ++s) {
    if (spec_.transition[s].size() != a || spec_.reward[s].size() != a)
      throw malformed_model("mdp '" + spec_.name + "': tables sized off the action count");
    for (std::size_t act = 0; act < a; ++act) {
      if (spec_.transition[s][act].size() != n)
        throw malformed_model("mdp '" + spec_.name + "': transition row sized off the state count");
      rational row_sum(0);
      for (const auto& p : spec_.transition[s][act]) {
        check_probability(p, "mdp '" + spec_.name + "' transition probability");
        row_sum += p;
      }
      if (row_sum != 1)
        throw malformed_model("mdp '" + spec_.name + "': transition row sums to " +
                              rational_str(row_sum) + ", not 1");
      check_probability(spec_.reward[s][act], "mdp '" + spec_.name + "' reward");
    }
  }
}

std::string tiny_mdp_env::name() const { return "mdp-" + spec_.name; }

int tiny_mdp_env::state_after(const history& h) const {
  return h.empty() ? 0 : h.last().obs;
}

std::vector<weighted_percept> tiny_mdp_env::percept_distribution(const history& h,
                                                                 int action) const {
  if (action < 0 || action >= spec_.num_actions)
    throw malformed_model("mdp '" + spec_.name + "': action out of range");
  int s = state_after(h);
  const rational& r = spec_.reward[s][action];
  std::vector<weighted_percept> dist;
  for (int next = 0; next < spec_.num_states; ++next) {
    const rational& p = spec_.transition[s][action][next];
    if (p != 0) dist.push_back({{next, r}, p});
  }
  return dist;
}

mdp_spec chain_mdp_spec() {
  mdp_spec spec;
  spec.name = "chain";
  spec.num_states = 2;
  spec.num_actions = 2;
  // action 0 = stay, action 1 = go.
  spec.transition = {{{rational(1), rational(0)}, {rational(0), rational(1)}},
                     {{rational(0), rational(1)}, {rational(1), rational(0)}}};
  spec.reward = {{rational(1, 10), rational(0)}, {rational(9, 10), rational(0)}};
  return spec;
}

mixture chain_mdp_model_class() {
  auto slippery = chain_mdp_spec();
  slippery.name = "chain-slippery";
  // "go" only succeeds with probability 3/4.
  slippery.transition[0][1] = {rational(1, 4), rational(3, 4)};
  slippery.transition[1][1] = {rational(3, 4), rational(1, 4)};

  auto dull = chain_mdp_spec();
  dull.name = "chain-dull";
  dull.reward[1][0] = rational(1, 2);

  std::vector<std::pair<std::string, env_ptr>> envs;
  for (auto& spec : {chain_mdp_spec(), slippery, dull}) {
    auto env = std::make_shared<tiny_mdp_env>(spec);
    envs.emplace_back(env->name(), std::move(env));
  }
  return mixture::with_gamma_weights(std::move(envs));
}

// --- Catalog ------------------------------------------------------------------------

const std::vector<catalog_entry>& environment_catalog() {
  static const std::vector<catalog_entry> catalog = [] {
    std::vector<catalog_entry> entries;
    entries.push_back({"bernoulli",
                       "iid Bernoulli(3/4) observation, reward 1 for a correct guess",
                       2,
                       [](std::uint64_t) -> env_ptr {
                         return std::make_shared<bernoulli_prediction_env>(rational(3, 4));
                       },
                       [] { return bernoulli_model_class(bernoulli_grid()); }});
    entries.push_back({"selected-bits",
                       "odd cycles emit seeded source bits, even cycles repeat them;"
                       " reward 1 for a correct guess",
                       2,
                       [](std::uint64_t seed) -> env_ptr {
                         return std::make_shared<selected_bits_env>(seed);
                       },
                       [] { return selected_bits_model_class(); }});
    entries.push_back({"pd-tit-for-tat",
                       "prisoner's dilemma against tit-for-tat, payoffs scaled into [0,1]",
                       2,
                       [](std::uint64_t) -> env_ptr { return pd_vs(tit_for_tat_opponent()); },
                       [] { return pd_model_class(); }});
    entries.push_back({"chain-mdp",
                       "two-state deterministic chain, small reward near home and a large"
                       " one behind a zero-reward move",
                       2,
                       [](std::uint64_t) -> env_ptr {
                         return std::make_shared<tiny_mdp_env>(chain_mdp_spec());
                       },
                       [] { return chain_mdp_model_class(); }});
    return entries;
  }();
  return catalog;
}

const catalog_entry& catalog_lookup(const std::string& name) {
  for (const auto& e : environment_catalog())
    if (e.name == name) return e;
  std::string names;
  for (const auto& e : environment_catalog()) names += " " + e.name;
  throw malformed_model("unknown environment '" + name + "'; catalog:" + names);
}

}  // namespace aixilab

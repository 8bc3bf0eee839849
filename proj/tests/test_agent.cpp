#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "aixilab/agent.hpp"
#include "aixilab/environments.hpp"
#include "aixilab/errors.hpp"

using namespace aixilab;

namespace {

// Independent oracle 1: enumerate EVERY depth-d policy tree explicitly and
// evaluate each by path expansion under the mixture's posterior-predictive
// semimeasure.  No per-node maximization happens until the very end, so this
// shares no structure with the planner's max-sum recursion.
std::vector<rational> all_policy_values(const mixture& mix, history& h, int depth) {
  if (depth == 0) return {rational(0)};
  std::vector<rational> values;
  for (int a = 0; a < mix.num_actions(); ++a) {
    auto dist = mix.predict(h, a, /*normalize=*/false);
    rational immediate(0);
    for (const auto& wp : dist) immediate += wp.prob * wp.p.reward;

    std::vector<std::vector<rational>> sub(dist.size());
    for (std::size_t j = 0; j < dist.size(); ++j) {
      h.push(a, dist[j].p);
      sub[j] = all_policy_values(mix, h, depth - 1);
      h.pop();
    }
    // Cartesian product over independent per-percept subtree policies.
    std::vector<std::size_t> idx(dist.size(), 0);
    while (true) {
      rational v = immediate;
      for (std::size_t j = 0; j < dist.size(); ++j) v += dist[j].prob * sub[j][idx[j]];
      values.push_back(v);
      std::size_t j = 0;
      while (j < dist.size()) {
        if (++idx[j] < sub[j].size()) break;
        idx[j] = 0;
        ++j;
      }
      if (j == dist.size()) break;
    }
  }
  return values;
}

rational flat_oracle_best(const mixture& mix, const history& h, int depth) {
  history scratch = h;
  auto values = all_policy_values(mix, scratch, depth);
  return *std::max_element(values.begin(), values.end());
}

// Independent oracle 2: finite-horizon value iteration on an MDP spec.
// V_0 = 0;  V_d(s) = max_a [ r(s, a) + sum_s' P(s' | s, a) V_{d-1}(s') ].
rational value_iteration(const mdp_spec& spec, int start_state, int depth) {
  std::vector<rational> v(static_cast<std::size_t>(spec.num_states), rational(0));
  for (int d = 0; d < depth; ++d) {
    std::vector<rational> next(v.size());
    for (int s = 0; s < spec.num_states; ++s) {
      rational best(-1);
      for (int a = 0; a < spec.num_actions; ++a) {
        rational q = spec.reward[s][a];
        for (int t = 0; t < spec.num_states; ++t) {
          q += spec.transition[s][a][t] * v[static_cast<std::size_t>(t)];
        }
        if (q > best) best = q;
      }
      next[static_cast<std::size_t>(s)] = best;
    }
    v = std::move(next);
  }
  return v[static_cast<std::size_t>(start_state)];
}

mixture two_point_bernoulli(const rational& w_low) {
  std::vector<mixture_component> comps;
  comps.push_back({"low", std::make_shared<bernoulli_prediction_env>(rational(1, 4)), w_low});
  comps.push_back(
      {"high", std::make_shared<bernoulli_prediction_env>(rational(3, 4)), 1 - w_low});
  return mixture(std::move(comps));
}

mixture singleton(const std::string& id, env_ptr env) {
  return mixture({{id, std::move(env), rational(1)}});
}

}  // namespace

TEST_CASE("expectimax matches the flat policy-tree oracle") {
  history empty;

  SUBCASE("two-point bernoulli class") {
    mixture mix = two_point_bernoulli(rational(1, 3));
    for (int d = 1; d <= 3; ++d) {
      auto report = expectimax(mix, empty, d);
      CHECK(report.value == flat_oracle_best(mix, empty, d));
    }
    // also from a non-empty history (one correct guess of 1)
    history h;
    h.push(1, percept{1, rational(1)});
    for (int d = 1; d <= 3; ++d) {
      auto report = expectimax(mix, h, d);
      CHECK(report.value == flat_oracle_best(mix, h, d));
    }
  }

  SUBCASE("prisoner's dilemma model class") {
    mixture mix = pd_model_class();
    for (int d = 1; d <= 3; ++d) {
      auto report = expectimax(mix, empty, d);
      CHECK(report.value == flat_oracle_best(mix, empty, d));
      CHECK(report.value == report.action_values[static_cast<std::size_t>(report.best_action)]);
    }
  }

  SUBCASE("chain MDP model class") {
    mixture mix = chain_mdp_model_class();
    for (int d = 1; d <= 3; ++d) {
      auto report = expectimax(mix, empty, d);
      CHECK(report.value == flat_oracle_best(mix, empty, d));
    }
  }
}

TEST_CASE("expectimax ties break to the lowest action index") {
  // Symmetric two-point class: P(obs = 1) = 1/2 marginally, so guessing 0 and
  // guessing 1 have identical value at every depth.
  mixture mix = two_point_bernoulli(rational(1, 2));
  history empty;
  for (int d = 1; d <= 3; ++d) {
    auto report = expectimax(mix, empty, d);
    CHECK(report.action_values[0] == report.action_values[1]);
    CHECK(report.best_action == 0);
  }
}

TEST_CASE("expectimax on a singleton chain mixture equals value iteration") {
  mdp_spec spec = chain_mdp_spec();
  mixture mix = singleton("chain", std::make_shared<tiny_mdp_env>(spec));
  history empty;
  for (int d = 1; d <= 6; ++d) {
    auto report = expectimax(mix, empty, d);
    CHECK(report.value == value_iteration(spec, 0, d));
  }
  // Frozen small-depth values: stay pays 1/10 now; go pays 9/10 one step later.
  CHECK(expectimax(mix, empty, 1).value == rational(1, 10));
  CHECK(expectimax(mix, empty, 1).best_action == 0);
  CHECK(expectimax(mix, empty, 2).value == rational(9, 10));
  CHECK(expectimax(mix, empty, 2).best_action == 1);
  CHECK(expectimax(mix, empty, 3).value == rational(9, 5));
}

TEST_CASE("policy_value evaluates fixed policies exactly") {
  mdp_spec spec = chain_mdp_spec();
  tiny_mdp_env chain(spec);
  history empty;
  auto always = [](int a) {
    return std::function<int(const history&)>([a](const history&) { return a; });
  };
  CHECK(policy_value(chain, always(0), empty, 3) == rational(3, 10));
  CHECK(policy_value(chain, always(1), empty, 3) == rational(0));

  // go once then stay: 0 + 9/10 + 9/10
  auto go_then_stay = std::function<int(const history&)>(
      [](const history& h) { return h.empty() ? 1 : 0; });
  CHECK(policy_value(chain, go_then_stay, empty, 3) == rational(9, 5));

  // No fixed action script beats the expectimax value.
  mixture mix = singleton("chain", std::make_shared<tiny_mdp_env>(spec));
  rational v3 = expectimax(mix, empty, 3).value;
  for (int a0 = 0; a0 < 2; ++a0) {
    for (int a1 = 0; a1 < 2; ++a1) {
      for (int a2 = 0; a2 < 2; ++a2) {
        std::vector<int> script = {a0, a1, a2};
        auto pol = std::function<int(const history&)>(
            [script](const history& h) { return script[h.cycles()]; });
        CHECK(policy_value(chain, pol, empty, 3) <= v3);
      }
    }
  }

  CHECK_THROWS_AS(policy_value(chain, always(0), empty, 0), config_error);
  CHECK_THROWS_AS(policy_value(chain, always(7), empty, 2), config_error);
}

TEST_CASE("fixed-policy value is linear in the mixture weights") {
  auto low = std::make_shared<bernoulli_prediction_env>(rational(1, 4));
  auto high = std::make_shared<bernoulli_prediction_env>(rational(3, 4));
  auto guess1 = std::function<int(const history&)>([](const history&) { return 1; });
  history empty;
  const int d = 3;

  rational v_low = policy_value(*low, guess1, empty, d);
  rational v_high = policy_value(*high, guess1, empty, d);
  CHECK(v_low == rational(3, 4));    // 3 * theta with theta = 1/4
  CHECK(v_high == rational(9, 4));

  // Interior lambda: the mixture law is the lambda-blend, so the fixed-policy
  // value must blend exactly.  Endpoints are the singletons themselves.
  for (const rational lambda : {rational(1, 4), rational(1, 2), rational(3, 4)}) {
    mixture mix({{"low", low, lambda}, {"high", high, 1 - lambda}});
    mixture_env xi(mix);
    CHECK(policy_value(xi, guess1, empty, d) == lambda * v_low + (1 - lambda) * v_high);
  }
  CHECK(policy_value(mixture_env(singleton("low", low)), guess1, empty, d) == v_low);
  CHECK(policy_value(mixture_env(singleton("high", high)), guess1, empty, d) == v_high);
}

TEST_CASE("optimal value is convex in the mixture weights") {
  auto low = std::make_shared<bernoulli_prediction_env>(rational(1, 4));
  auto high = std::make_shared<bernoulli_prediction_env>(rational(3, 4));
  history empty;
  for (int d = 1; d <= 3; ++d) {
    rational v_low = expectimax(singleton("low", low), empty, d).value;
    rational v_high = expectimax(singleton("high", high), empty, d).value;
    for (const rational lambda : {rational(1, 4), rational(1, 2), rational(3, 4)}) {
      mixture mix({{"low", low, lambda}, {"high", high, 1 - lambda}});
      rational v_mix = expectimax(mix, empty, d).value;
      CHECK(v_mix <= lambda * v_low + (1 - lambda) * v_high);
    }
  }
  // Strictness at the symmetric point, depth 1: the blend hides which arm is
  // loaded, so the best guess earns 1/2 < (3/4 + 3/4) / 2.
  mixture half = two_point_bernoulli(rational(1, 2));
  CHECK(expectimax(half, empty, 1).value == rational(1, 2));
  CHECK(rational(1, 2) <
        (expectimax(singleton("low", low), empty, 1).value +
         expectimax(singleton("high", high), empty, 1).value) /
            2);
}

TEST_CASE("mixture value decomposes as the posterior-weighted component values") {
  // V*_xi(h) = sum_i posterior_i(h) * V^{pi_xi}_{nu_i}(h) where pi_xi re-plans
  // with the remaining depth at every node.
  mixture mix = pd_model_class();
  history h;
  h.push(0, percept{0, prisoners_dilemma_payoff()[0][0]});  // mutual cooperation
  const int d = 3;

  auto pi_xi = std::function<int(const history&)>([&](const history& hh) {
    int remaining = d - static_cast<int>(hh.cycles() - h.cycles());
    return expectimax(mix, hh, remaining).best_action;
  });

  auto post = mix.posterior(h);
  rational blended(0);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    if (post[i] == 0) continue;
    blended += post[i] * policy_value(*mix.components()[i].env, pi_xi, h, d);
  }
  CHECK(expectimax(mix, h, d).value == blended);
}

TEST_CASE("expectimax_policy plans the chain and beats myopic play") {
  mdp_spec spec = chain_mdp_spec();
  tiny_mdp_env chain(spec);
  const std::size_t lifetime = 20;

  auto aixi = expectimax_policy(chain_mdp_model_class(), 5, lifetime);
  auto myopic = expectimax_policy(chain_mdp_model_class(), 1, lifetime);
  CHECK(aixi->name() == "aixi-d5");
  CHECK(myopic->name() == "myopic");

  episode ea = run_episode(*aixi, chain, lifetime, 1);
  episode em = run_episode(*myopic, chain, lifetime, 1);
  // Deterministic environment: the planner pays one zero-reward "go" and then
  // stays in the good state; the myopic agent never leaves state 0.
  CHECK(ea.total_reward == rational(171, 10));
  CHECK(em.total_reward == rational(2));
  CHECK(ea.total_reward > em.total_reward);

  // Depth shrinks near the end of life: at the last cycle only depth 1 is
  // planned, which still prefers staying in state 1.
  CHECK(ea.h.action(lifetime - 1) == 0);
}

TEST_CASE("run_episode is deterministic and respects seeds") {
  auto rand_pol = random_policy(2);
  auto env = catalog_lookup("bernoulli").make_true_env(7);
  episode a = run_episode(*rand_pol, *env, 50, 42);
  episode b = run_episode(*rand_pol, *env, 50, 42);
  episode c = run_episode(*rand_pol, *env, 50, 43);
  REQUIRE(a.h.cycles() == 50);
  bool same = true, differ = false;
  for (std::size_t k = 0; k < 50; ++k) {
    same = same && a.h.action(k) == b.h.action(k) && a.h.at(k) == b.h.at(k);
    differ = differ || a.h.action(k) != c.h.action(k) || !(a.h.at(k) == c.h.at(k));
  }
  CHECK(same);
  CHECK(differ);
  CHECK(a.total_reward == b.total_reward);
}

TEST_CASE("policy construction validates its arguments") {
  history empty;
  mixture mix = two_point_bernoulli(rational(1, 2));
  CHECK_THROWS_AS(expectimax(mix, empty, 0), config_error);
  CHECK_THROWS_AS(expectimax_policy(mix, 0, 10), config_error);
  CHECK_THROWS_AS(random_policy(0), config_error);
  CHECK(fixed_action_policy(1)->name() == "fixed-1");
  CHECK(random_policy(2)->name() == "random");
}

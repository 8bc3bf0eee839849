#include "aixilab/agent.hpp"

#include <algorithm>
#include <map>
#include <type_traits>
#include <utility>

#include "aixilab/errors.hpp"

namespace aixilab {

mixture_env::mixture_env(mixture mix, std::string name)
    : mix_(std::move(mix)), name_(std::move(name)) {}

std::vector<weighted_percept> mixture_env::percept_distribution(const history& h,
                                                                int action) const {
  return mix_.predict(h, action, /*normalize=*/false);
}

namespace {

template <typename S>
S from_rational(const rational& x) {
  if constexpr (std::is_same_v<S, rational>) {
    return x;
  } else {
    return to_double(x);
  }
}

// Unnormalized planner: node_value returns U(h, d) = mass(h) * V_d(h) where
// lik[i] = w_i * nu_i(h) (up to one common positive factor).  Dividing the
// root action values by sum(lik) recovers posterior-predictive Q-values; the
// common factor cancels in every argmax below the root.
template <typename S>
struct planner {
  const mixture& mix;

  S action_value(history& h, const std::vector<S>& lik, int action, int depth) {
    // Union support with per-component step probabilities.
    std::map<percept, std::vector<std::pair<std::size_t, rational>>> support;
    for (std::size_t i = 0; i < lik.size(); ++i) {
      if (lik[i] == S(0)) continue;
      for (const auto& wp : mix.components()[i].env->percept_distribution(h, action)) {
        support[wp.p].emplace_back(i, wp.prob);
      }
    }
    S total(0);
    std::vector<S> child(lik.size(), S(0));
    for (const auto& [p, contribs] : support) {
      std::fill(child.begin(), child.end(), S(0));
      S mass(0);
      for (const auto& [i, prob] : contribs) {
        child[i] = lik[i] * from_rational<S>(prob);
        mass += child[i];
      }
      if (mass == S(0)) continue;
      total += mass * from_rational<S>(p.reward);
      if (depth > 1) {
        h.push(action, p);
        total += node_value(h, child, depth - 1);
        h.pop();
      }
    }
    return total;
  }

  S node_value(history& h, const std::vector<S>& lik, int depth) {
    S best(0);
    bool first = true;
    for (int a = 0; a < mix.num_actions(); ++a) {
      S q = action_value(h, lik, a, depth);
      if (first || q > best) {
        best = q;
        first = false;
      }
    }
    return best;
  }
};

}  // namespace

value_report expectimax(const mixture& mix, const history& h, int horizon) {
  if (horizon < 1) throw config_error("expectimax horizon must be >= 1");
  std::vector<rational> lik(mix.size());
  rational mass(0);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    lik[i] = mix.components()[i].weight * mix.component_mass(i, h);
    mass += lik[i];
  }
  if (mass == 0) throw zero_mass("expectimax: history has zero mixture mass");

  planner<rational> plan{mix};
  history scratch = h;
  value_report report;
  report.action_values.resize(static_cast<std::size_t>(mix.num_actions()));
  for (int a = 0; a < mix.num_actions(); ++a) {
    report.action_values[static_cast<std::size_t>(a)] =
        plan.action_value(scratch, lik, a, horizon) / mass;
    if (report.action_values[static_cast<std::size_t>(a)] >
        report.action_values[static_cast<std::size_t>(report.best_action)]) {
      report.best_action = a;
    }
  }
  report.value = report.action_values[static_cast<std::size_t>(report.best_action)];
  return report;
}

rational policy_value(const chronological_environment& env,
                      const std::function<int(const history&)>& pol, const history& h,
                      int horizon) {
  if (horizon < 1) throw config_error("policy_value horizon must be >= 1");
  history scratch = h;
  // W(h, d) = sum_p nu(p | h, a(h)) * (r_p + W(h a p, d - 1)), W(., 0) = 0.
  std::function<rational(int)> walk = [&](int depth) -> rational {
    int action = pol(scratch);
    if (action < 0 || action >= env.num_actions()) {
      throw config_error("policy_value: policy returned an out-of-range action");
    }
    rational total(0);
    for (const auto& wp : env.percept_distribution(scratch, action)) {
      if (wp.prob == 0) continue;
      rational branch = wp.prob * wp.p.reward;
      if (depth > 1) {
        scratch.push(action, wp.p);
        branch += wp.prob * walk(depth - 1);
        scratch.pop();
      }
      total += branch;
    }
    return total;
  };
  return walk(horizon);
}

namespace {

class random_policy_impl : public policy {
 public:
  explicit random_policy_impl(int num_actions) : num_actions_(num_actions) {
    if (num_actions < 1) throw config_error("random policy needs >= 1 action");
  }
  std::string name() const override { return "random"; }
  int act(const history&, rng& r) override {
    return static_cast<int>(r.below(static_cast<uint32_t>(num_actions_)));
  }

 private:
  int num_actions_;
};

class fixed_action_impl : public policy {
 public:
  explicit fixed_action_impl(int action) : action_(action) {
    if (action < 0) throw config_error("fixed policy action must be >= 0");
  }
  std::string name() const override { return "fixed-" + std::to_string(action_); }
  int act(const history&, rng&) override { return action_; }

 private:
  int action_;
};

class expectimax_policy_impl : public policy {
 public:
  expectimax_policy_impl(mixture model, int depth_cap, std::size_t lifetime,
                         std::string name)
      : model_(std::move(model)),
        depth_cap_(depth_cap),
        lifetime_(lifetime),
        name_(std::move(name)) {
    if (depth_cap < 1) throw config_error("expectimax policy depth cap must be >= 1");
    if (name_.empty()) {
      name_ = depth_cap_ == 1 ? "myopic" : "aixi-d" + std::to_string(depth_cap_);
    }
    reset();
  }

  std::string name() const override { return name_; }

  void reset() override {
    lik_.assign(model_.size(), 1.0);
    for (std::size_t i = 0; i < model_.size(); ++i) {
      lik_[i] = to_double(model_.components()[i].weight);
    }
    cycles_seen_ = 0;
  }

  int act(const history& h, rng&) override {
    sync(h);
    double total = 0.0;
    for (double v : lik_) total += v;
    if (total <= 0.0) return 0;  // model class exhausted: arbitrary fixed action

    std::size_t remaining = lifetime_ > h.cycles() ? lifetime_ - h.cycles() : 1;
    int depth = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(depth_cap_), remaining));
    planner<double> plan{model_};
    history scratch = h;
    int best = 0;
    double best_q = 0.0;
    for (int a = 0; a < model_.num_actions(); ++a) {
      double q = plan.action_value(scratch, lik_, a, depth);
      if (a == 0 || q > best_q) {
        best = a;
        best_q = q;
      }
    }
    return best;
  }

 private:
  // Advance the cached likelihoods over cycles not yet processed, then rescale
  // so the largest stays at 1 (the planner is invariant to a common factor).
  void sync(const history& h) {
    if (h.cycles() < cycles_seen_) reset();
    history prefix;
    for (std::size_t k = 0; k < h.cycles(); ++k) {
      int a = h.action(k);
      const percept& p = h.at(k);
      if (k >= cycles_seen_) {
        for (std::size_t i = 0; i < model_.size(); ++i) {
          if (lik_[i] <= 0.0) continue;
          rational step(0);
          for (const auto& wp :
               model_.components()[i].env->percept_distribution(prefix, a)) {
            if (wp.p == p) step = wp.prob;
          }
          lik_[i] *= to_double(step);
        }
      }
      prefix.push(a, p);
    }
    cycles_seen_ = h.cycles();
    double top = 0.0;
    for (double v : lik_) top = std::max(top, v);
    if (top > 0.0) {
      for (double& v : lik_) v /= top;
    }
  }

  mixture model_;
  int depth_cap_;
  std::size_t lifetime_;
  std::string name_;
  std::vector<double> lik_;
  std::size_t cycles_seen_ = 0;
};

}  // namespace

policy_ptr random_policy(int num_actions) {
  return std::make_shared<random_policy_impl>(num_actions);
}

policy_ptr fixed_action_policy(int action) {
  return std::make_shared<fixed_action_impl>(action);
}

policy_ptr expectimax_policy(mixture model, int depth_cap, std::size_t lifetime,
                             std::string name) {
  return std::make_shared<expectimax_policy_impl>(std::move(model), depth_cap, lifetime,
                                                  std::move(name));
}

episode run_episode(policy& pol, const chronological_environment& env, std::size_t cycles,
                    uint64_t seed) {
  pol.reset();
  rng r(seed);
  episode ep;
  for (std::size_t k = 0; k < cycles; ++k) {
    int a = pol.act(ep.h, r);
    if (a < 0 || a >= env.num_actions()) {
      throw config_error("run_episode: policy returned an out-of-range action");
    }
    percept p = env.sample(ep.h, a, r);
    ep.h.push(a, p);
  }
  ep.total_reward = ep.h.total_reward();
  return ep;
}

}  // namespace aixilab

#include "aixilab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace aixilab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

}  // namespace

mixture::mixture(std::vector<mixture_component> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw malformed_model("mixture needs at least one component");
  rational total(0);
  for (const auto& c : components_) {
    if (!c.env) throw malformed_model("mixture component '" + c.id + "' has no environment");
    if (c.weight <= 0) throw malformed_model("mixture component '" + c.id + "' has weight <= 0");
    total += c.weight;
  }
  if (total > 1) throw malformed_model("mixture weights sum above 1 (" + rational_str(total) + ")");
  num_actions_ = components_.front().env->num_actions();
  for (const auto& c : components_) {
    if (c.env->num_actions() != num_actions_)
      throw malformed_model("mixture components disagree on the action alphabet");
  }
}

mixture mixture::with_gamma_weights(std::vector<std::pair<std::string, env_ptr>> envs,
                                    bool normalized) {
  auto weights = elias_gamma_weights(envs.size(), normalized);
  std::vector<mixture_component> comps;
  comps.reserve(envs.size());
  for (std::size_t i = 0; i < envs.size(); ++i)
    comps.push_back({std::move(envs[i].first), std::move(envs[i].second), weights[i]});
  return mixture(std::move(comps));
}

rational mixture::component_mass(std::size_t i, const history& h) const {
  const auto& env = *components_[i].env;
  rational mass(1);
  history scratch;
  for (std::size_t k = 0; k < h.cycles() && mass != 0; ++k) {
    rational p(0);
    for (const auto& wp : env.percept_distribution(scratch, h.action(k)))
      if (wp.p == h.at(k)) {
        p = wp.prob;
        break;
      }
    mass *= p;
    scratch.push(h.action(k), h.at(k));
  }
  return mass;
}

rational mixture::mass(const history& h) const {
  rational total(0);
  for (std::size_t i = 0; i < components_.size(); ++i)
    total += components_[i].weight * component_mass(i, h);
  return total;
}

std::vector<rational> mixture::posterior(const history& h) const {
  std::vector<rational> w(components_.size());
  rational total(0);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    w[i] = components_[i].weight * component_mass(i, h);
    total += w[i];
  }
  if (total == 0) throw zero_mass("posterior undefined: the mixture assigns zero mass to this history");
  for (auto& wi : w) wi /= total;
  return w;
}

std::vector<weighted_percept> mixture::predict(const history& h, int action,
                                               bool normalize) const {
  std::vector<rational> joint(components_.size());
  rational h_mass(0);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    joint[i] = components_[i].weight * component_mass(i, h);
    h_mass += joint[i];
  }
  if (h_mass == 0) throw zero_mass("predictive undefined: the mixture assigns zero mass to this history");

  std::map<percept, rational> next;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (joint[i] == 0) continue;
    for (const auto& wp : components_[i].env->percept_distribution(h, action))
      next[wp.p] += joint[i] * wp.prob;
  }

  rational denom = h_mass;
  if (normalize) {
    denom = 0;
    for (const auto& [p, m] : next) denom += m;
    if (denom == 0) throw zero_mass("predictive normalization over an all-zero next-percept mass");
  }

  std::vector<weighted_percept> out;
  out.reserve(next.size());
  for (const auto& [p, m] : next)
    if (m != 0) out.push_back({p, m / denom});
  return out;
}

std::vector<mixture::posterization_row> mixture::posterization(const history& h) const {
  auto post = posterior(h);
  std::vector<std::size_t> order(post.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return post[a] > post[b]; });
  std::vector<posterization_row> rows(post.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    std::size_t i = order[rank];
    unsigned len = elias_gamma_length(rank + 1);
    rows[i] = {components_[i].id, to_double(post[i]), len, std::ldexp(1.0, -static_cast<int>(len))};
  }
  return rows;
}

posterior_tracker::posterior_tracker(const mixture* mix)
    : mix_(mix), log_lik_(mix->size(), 0.0) {}

void posterior_tracker::update(int action, const percept& p) {
  for (std::size_t i = 0; i < mix_->size(); ++i) {
    if (log_lik_[i] == neg_inf) continue;
    rational prob(0);
    for (const auto& wp : mix_->components()[i].env->percept_distribution(h_, action))
      if (wp.p == p) {
        prob = wp.prob;
        break;
      }
    log_lik_[i] = (prob == 0) ? neg_inf : log_lik_[i] + std::log(to_double(prob));
  }
  h_.push(action, p);
  ++cycles_;
}

std::vector<double> posterior_tracker::posterior() const {
  std::vector<double> w(log_lik_.size(), 0.0);
  double max_term = neg_inf;
  for (std::size_t i = 0; i < log_lik_.size(); ++i) {
    if (log_lik_[i] == neg_inf) continue;
    double t = std::log(to_double(mix_->components()[i].weight)) + log_lik_[i];
    w[i] = t;
    max_term = std::max(max_term, t);
  }
  if (max_term == neg_inf) throw zero_mass("posterior tracker: every component is dead");
  double total = 0.0;
  for (std::size_t i = 0; i < log_lik_.size(); ++i) {
    if (log_lik_[i] == neg_inf) continue;
    w[i] = std::exp(w[i] - max_term);
    total += w[i];
  }
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = (log_lik_[i] == neg_inf) ? 0.0 : w[i] / total;
  return w;
}

std::vector<std::pair<percept, double>> posterior_tracker::predict(int action) const {
  auto post = posterior();
  std::map<percept, double> next;
  for (std::size_t i = 0; i < mix_->size(); ++i) {
    if (post[i] == 0.0) continue;
    for (const auto& wp : mix_->components()[i].env->percept_distribution(h_, action))
      next[wp.p] += post[i] * to_double(wp.prob);
  }
  return {next.begin(), next.end()};
}

}  // namespace aixilab

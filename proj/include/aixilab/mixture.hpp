#pragma once

// Bayes mixture xi(h) = sum_nu w_nu nu(h) over an explicit finite model class,
// with exact rational mass/posterior/predictive queries, plus a log-space
// tracker for long runs where exact rationals would grow without bound.

#include <cstdint>
#include <string>
#include <vector>

#include "aixilab/environment.hpp"
#include "aixilab/rational.hpp"

namespace aixilab {

struct mixture_component {
  std::string id;
  env_ptr env;
  rational weight;  // prior w_nu > 0; weights sum to at most 1
};

class mixture {
 public:
  explicit mixture(std::vector<mixture_component> components);

  // Components with normalized (or raw) Elias-gamma code weights 2^-l(gamma(i+1)).
  static mixture with_gamma_weights(std::vector<std::pair<std::string, env_ptr>> envs,
                                    bool normalized = true);

  const std::vector<mixture_component>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  int num_actions() const { return num_actions_; }

  // nu(h): product over cycles of the component's percept probability.
  rational component_mass(std::size_t i, const history& h) const;

  // xi(h) = sum_i w_i nu_i(h).
  rational mass(const history& h) const;

  // Posterior weights w_i nu_i(h) / xi(h); throws zero_mass when xi(h) = 0.
  std::vector<rational> posterior(const history& h) const;

  // Predictive law of the next percept after (h, action).  Unnormalized form
  // returns xi(h a p) / xi(h) over the support (a semimeasure in general);
  // normalized divides by the total next-percept mass instead.  Throws
  // zero_mass when the conditioning mass vanishes.  Percepts are in canonical
  // (obs, reward) order.
  std::vector<weighted_percept> predict(const history& h, int action,
                                        bool normalize = false) const;

  // Posterization log: for each component, the posterior weight alongside a
  // complexity surrogate (Elias-gamma code length of its posterior rank, rank
  // 1 = largest posterior, ties by component index).  2^-surrogate is a
  // code-based stand-in for the ideal posterior-complexity weight; the two
  // columns are reported side by side, never equated.
  struct posterization_row {
    std::string id;
    double posterior_weight;
    unsigned surrogate_code_length;
    double surrogate_weight;  // 2^-surrogate_code_length
  };
  std::vector<posterization_row> posterization(const history& h) const;

 private:
  std::vector<mixture_component> components_;
  int num_actions_ = 0;
};

// Incremental posterior over a mixture's components in log space (doubles),
// for horizon-10^4 runs.  Components that assign zero probability to an
// observed percept are dead (log-likelihood -inf) and stay dead.
class posterior_tracker {
 public:
  explicit posterior_tracker(const mixture* mix);

  void update(int action, const percept& p);

  std::size_t cycles() const { return cycles_; }
  const std::vector<double>& log_likelihood() const { return log_lik_; }
  std::vector<double> posterior() const;

  // Predictive probabilities of the next percept (normalized over the live
  // support); deterministic percept order.
  std::vector<std::pair<percept, double>> predict(int action) const;

 private:
  const mixture* mix_;
  history h_;
  std::vector<double> log_lik_;
  std::size_t cycles_ = 0;
};

}  // namespace aixilab

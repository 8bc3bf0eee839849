#pragma once

// Desk-scale intelligence order relation: score a policy by the weighted sum
// of its expected total reward across the environment catalog,
// Upsilon(pi) = sum_nu w_nu V_nu^pi, and order policies by the estimate.
// Sampling noise must not fabricate strict order, so order() reports pairs
// whose gap is within one combined standard error as incomparable at this
// sample size instead of force-breaking the tie.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aixilab/agent.hpp"
#include "aixilab/environments.hpp"

namespace aixilab {

struct episode_spec {
  std::size_t cycles = 100;      // lifetime m
  std::uint64_t base_seed = 1000;
};

struct ior_suite {
  std::vector<std::string> env_names;  // catalog entries
  std::vector<rational> weights;       // positive, sum <= 1
  episode_spec spec;
  std::size_t num_seeds = 30;

  // Canonical single-line JSON (sorted keys) naming entries, weights, seeds,
  // and the episode spec; hash = FNV-1a 64 of that string.
  std::string manifest_json() const;
  std::uint64_t manifest_hash() const;
};

// The default 4-entry suite over the whole catalog with the raw Elias-gamma
// surrogate prior by catalog index: weights 1/2, 1/8, 1/8, 1/32.
ior_suite default_ior_suite();

struct env_score {
  std::string env_name;
  rational weight;
  double mean_value = 0.0;  // mean episode total reward over seeds
  double std_err = 0.0;
};

struct ior_score {
  std::string policy_id;
  std::vector<env_score> per_env;
  double upsilon = 0.0;     // sum_nu w_nu * mean_value_nu (exactly this sum)
  double upsilon_se = 0.0;  // from the per-seed weighted totals
  std::vector<double> per_seed_totals;
  std::string suite_manifest;  // order() refuses to mix different manifests
};

// Builds a fresh policy for one catalog entry (AIxi-style policies need the
// entry's model class and the lifetime).
using policy_factory = std::function<policy_ptr(const catalog_entry&, const episode_spec&)>;

policy_factory aixi_policy_factory(int depth_cap = 5);
policy_factory myopic_policy_factory();
policy_factory random_policy_factory();
// "aixi" | "aixi-d<k>" | "myopic" | "random"; throws config_error otherwise.
policy_factory named_policy_factory(const std::string& kind);

// Runs num_seeds episodes per suite entry (seed streams derived from
// base_seed, environment index, and seed index) and aggregates.  Requires
// valid weights and >= 30 seeds; throws config_error otherwise.  Suite names
// resolve against `catalog` (the global environment catalog by default, which
// lets tests extend the suite with synthetic entries).
ior_score intelligence_score(const std::string& policy_id, const policy_factory& factory,
                             const ior_suite& suite,
                             const std::vector<catalog_entry>& catalog = environment_catalog());

struct ranking_entry {
  std::string policy_id;
  double upsilon = 0.0;
  int rank = 0;                     // 1-based, descending upsilon
  double gap_to_next = 0.0;         // this upsilon minus the next one (0 for last)
  double combined_se_to_next = 0.0;
  bool incomparable_with_next = false;  // gap within 1 combined standard error
};

// Descending by upsilon; throws suite_mismatch unless all scores carry the
// identical suite manifest.
std::vector<ranking_entry> order(const std::vector<ior_score>& scores);

}  // namespace aixilab

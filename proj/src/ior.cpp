#include "aixilab/ior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "aixilab/errors.hpp"
#include "aixilab/hashing.hpp"

namespace aixilab {

std::string ior_suite::manifest_json() const {
  nlohmann::json j;
  j["entries"] = env_names;
  std::vector<std::string> w;
  for (const auto& wi : weights) w.push_back(rational_str(wi));
  j["weights"] = w;
  j["cycles"] = spec.cycles;
  j["base_seed"] = spec.base_seed;
  j["num_seeds"] = num_seeds;
  return j.dump();
}

std::uint64_t ior_suite::manifest_hash() const { return fnv1a64(manifest_json()); }

ior_suite default_ior_suite() {
  ior_suite suite;
  for (const auto& entry : environment_catalog()) suite.env_names.push_back(entry.name);
  suite.weights = elias_gamma_weights(suite.env_names.size(), /*normalized=*/false);
  return suite;
}

policy_factory aixi_policy_factory(int depth_cap) {
  if (depth_cap < 1) throw config_error("aixi depth cap must be >= 1");
  return [depth_cap](const catalog_entry& entry, const episode_spec& spec) {
    return expectimax_policy(entry.make_model_class(), depth_cap, spec.cycles,
                             depth_cap == 1 ? "myopic" : "aixi");
  };
}

policy_factory myopic_policy_factory() { return aixi_policy_factory(1); }

policy_factory random_policy_factory() {
  return [](const catalog_entry& entry, const episode_spec&) {
    return random_policy(entry.num_actions);
  };
}

policy_factory named_policy_factory(const std::string& kind) {
  if (kind == "aixi") return aixi_policy_factory(5);
  if (kind == "myopic") return myopic_policy_factory();
  if (kind == "random") return random_policy_factory();
  if (kind.rfind("aixi-d", 0) == 0) {
    try {
      int depth = std::stoi(kind.substr(6));
      return aixi_policy_factory(depth);
    } catch (const std::exception&) {
    }
  }
  throw config_error("unknown policy kind '" + kind +
                     "' (expected aixi, aixi-d<k>, myopic, or random)");
}

namespace {

struct mean_se {
  double mean = 0.0;
  double std_err = 0.0;
};

mean_se summarize(const std::vector<double>& xs) {
  mean_se out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std_err = std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
                  std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

void validate_suite(const ior_suite& suite) {
  if (suite.env_names.empty()) throw config_error("ior suite has no environments");
  if (suite.weights.size() != suite.env_names.size()) {
    throw config_error("ior suite needs one weight per environment");
  }
  rational total(0);
  for (const auto& w : suite.weights) {
    if (w <= 0) throw config_error("ior suite weights must be positive");
    total += w;
  }
  if (total > 1) throw config_error("ior suite weights must sum to at most 1");
  if (suite.num_seeds < 30) throw config_error("ior scoring needs >= 30 seeds");
  if (suite.spec.cycles == 0) throw config_error("ior episodes need >= 1 cycle");
}

}  // namespace

ior_score intelligence_score(const std::string& policy_id, const policy_factory& factory,
                             const ior_suite& suite,
                             const std::vector<catalog_entry>& catalog) {
  validate_suite(suite);
  ior_score score;
  score.policy_id = policy_id;
  score.suite_manifest = suite.manifest_json();
  score.per_seed_totals.assign(suite.num_seeds, 0.0);

  auto lookup = [&catalog](const std::string& name) -> const catalog_entry& {
    for (const auto& entry : catalog) {
      if (entry.name == name) return entry;
    }
    throw malformed_model("ior suite references unknown environment '" + name + "'");
  };

  for (std::size_t e = 0; e < suite.env_names.size(); ++e) {
    const catalog_entry& entry = lookup(suite.env_names[e]);
    policy_ptr pol = factory(entry, suite.spec);
    std::vector<double> totals;
    totals.reserve(suite.num_seeds);
    const uint64_t env_stream = derive_seed(suite.spec.base_seed, e);
    for (std::size_t j = 0; j < suite.num_seeds; ++j) {
      uint64_t seed = derive_seed(env_stream, j);
      env_ptr env = entry.make_true_env(seed);
      episode ep = run_episode(*pol, *env, suite.spec.cycles, seed);
      double total = to_double(ep.total_reward);
      totals.push_back(total);
      score.per_seed_totals[j] += to_double(suite.weights[e]) * total;
    }
    mean_se stats = summarize(totals);
    score.per_env.push_back(
        {suite.env_names[e], suite.weights[e], stats.mean, stats.std_err});
  }

  // The reported Upsilon is exactly the weighted sum of the recorded means.
  for (const auto& es : score.per_env) {
    score.upsilon += to_double(es.weight) * es.mean_value;
  }
  score.upsilon_se = summarize(score.per_seed_totals).std_err;
  return score;
}

std::vector<ranking_entry> order(const std::vector<ior_score>& scores) {
  if (scores.empty()) return {};
  for (const auto& s : scores) {
    if (s.suite_manifest != scores.front().suite_manifest) {
      throw suite_mismatch("cannot order scores computed on different suites");
    }
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a].upsilon > scores[b].upsilon;
  });

  std::vector<ranking_entry> ranking;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const ior_score& s = scores[idx[r]];
    ranking_entry entry;
    entry.policy_id = s.policy_id;
    entry.upsilon = s.upsilon;
    entry.rank = static_cast<int>(r) + 1;
    if (r + 1 < idx.size()) {
      const ior_score& next = scores[idx[r + 1]];
      entry.gap_to_next = s.upsilon - next.upsilon;
      entry.combined_se_to_next =
          std::sqrt(s.upsilon_se * s.upsilon_se + next.upsilon_se * next.upsilon_se);
      entry.incomparable_with_next = entry.gap_to_next <= entry.combined_se_to_next;
    }
    ranking.push_back(entry);
  }
  return ranking;
}

}  // namespace aixilab

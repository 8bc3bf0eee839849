#include "aixilab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <utility>

#include <json.hpp>

#include "aixilab/agent.hpp"
#include "aixilab/environments.hpp"
#include "aixilab/errors.hpp"
#include "aixilab/hashing.hpp"
#include "aixilab/machine.hpp"
#include "aixilab/program_env.hpp"
#include "aixilab/rng.hpp"
#include "aixilab/solomonoff.hpp"
#include "aixilab/stream_predictor.hpp"

namespace aixilab {

std::string experiment_manifest::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["params"] = params;
  j["version"] = version;
  return j.dump();
}

std::uint64_t experiment_manifest::hash() const { return fnv1a64(to_json()); }

experiment_manifest experiment_manifest::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw config_error(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("experiment") || !j["experiment"].is_string()) {
    throw config_error("manifest field 'experiment' must be a string");
  }
  experiment_manifest m;
  m.experiment = j["experiment"].get<std::string>();
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw config_error("manifest field 'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      if (!v.is_string())
        throw config_error("manifest parameter '" + k + "' must be a string");
      m.params[k] = v.get<std::string>();
    }
  }
  if (j.contains("version")) {
    if (!j["version"].is_string()) throw config_error("manifest field 'version' must be a string");
    m.version = j["version"].get<std::string>();
  }
  return m;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("short write to '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

namespace {

// Validated access to manifest parameters: every key must be known, every
// known key read exactly once; leftovers are reported by field name.
class param_reader {
 public:
  explicit param_reader(const experiment_manifest& m) : m_(m) {}

  std::string get(const std::string& key) {
    auto it = m_.params.find(key);
    if (it == m_.params.end())
      throw config_error("experiment '" + m_.experiment + "' is missing parameter '" + key + "'");
    seen_.insert(key);
    return it->second;
  }

  uint64_t get_u64(const std::string& key) {
    const std::string v = get(key);
    try {
      std::size_t pos = 0;
      unsigned long long parsed = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return parsed;
    } catch (const std::exception&) {
      throw config_error("parameter '" + key + "' must be a nonnegative integer, got '" + v + "'");
    }
  }

  rational get_rational(const std::string& key) {
    const std::string v = get(key);
    try {
      return parse_rational(v);
    } catch (const std::exception&) {
      throw config_error("parameter '" + key + "' must be a rational like 3/4, got '" + v + "'");
    }
  }

  void finish() const {
    for (const auto& [k, v] : m_.params) {
      (void)v;
      if (!seen_.count(k))
        throw config_error("experiment '" + m_.experiment + "' does not accept parameter '" + k + "'");
    }
  }

 private:
  const experiment_manifest& m_;
  std::set<std::string> seen_;
};

std::string csv_header(const experiment_manifest& m,
                       const std::map<std::string, double>& summary,
                       const std::string& columns) {
  std::string out;
  out += "# experiment: " + m.experiment + "\n";
  out += "# manifest: " + m.to_json() + "\n";
  char hash_buf[20];
  std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                static_cast<unsigned long long>(m.hash()));
  out += "# manifest_hash: " + std::string(hash_buf) + "\n";
  out += "# summary:";
  for (const auto& [k, v] : summary) out += " " + k + "=" + fmt_double(v);
  out += "\n";
  out += columns + "\n";
  return out;
}

struct mean_se {
  double mean = 0.0;
  double se = 0.0;
};

mean_se summarize(const std::vector<double>& xs) {
  mean_se out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
             std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

uint8_t draw_bernoulli(rng& r, const rational& theta) {
  rational u(bigint(r.next_u64() >> 1), bigint(1) << 63);
  return u < theta ? 1 : 0;
}

// --- convergence --------------------------------------------------------------

experiment_result run_convergence(const experiment_manifest& manifest) {
  param_reader p(manifest);
  const std::string class_kind = p.get("class");
  const rational theta = p.get_rational("true_theta");
  const std::size_t n = static_cast<std::size_t>(p.get_u64("n"));
  const std::size_t seeds = static_cast<std::size_t>(p.get_u64("seeds"));
  const uint64_t base_seed = p.get_u64("base_seed");
  p.finish();
  if (n == 0 || seeds == 0) throw config_error("convergence needs n >= 1 and seeds >= 1");

  std::vector<rational> grid;
  if (class_kind == "bernoulli-grid-9") {
    grid = bernoulli_grid();
  } else if (class_kind == "two-point") {
    grid = {rational(1, 2), rational(1)};
  } else if (class_kind == "singleton") {
    grid = {theta};
  } else {
    throw config_error("parameter 'class' must be bernoulli-grid-9, two-point, or singleton");
  }
  if (std::find(grid.begin(), grid.end(), theta) == grid.end()) {
    throw config_error("true_theta " + rational_str(theta) + " is not a member of class '" +
                       class_kind + "'");
  }

  const mixture mix = bernoulli_model_class(grid);
  const double bound = std::log(static_cast<double>(grid.size()));  // ln(1/w_mu), uniform prior
  const double theta_d = to_double(theta);
  const bernoulli_prediction_env true_env(theta);
  const history empty;

  std::vector<double> step_sum(n, 0.0), cum_sum(n, 0.0), final_cum;
  for (std::size_t j = 0; j < seeds; ++j) {
    rng r(derive_seed(base_seed, j));
    posterior_tracker tracker(&mix);
    double cum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double p1 = 0.0;
      for (const auto& [percept_val, prob] : tracker.predict(0)) {
        if (percept_val.obs == 1) p1 += prob;
      }
      // Full next-symbol squared distance: (p1-theta)^2 + (p0-(1-theta))^2.
      double sq = 2.0 * (p1 - theta_d) * (p1 - theta_d);
      cum += sq;
      step_sum[t] += sq;
      cum_sum[t] += cum;
      percept obs = true_env.sample(empty, 0, r);
      tracker.update(0, obs);
    }
    final_cum.push_back(cum);
  }

  mean_se final_stats = summarize(final_cum);
  experiment_result result;
  result.manifest = manifest;
  result.summary = {{"final_mean_cum_sq_error", final_stats.mean},
                    {"final_se", final_stats.se},
                    {"bound_ln_inv_w", bound},
                    {"n", static_cast<double>(n)},
                    {"seeds", static_cast<double>(seeds)}};
  result.csv = csv_header(manifest, result.summary, "t,mean_step_sq_error,mean_cum_sq_error");
  for (std::size_t t = 0; t < n; ++t) {
    result.csv += std::to_string(t + 1) + "," +
                  fmt_double(step_sum[t] / static_cast<double>(seeds)) + "," +
                  fmt_double(cum_sum[t] / static_cast<double>(seeds)) + "\n";
  }
  return result;
}

// --- selected bits --------------------------------------------------------------

// The budgets must admit the copy program: its 24 bits fit under L and each
// cycle's work fits in T machine steps.  Probed two ways: a direct run of the
// canonical copy program under the predictor's per-cycle budget rule, and a
// complexity_upper enumeration probe on the doubled-bit signature "0011".
void verify_copy_budget(unsigned L, uint64_t T) {
  bit_string copy = copy_pattern_program();
  if (copy.size() > L) {
    throw budget_too_small("max_program_bits " + std::to_string(L) + " is below the " +
                           std::to_string(copy.size()) + "-bit copy program");
  }
  machine_state m(T, uint64_t(1) << 62);
  using kind = machine_state::event::kind;
  uint64_t emits = 0;
  while (emits < 4) {  // two full copy cycles: coin, echo, coin, echo
    auto ev = m.advance();
    switch (ev.k) {
      case kind::need_program_bit:
        if (m.consumed() < copy.size()) {
          m.feed_program_bit(copy[static_cast<std::size_t>(m.consumed())]);
        } else {
          throw budget_too_small("copy program ran past its own code");
        }
        break;
      case kind::need_input_bit:
        m.feed_input_bit(1);
        break;
      case kind::emitted:
        ++emits;
        m.set_step_limit(m.steps() + T);
        break;
      case kind::budget_paused:
        throw budget_too_small("step budget " + std::to_string(T) +
                               " per cycle cannot run the copy program");
      case kind::stopped:
        throw budget_too_small("the copy program halted unexpectedly under these budgets");
    }
  }
  // The shortest 0011-emitter needs 15 bits, so capping the probe at the
  // explicit-enumeration limit keeps it meaningful for any L >= 15; the
  // 24-bit copy program itself was just run directly above.
  approximation_params probe{std::min(L, 18u), 4 * T};
  if (!complexity_upper(bit_string::parse("0011"), probe).has_value()) {
    throw budget_too_small("enumeration probe: no program emits the doubled-bit pattern "
                           "0011 within (L, 4T)");
  }
}

experiment_result run_selected_bits(const experiment_manifest& manifest) {
  param_reader p(manifest);
  const unsigned L = static_cast<unsigned>(p.get_u64("L"));
  const uint64_t T = p.get_u64("T");
  const std::size_t n = static_cast<std::size_t>(p.get_u64("n"));
  const std::size_t seeds = static_cast<std::size_t>(p.get_u64("seeds"));
  const uint64_t base_seed = p.get_u64("base_seed");
  const std::size_t window = static_cast<std::size_t>(p.get_u64("window"));
  const std::size_t max_states = static_cast<std::size_t>(p.get_u64("max_states"));
  const unsigned spread = static_cast<unsigned>(p.get_u64("spread"));
  p.finish();
  if (n == 0 || seeds == 0) throw config_error("selected-bits needs n >= 1 and seeds >= 1");
  if (window == 0 || window > n) throw config_error("window must lie in [1, n]");
  verify_copy_budget(L, T);

  stream_predictor_params sp_params;
  sp_params.max_program_bits = L;
  sp_params.step_budget_per_cycle = T;
  sp_params.max_states = max_states;
  sp_params.max_exponent_spread = spread;

  std::vector<double> even_rate_sum(n, 0.0), odd_rate_sum(n, 0.0);
  std::vector<double> even_window, odd_window;
  for (std::size_t j = 0; j < seeds; ++j) {
    selected_bits_env env(derive_seed(base_seed, j));
    stream_predictor sp(sp_params);
    std::size_t even_errs = 0, even_count = 0, odd_errs = 0, odd_count = 0;
    std::size_t w_even_errs = 0, w_even_count = 0, w_odd_errs = 0, w_odd_count = 0;
    int prev_bit = 0;
    for (std::size_t t = 1; t <= n; ++t) {
      const bool odd = (t % 2) != 0;
      const int bit = odd ? env.source_bit(t) : prev_bit;
      prev_bit = bit;
      const auto& pred = sp.predict();
      const bool err = pred.argmax != bit;
      if (odd) {
        ++odd_count;
        odd_errs += err;
        if (t > n - window) {
          ++w_odd_count;
          w_odd_errs += err;
        }
      } else {
        ++even_count;
        even_errs += err;
        if (t > n - window) {
          ++w_even_count;
          w_even_errs += err;
        }
      }
      even_rate_sum[t - 1] +=
          even_count ? static_cast<double>(even_errs) / static_cast<double>(even_count) : 0.0;
      odd_rate_sum[t - 1] +=
          odd_count ? static_cast<double>(odd_errs) / static_cast<double>(odd_count) : 0.0;
      sp.observe(static_cast<uint8_t>(bit));
    }
    even_window.push_back(w_even_count ? static_cast<double>(w_even_errs) /
                                             static_cast<double>(w_even_count)
                                       : 0.0);
    odd_window.push_back(w_odd_count ? static_cast<double>(w_odd_errs) /
                                           static_cast<double>(w_odd_count)
                                     : 0.0);
  }

  mean_se even_stats = summarize(even_window);
  mean_se odd_stats = summarize(odd_window);
  experiment_result result;
  result.manifest = manifest;
  result.summary = {{"even_error_last_window", even_stats.mean},
                    {"even_se", even_stats.se},
                    {"odd_error_last_window", odd_stats.mean},
                    {"odd_se", odd_stats.se},
                    {"n", static_cast<double>(n)},
                    {"seeds", static_cast<double>(seeds)},
                    {"window", static_cast<double>(window)}};
  result.csv =
      csv_header(manifest, result.summary, "t,mean_even_running_error,mean_odd_running_error");
  for (std::size_t t = 0; t < n; ++t) {
    result.csv += std::to_string(t + 1) + "," +
                  fmt_double(even_rate_sum[t] / static_cast<double>(seeds)) + "," +
                  fmt_double(odd_rate_sum[t] / static_cast<double>(seeds)) + "\n";
  }
  return result;
}

// --- self-play -----------------------------------------------------------------

experiment_result run_selfplay(const experiment_manifest& manifest) {
  param_reader p(manifest);
  const std::string game = p.get("game");
  const std::size_t m = static_cast<std::size_t>(p.get_u64("m"));
  const int depth = static_cast<int>(p.get_u64("depth"));
  const std::string opponent = p.get("opponent");
  const std::size_t seeds = static_cast<std::size_t>(p.get_u64("seeds"));
  const uint64_t base_seed = p.get_u64("base_seed");
  p.finish();
  if (game != "pd") throw config_error("parameter 'game' must be pd");
  if (opponent != "self" && opponent != "always-defect") {
    throw config_error("parameter 'opponent' must be self or always-defect");
  }
  if (m == 0 || depth < 1 || seeds == 0) {
    throw config_error("selfplay needs m >= 1, depth >= 1, seeds >= 1");
  }

  const auto payoff = prisoners_dilemma_payoff();
  std::vector<double> totals_a, totals_b;
  std::string rows;
  for (std::size_t s = 0; s < seeds; ++s) {
    rng r(derive_seed(base_seed, s));
    auto pol_a = expectimax_policy(pd_model_class(), depth, m, "agent-a");
    policy_ptr pol_b;
    if (opponent == "self") pol_b = expectimax_policy(pd_model_class(), depth, m, "agent-b");
    history ha, hb;
    double cum_a = 0.0, cum_b = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      int a = pol_a->act(ha, r);
      int b = pol_b ? pol_b->act(hb, r) : 1;
      percept pa{b, payoff[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]};
      percept pb{a, payoff[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]};
      ha.push(a, pa);
      hb.push(b, pb);
      cum_a += to_double(pa.reward);
      cum_b += to_double(pb.reward);
      rows += std::to_string(s) + "," + std::to_string(k + 1) + "," + std::to_string(a) +
              "," + std::to_string(b) + "," + fmt_double(to_double(pa.reward)) + "," +
              fmt_double(to_double(pb.reward)) + "," + fmt_double(cum_a) + "," +
              fmt_double(cum_b) + "\n";
    }
    totals_a.push_back(cum_a);
    totals_b.push_back(cum_b);
  }

  mean_se stats_a = summarize(totals_a);
  mean_se stats_b = summarize(totals_b);
  experiment_result result;
  result.manifest = manifest;
  result.summary = {{"value_a", stats_a.mean},
                    {"value_b", stats_b.mean},
                    {"m", static_cast<double>(m)},
                    {"depth", static_cast<double>(depth)},
                    {"seeds", static_cast<double>(seeds)}};
  result.csv = csv_header(manifest, result.summary,
                          "seed,cycle,action_a,action_b,reward_a,reward_b,cum_a,cum_b");
  result.csv += rows;
  return result;
}

// --- prediction gap --------------------------------------------------------------

experiment_result run_prediction_gap(const experiment_manifest& manifest) {
  param_reader p(manifest);
  const std::string source = p.get("source");
  const unsigned L = static_cast<unsigned>(p.get_u64("L"));
  const uint64_t T = p.get_u64("T");
  const unsigned class_bits = static_cast<unsigned>(p.get_u64("class_bits"));
  const std::size_t n = static_cast<std::size_t>(p.get_u64("n"));
  const std::size_t seeds = static_cast<std::size_t>(p.get_u64("seeds"));
  const uint64_t base_seed = p.get_u64("base_seed");
  const std::size_t max_states = static_cast<std::size_t>(p.get_u64("max_states"));
  const unsigned spread = static_cast<unsigned>(p.get_u64("spread"));
  p.finish();
  if (n == 0 || seeds == 0) throw config_error("prediction-gap needs n >= 1 and seeds >= 1");

  bool const_source = false;
  rational theta(0);
  if (source == "const1") {
    const_source = true;
  } else if (source.rfind("bernoulli:", 0) == 0) {
    theta = parse_rational(source.substr(10));
    if (theta < 0 || theta > 1) throw config_error("bernoulli source needs theta in [0, 1]");
  } else {
    throw config_error("parameter 'source' must be const1 or bernoulli:<theta>");
  }

  stream_predictor_params sp_params;
  sp_params.max_program_bits = L;
  sp_params.step_budget_per_cycle = T;
  sp_params.max_states = max_states;
  sp_params.max_exponent_spread = spread;

  program_class_params pc;
  pc.max_program_bits = class_bits;
  pc.cycles = 2;
  pc.exec.step_budget_per_cycle = T;
  const mixture model = obs_program_class(pc);

  std::vector<double> mean_a, mean_b;
  std::string rows;
  for (std::size_t s = 0; s < seeds; ++s) {
    rng r(derive_seed(base_seed, s));
    stream_predictor sp(sp_params);
    posterior_tracker tracker(&model);
    bool model_alive = true;
    int last_action = 0;
    std::size_t hits_a = 0, hits_b = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const int guess_a = sp.predict().argmax;

      int action_b = last_action;
      if (model_alive) {
        try {
          // One-step expectimax over the tracked posterior: Q(a) is the
          // posterior-predictive probability that the next bit equals a.
          double q[2] = {0.0, 0.0};
          for (int a = 0; a < 2; ++a) {
            for (const auto& [pc_val, prob] : tracker.predict(a)) {
              q[a] += prob * to_double(pc_val.reward);
            }
          }
          action_b = q[1] > q[0] ? 1 : 0;
        } catch (const zero_mass&) {
          // Class exhausted: no posterior exists; persist the latest action.
          model_alive = false;
        }
      }

      const int obs = const_source ? 1 : draw_bernoulli(r, theta);
      hits_a += guess_a == obs;
      hits_b += action_b == obs;
      sp.observe(static_cast<uint8_t>(obs));
      if (model_alive) {
        tracker.update(action_b, percept{obs, rational(action_b == obs ? 1 : 0)});
      }
      last_action = action_b;
    }
    double ra = static_cast<double>(hits_a) / static_cast<double>(n);
    double rb = static_cast<double>(hits_b) / static_cast<double>(n);
    mean_a.push_back(ra);
    mean_b.push_back(rb);
    rows += std::to_string(s) + "," + fmt_double(ra) + "," + fmt_double(rb) + "\n";
  }

  mean_se stats_a = summarize(mean_a);
  mean_se stats_b = summarize(mean_b);
  experiment_result result;
  result.manifest = manifest;
  result.summary = {{"mean_reward_solomonoff", stats_a.mean},
                    {"se_solomonoff", stats_a.se},
                    {"mean_reward_aixi", stats_b.mean},
                    {"se_aixi", stats_b.se},
                    {"gap", stats_a.mean - stats_b.mean},
                    {"combined_se", std::sqrt(stats_a.se * stats_a.se + stats_b.se * stats_b.se)},
                    {"class_size", static_cast<double>(model.size())}};
  result.csv = csv_header(manifest, result.summary,
                          "seed,mean_reward_solomonoff,mean_reward_aixi");
  result.csv += rows;
  return result;
}

}  // namespace

const std::vector<experiment_info>& experiment_registry() {
  static const std::vector<experiment_info> registry = [] {
    std::vector<experiment_info> reg;
    reg.push_back({"convergence",
                   "mixture predictive error against the ln(1/w) bound on Bernoulli data",
                   {"convergence",
                    {{"class", "bernoulli-grid-9"},
                     {"true_theta", "3/4"},
                     {"n", "10000"},
                     {"seeds", "100"},
                     {"base_seed", "1"}},
                    "aixilab-1"}});
    reg.push_back({"selected-bits",
                   "program-class predictor on the even-bits copy pattern",
                   {"selected-bits",
                    {{"L", "24"},
                     {"T", "16"},
                     {"n", "1000"},
                     {"seeds", "30"},
                     {"base_seed", "1"},
                     {"window", "100"},
                     {"max_states", "65536"},
                     {"spread", "48"}},
                    "aixilab-1"}});
    reg.push_back({"selfplay",
                   "two bounded planners in the iterated prisoner's dilemma",
                   {"selfplay",
                    {{"game", "pd"},
                     {"m", "30"},
                     {"depth", "3"},
                     {"opponent", "self"},
                     {"seeds", "1"},
                     {"base_seed", "1"}},
                    "aixilab-1"}});
    reg.push_back({"prediction-gap",
                   "greedy Solomonoff predictor vs one-step planner over a program class",
                   {"prediction-gap",
                    {{"source", "const1"},
                     {"L", "21"},
                     {"T", "16"},
                     {"class_bits", "15"},
                     {"n", "150"},
                     {"seeds", "15"},
                     {"base_seed", "1"},
                     {"max_states", "65536"},
                     {"spread", "48"}},
                    "aixilab-1"}});
    return reg;
  }();
  return registry;
}

const experiment_info& experiment_lookup(const std::string& name) {
  for (const auto& info : experiment_registry()) {
    if (info.name == name) return info;
  }
  std::string names;
  for (const auto& info : experiment_registry()) {
    if (!names.empty()) names += ", ";
    names += info.name;
  }
  throw config_error("unknown experiment '" + name + "' (available: " + names + ")");
}

experiment_manifest with_overrides(const experiment_manifest& base,
                                   const std::vector<std::string>& overrides) {
  experiment_manifest m = base;
  for (const auto& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw config_error("override '" + kv + "' must look like key=value");
    }
    const std::string key = kv.substr(0, eq);
    if (!m.params.count(key)) {
      throw config_error("experiment '" + m.experiment + "' does not accept parameter '" +
                         key + "'");
    }
    m.params[key] = kv.substr(eq + 1);
  }
  return m;
}

experiment_result run_experiment(const experiment_manifest& manifest) {
  if (manifest.experiment == "convergence") return run_convergence(manifest);
  if (manifest.experiment == "selected-bits") return run_selected_bits(manifest);
  if (manifest.experiment == "selfplay") return run_selfplay(manifest);
  if (manifest.experiment == "prediction-gap") return run_prediction_gap(manifest);
  experiment_lookup(manifest.experiment);  // throws with the available names
  throw config_error("experiment '" + manifest.experiment + "' has no runner");
}

}  // namespace aixilab

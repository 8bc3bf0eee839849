// Command-line entry point: enumeration, prediction, episodes, IOR scoring,
// and manifest-driven experiments.  Every run is deterministic: identical
// argv (plus config file) produces identical output bytes, and output files
// are written atomically so failed runs leave nothing behind.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aixilab/agent.hpp"
#include "aixilab/environments.hpp"
#include "aixilab/errors.hpp"
#include "aixilab/experiments.hpp"
#include "aixilab/ior.hpp"
#include "aixilab/machine.hpp"
#include "aixilab/rng.hpp"
#include "aixilab/solomonoff.hpp"

namespace {

using namespace aixilab;

// Writes to the path atomically, or to stdout when no path was given.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_file_atomic(out_path, content);
    std::cout << "wrote " << out_path << " (" << content.size() << " bytes)\n";
  }
}

// Accepts "3/4", "0.75", and "1" style numbers as exact rationals.
rational parse_theta(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return parse_rational(text);
  const std::string whole = text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
      (!whole.empty() && whole.find_first_not_of("0123456789") != std::string::npos)) {
    throw config_error("env: cannot parse number '" + text + "'");
  }
  bigint den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  bigint num = bigint(whole.empty() ? "0" : whole) * den + bigint(frac);
  return rational(num, den);
}

// An --env selector is a catalog name, or "bernoulli:<theta>" for a custom
// Bernoulli parameter.
catalog_entry resolve_env(const std::string& selector) {
  if (selector.rfind("bernoulli:", 0) == 0) {
    rational theta = parse_theta(selector.substr(10));
    if (theta < 0 || theta > 1) {
      throw config_error("env: bernoulli parameter must lie in [0, 1], got '" +
                         selector.substr(10) + "'");
    }
    return catalog_entry{
        selector,
        "iid Bernoulli(" + rational_str(theta) + ") observation, reward 1 for a correct guess",
        2,
        [theta](std::uint64_t) -> env_ptr {
          return std::make_shared<bernoulli_prediction_env>(theta);
        },
        [] { return bernoulli_model_class(bernoulli_grid()); }};
  }
  return catalog_lookup(selector);
}

bit_string parse_bits(const std::string& text, const std::string& field) {
  try {
    return bit_string::parse(text);
  } catch (const std::exception&) {
    throw config_error(field + ": expected a 0/1 string, got '" + text + "'");
  }
}

// --- enumerate -----------------------------------------------------------------

struct enumerate_opts {
  std::vector<std::string> xs;
  unsigned L = 10;
  std::uint64_t T = 256;
  bool k_upper = false;
  std::string out;
};

void run_enumerate(const enumerate_opts& o) {
  approximation_params params{o.L, o.T};
  nlohmann::json records = nlohmann::json::array();
  for (const auto& text : o.xs) {
    bit_string x = parse_bits(text, "--x");
    rational mass = lower_m(x, params);
    nlohmann::json rec;
    rec["x"] = text;
    rec["L"] = o.L;
    rec["T"] = o.T;
    rec["mass"] = rational_str(mass);
    rec["mass_double"] = to_double(mass);
    if (o.k_upper) {
      auto k = complexity_upper(x, params);
      if (k.has_value()) {
        rec["k_upper"] = *k;
      } else {
        rec["k_upper"] = nullptr;
      }
    }
    records.push_back(rec);
  }
  const nlohmann::json& payload = records.size() == 1 ? records[0] : records;
  emit(o.out, payload.dump(2) + "\n");
}

// --- predict -------------------------------------------------------------------

struct predict_opts {
  std::string prefix;
  unsigned L = 10;
  std::uint64_t T = 256;
  bool normalize = false;
  std::string out;
};

void run_predict(const predict_opts& o) {
  bit_string prefix = parse_bits(o.prefix, "--prefix");
  approximation_params params{o.L, o.T};
  std::string csv;
  csv += "# schema: predict-v1\n";
  csv += "# params: L=" + std::to_string(o.L) + " T=" + std::to_string(o.T) +
         " normalize=" + (o.normalize ? std::string("true") : std::string("false")) + "\n";
  csv += "t,observed,p0,p1,p0_exact,p1_exact\n";
  for (std::size_t t = 0; t <= prefix.size(); ++t) {
    rational p0 = predictive(prefix.prefix(t), 0, params, o.normalize);
    rational p1 = predictive(prefix.prefix(t), 1, params, o.normalize);
    std::string observed = t < prefix.size() ? std::to_string(int(prefix[t])) : "";
    csv += std::to_string(t) + "," + observed + "," + fmt_double(to_double(p0)) + "," +
           fmt_double(to_double(p1)) + "," + rational_str(p0) + "," + rational_str(p1) + "\n";
  }
  emit(o.out, csv);
}

// --- agent ---------------------------------------------------------------------

struct agent_opts {
  std::string env;
  std::size_t m = 50;
  std::size_t seeds = 10;
  std::string policy = "aixi";
  int depth = 5;
  std::uint64_t base_seed = 1000;
  std::string out;
};

void run_agent(const agent_opts& o) {
  if (o.m == 0 || o.seeds == 0) throw config_error("--m and --seeds must be positive");
  if (o.depth < 1) throw config_error("--depth must be at least 1");
  catalog_entry entry = resolve_env(o.env);
  episode_spec spec;
  spec.cycles = o.m;
  spec.base_seed = o.base_seed;
  policy_factory factory = o.policy == "aixi" ? aixi_policy_factory(o.depth)
                                              : named_policy_factory(o.policy);
  policy_ptr pol = factory(entry, spec);

  std::string csv;
  csv += "# schema: agent-v1\n";
  csv += "# env: " + entry.name + "\n";
  csv += "# policy: " + pol->name() + "\n";
  csv += "# m: " + std::to_string(o.m) + " seeds: " + std::to_string(o.seeds) +
         " base_seed: " + std::to_string(o.base_seed) + "\n";
  csv += "seed,cycle,action,obs,reward,cum_reward\n";
  for (std::size_t j = 0; j < o.seeds; ++j) {
    const std::uint64_t seed = derive_seed(o.base_seed, j);
    env_ptr env = entry.make_true_env(seed);
    episode ep = run_episode(*pol, *env, o.m, seed);
    rational cum(0);
    for (std::size_t k = 0; k < ep.h.cycles(); ++k) {
      cum += ep.h.at(k).reward;
      csv += std::to_string(j) + "," + std::to_string(k + 1) + "," +
             std::to_string(ep.h.action(k)) + "," + std::to_string(ep.h.at(k).obs) + "," +
             fmt_double(to_double(ep.h.at(k).reward)) + "," + fmt_double(to_double(cum)) + "\n";
    }
  }
  emit(o.out, csv);
}

// --- ior -----------------------------------------------------------------------

struct ior_opts {
  std::size_t m = 100;
  std::size_t seeds = 30;
  std::uint64_t base_seed = 1000;
  std::vector<std::string> policies{"aixi", "myopic", "random"};
  std::string format = "csv";
  std::string out;
};

void run_ior(const ior_opts& o) {
  ior_suite suite = default_ior_suite();
  suite.spec.cycles = o.m;
  suite.spec.base_seed = o.base_seed;
  suite.num_seeds = o.seeds;

  std::vector<ior_score> scores;
  for (const auto& kind : o.policies) {
    scores.push_back(intelligence_score(kind, named_policy_factory(kind), suite));
  }
  std::vector<ranking_entry> ranking = order(scores);

  if (o.format == "json") {
    nlohmann::json j;
    j["suite"] = nlohmann::json::parse(suite.manifest_json());
    char hash_buf[20];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(suite.manifest_hash()));
    j["suite_hash"] = std::string(hash_buf);
    j["scores"] = nlohmann::json::array();
    for (const auto& s : scores) {
      nlohmann::json js;
      js["policy"] = s.policy_id;
      js["upsilon"] = s.upsilon;
      js["upsilon_se"] = s.upsilon_se;
      js["per_env"] = nlohmann::json::array();
      for (const auto& e : s.per_env) {
        js["per_env"].push_back({{"env", e.env_name},
                                 {"weight", rational_str(e.weight)},
                                 {"mean_value", e.mean_value},
                                 {"std_err", e.std_err}});
      }
      j["scores"].push_back(js);
    }
    j["ranking"] = nlohmann::json::array();
    for (const auto& r : ranking) {
      j["ranking"].push_back({{"rank", r.rank},
                              {"policy", r.policy_id},
                              {"upsilon", r.upsilon},
                              {"gap_to_next", r.gap_to_next},
                              {"combined_se_to_next", r.combined_se_to_next},
                              {"incomparable_with_next", r.incomparable_with_next}});
    }
    emit(o.out, j.dump(2) + "\n");
    return;
  }
  if (o.format != "csv") throw config_error("--format must be csv or json");

  std::string csv;
  csv += "# schema: ior-v1\n";
  csv += "# suite_manifest: " + suite.manifest_json() + "\n";
  char hash_buf[20];
  std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                static_cast<unsigned long long>(suite.manifest_hash()));
  csv += "# suite_hash: " + std::string(hash_buf) + "\n";
  csv += "rank,policy,upsilon,upsilon_se,gap_to_next,combined_se_to_next,incomparable_with_next";
  for (const auto& name : suite.env_names) csv += "," + name + "_mean," + name + "_se";
  csv += "\n";
  for (const auto& r : ranking) {
    const ior_score* score = nullptr;
    for (const auto& s : scores) {
      if (s.policy_id == r.policy_id) score = &s;
    }
    csv += std::to_string(r.rank) + "," + r.policy_id + "," + fmt_double(r.upsilon) + "," +
           fmt_double(score->upsilon_se) + "," + fmt_double(r.gap_to_next) + "," +
           fmt_double(r.combined_se_to_next) + "," +
           (r.incomparable_with_next ? "1" : "0");
    for (const auto& e : score->per_env) {
      csv += "," + fmt_double(e.mean_value) + "," + fmt_double(e.std_err);
    }
    csv += "\n";
  }
  emit(o.out, csv);
}

// --- experiment ----------------------------------------------------------------

struct experiment_opts {
  std::string name;
  std::string manifest_path;
  std::vector<std::string> sets;
  bool list = false;
  std::string out;
};

void run_experiment_cmd(const experiment_opts& o) {
  if (o.list) {
    std::string text;
    for (const auto& info : experiment_registry()) {
      text += info.name + ": " + info.description + "\n";
      text += "  defaults: " + info.defaults.to_json() + "\n";
    }
    std::cout << text;
    return;
  }
  experiment_manifest manifest;
  if (!o.manifest_path.empty()) {
    std::ifstream in(o.manifest_path, std::ios::binary);
    if (!in) throw config_error("--manifest: cannot read '" + o.manifest_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    manifest = experiment_manifest::from_json(buf.str());
    if (!o.name.empty() && o.name != manifest.experiment) {
      throw config_error("experiment name '" + o.name + "' conflicts with manifest '" +
                         manifest.experiment + "'");
    }
  } else {
    if (o.name.empty()) throw config_error("experiment: name a registered experiment or pass --manifest");
    manifest = experiment_lookup(o.name).defaults;
  }
  manifest = with_overrides(manifest, o.sets);
  experiment_result result = run_experiment(manifest);
  emit(o.out, result.csv);
  if (!o.out.empty()) {
    std::string line = "summary:";
    for (const auto& [k, v] : result.summary) line += " " + k + "=" + fmt_double(v);
    std::cout << line << "\n";
  }
}

// --- machine trace ---------------------------------------------------------------

struct trace_opts {
  std::string program;
  std::string input;
  std::uint64_t steps = 256;
  std::uint64_t output_limit = 64;
  std::string out;
};

void run_trace(const trace_opts& o) {
  bit_string program = parse_bits(o.program, "--program");
  bit_string input = o.input.empty() ? bit_string() : parse_bits(o.input, "--input");
  std::string trace;
  execution_result res = execute(program, input, o.steps, o.output_limit, &trace);
  std::string text = trace;
  text += "output: " + (res.output.size() ? res.output.str() : std::string("(empty)")) + "\n";
  text += "consumed: " + std::to_string(res.consumed) + "\n";
  emit(o.out, text);
}

// --- env list ---------------------------------------------------------------------

void run_env_list() {
  std::string text;
  for (const auto& e : environment_catalog()) {
    text += e.name + " (actions: " + std::to_string(e.num_actions) +
            ", model class: " + std::to_string(e.make_model_class().size()) +
            " components)\n  " + e.description + "\n";
  }
  std::cout << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "aixilab: bounded Solomonoff induction and expectimax agents on a fixed "
      "reference machine"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "read options from an INI/TOML file ([subcommand] sections; flags override)");
  int jobs = 1;
  app.add_option("--jobs", jobs,
                 "worker cap, accepted for interface compatibility; this build computes "
                 "single-threaded and results never depend on it")
      ->check(CLI::PositiveNumber);

  enumerate_opts eo;
  auto* enumerate = app.add_subcommand("enumerate", "lower_m / complexity_upper records");
  enumerate->add_option("--x", eo.xs, "target bit string (repeatable)")->required();
  enumerate->add_option("--L", eo.L, "program length bound (bits)")->capture_default_str();
  enumerate->add_option("--T", eo.T, "step budget")->capture_default_str();
  enumerate->add_flag("--k-upper", eo.k_upper, "include the complexity upper bound");
  enumerate->add_option("--out", eo.out, "output path (atomic write; default stdout)");
  enumerate->callback([&eo] { run_enumerate(eo); });

  predict_opts po;
  auto* predict = app.add_subcommand("predict", "next-bit predictive trace along a prefix");
  predict->add_option("--prefix", po.prefix, "observed bit string")->required();
  predict->add_option("--L", po.L, "program length bound (bits)")->capture_default_str();
  predict->add_option("--T", po.T, "step budget")->capture_default_str();
  predict->add_flag("--normalize", po.normalize, "normalize the two next-bit masses");
  predict->add_option("--out", po.out, "output path (atomic write; default stdout)");
  predict->callback([&po] { run_predict(po); });

  agent_opts ao;
  auto* agent = app.add_subcommand("agent", "run policy episodes in a catalog environment");
  agent->add_option("--env", ao.env, "catalog name or bernoulli:<theta>")->required();
  agent->add_option("--m", ao.m, "cycles per episode")->capture_default_str();
  agent->add_option("--seeds", ao.seeds, "number of episodes")->capture_default_str();
  agent->add_option("--policy", ao.policy, "aixi, myopic, or random")->capture_default_str();
  agent->add_option("--depth", ao.depth, "aixi planning depth cap")->capture_default_str();
  agent->add_option("--base-seed", ao.base_seed, "seed root")->capture_default_str();
  agent->add_option("--out", ao.out, "output path (atomic write; default stdout)");
  agent->callback([&ao] { run_agent(ao); });

  ior_opts io;
  auto* ior = app.add_subcommand("ior", "intelligence scores and ranking on the default suite");
  ior->add_option("--m", io.m, "cycles per episode")->capture_default_str();
  ior->add_option("--seeds", io.seeds, "seeds per environment")->capture_default_str();
  ior->add_option("--base-seed", io.base_seed, "seed root")->capture_default_str();
  ior->add_option("--policies", io.policies, "policies to score (comma or space separated)")
      ->delimiter(',')
      ->capture_default_str();
  ior->add_option("--format", io.format, "csv or json")->capture_default_str();
  ior->add_option("--out", io.out, "output path (atomic write; default stdout)");
  ior->callback([&io] { run_ior(io); });

  experiment_opts xo;
  auto* experiment = app.add_subcommand("experiment", "manifest-driven experiment runs");
  experiment->add_option("name", xo.name, "registered experiment name");
  experiment->add_option("--manifest", xo.manifest_path, "manifest JSON file");
  experiment->add_option("--set", xo.sets, "override a parameter, key=value (repeatable)");
  experiment->add_flag("--list", xo.list, "list registered experiments and defaults");
  experiment->add_option("--out", xo.out, "output path (atomic write; default stdout)");
  experiment->callback([&xo] { run_experiment_cmd(xo); });

  trace_opts to;
  auto* machine = app.add_subcommand("machine", "reference machine utilities");
  machine->require_subcommand(1);
  auto* trace = machine->add_subcommand("trace", "step-by-step opcode trace");
  trace->add_option("--program", to.program, "program bits")->required();
  trace->add_option("--input", to.input, "input channel bits");
  trace->add_option("--steps", to.steps, "step budget")->capture_default_str();
  trace->add_option("--output-limit", to.output_limit, "max output bits")->capture_default_str();
  trace->add_option("--out", to.out, "output path (atomic write; default stdout)");
  trace->callback([&to] { run_trace(to); });

  auto* env = app.add_subcommand("env", "environment catalog utilities");
  env->require_subcommand(1);
  auto* list = env->add_subcommand("list", "list catalog environments");
  list->callback([] { run_env_list(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const aixilab::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// Python bindings for the main operations: enumeration, prediction, planning,
// episodes, IOR scoring, and manifest-driven experiments.  Exact rationals
// cross the boundary as "numerator/denominator" strings; everything else is
// plain Python data.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "aixilab/agent.hpp"
#include "aixilab/environments.hpp"
#include "aixilab/errors.hpp"
#include "aixilab/experiments.hpp"
#include "aixilab/ior.hpp"
#include "aixilab/machine.hpp"
#include "aixilab/rng.hpp"
#include "aixilab/solomonoff.hpp"

namespace py = pybind11;
using namespace aixilab;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bit_string to_bits(const std::string& text, const char* field) {
  try {
    return bit_string::parse(text);
  } catch (const std::exception&) {
    throw config_error(std::string(field) + ": expected a 0/1 string, got '" + text + "'");
  }
}

py::dict run_manifest(const experiment_manifest& manifest) {
  experiment_result res = run_experiment(manifest);
  py::dict out;
  out["csv"] = res.csv;
  out["summary"] = res.summary;
  out["manifest"] = res.manifest.to_json();
  out["manifest_hash"] = hex64(res.manifest.hash());
  return out;
}

}  // namespace

PYBIND11_MODULE(aixilab, m) {
  m.doc() =
      "Bounded Solomonoff induction, Bayes-mixture planners, and intelligence "
      "scoring on a fixed reference monotone machine.";

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);

  // --- machine / enumeration ----------------------------------------------------
  m.def(
      "execute",
      [](const std::string& program, const std::string& input, std::uint64_t steps,
         std::uint64_t output_limit) {
        execution_result res =
            aixilab::execute(to_bits(program, "program"), to_bits(input, "input"), steps,
                             output_limit);
        py::dict out;
        out["output"] = res.output.str();
        out["consumed"] = res.consumed;
        out["steps"] = res.steps;
        out["status"] = std::string(status_name(res.status));
        return out;
      },
      py::arg("program"), py::arg("input") = "", py::arg("steps") = 256,
      py::arg("output_limit") = 64,
      "Run a program on the reference machine; returns output, consumption, status.");

  m.def(
      "lower_m",
      [](const std::string& x, unsigned L, std::uint64_t T) {
        return rational_str(aixilab::lower_m(to_bits(x, "x"), approximation_params{L, T}));
      },
      py::arg("x"), py::arg("L") = 10, py::arg("T") = 256,
      "Exact enumeration lower bound on M(x) as a 'num/den' string.");

  m.def(
      "lower_m_float",
      [](const std::string& x, unsigned L, std::uint64_t T) {
        return to_double(aixilab::lower_m(to_bits(x, "x"), approximation_params{L, T}));
      },
      py::arg("x"), py::arg("L") = 10, py::arg("T") = 256);

  m.def(
      "predictive",
      [](const std::string& prefix, int next, unsigned L, std::uint64_t T, bool normalize) {
        if (next != 0 && next != 1) throw config_error("next: must be 0 or 1");
        return rational_str(aixilab::predictive(to_bits(prefix, "prefix"),
                                                static_cast<uint8_t>(next),
                                                approximation_params{L, T}, normalize));
      },
      py::arg("prefix"), py::arg("next"), py::arg("L") = 10, py::arg("T") = 256,
      py::arg("normalize") = false,
      "Next-bit predictive mass (exact 'num/den'); raises on zero prefix mass.");

  m.def(
      "complexity_upper",
      [](const std::string& x, unsigned L, std::uint64_t T) -> py::object {
        auto k = aixilab::complexity_upper(to_bits(x, "x"), approximation_params{L, T});
        if (!k.has_value()) return py::none();
        return py::int_(*k);
      },
      py::arg("x"), py::arg("L") = 10, py::arg("T") = 256,
      "Least enumerated program length producing x, or None under these budgets.");

  // --- environments & planning ---------------------------------------------------
  m.def("environments", [] {
    std::vector<py::dict> out;
    for (const auto& e : environment_catalog()) {
      py::dict d;
      d["name"] = e.name;
      d["description"] = e.description;
      d["num_actions"] = e.num_actions;
      d["model_class_size"] = e.make_model_class().size();
      out.push_back(d);
    }
    return out;
  });

  m.def(
      "plan",
      [](const std::string& env, int horizon) {
        if (horizon < 1) throw config_error("horizon: must be at least 1");
        const catalog_entry& entry = catalog_lookup(env);
        value_report rep = expectimax(entry.make_model_class(), history(), horizon);
        py::dict out;
        out["best_action"] = rep.best_action;
        out["value"] = rational_str(rep.value);
        std::vector<std::string> q;
        for (const auto& v : rep.action_values) q.push_back(rational_str(v));
        out["action_values"] = q;
        return out;
      },
      py::arg("env"), py::arg("horizon") = 3,
      "Exact expectimax over the environment's model class from the empty history.");

  m.def(
      "episode",
      [](const std::string& env, const std::string& policy, std::size_t m_cycles,
         std::uint64_t seed, int depth) {
        const catalog_entry& entry = catalog_lookup(env);
        episode_spec spec;
        spec.cycles = m_cycles;
        spec.base_seed = seed;
        policy_factory factory =
            policy == "aixi" ? aixi_policy_factory(depth) : named_policy_factory(policy);
        policy_ptr pol = factory(entry, spec);
        env_ptr true_env = entry.make_true_env(seed);
        aixilab::episode ep = run_episode(*pol, *true_env, m_cycles, seed);
        py::dict out;
        out["policy"] = pol->name();
        out["total_reward"] = to_double(ep.total_reward);
        std::vector<py::dict> rows;
        for (std::size_t k = 0; k < ep.h.cycles(); ++k) {
          py::dict row;
          row["cycle"] = k + 1;
          row["action"] = ep.h.action(k);
          row["obs"] = ep.h.at(k).obs;
          row["reward"] = to_double(ep.h.at(k).reward);
          rows.push_back(row);
        }
        out["cycles"] = rows;
        return out;
      },
      py::arg("env"), py::arg("policy") = "aixi", py::arg("m") = 50, py::arg("seed") = 1000,
      py::arg("depth") = 5, "Run one episode; returns per-cycle rows and the total reward.");

  // --- IOR -------------------------------------------------------------------------
  m.def(
      "intelligence",
      [](std::size_t m_cycles, std::size_t seeds, std::uint64_t base_seed,
         const std::vector<std::string>& policies) {
        ior_suite suite = default_ior_suite();
        suite.spec.cycles = m_cycles;
        suite.spec.base_seed = base_seed;
        suite.num_seeds = seeds;
        std::vector<ior_score> scores;
        for (const auto& kind : policies) {
          scores.push_back(intelligence_score(kind, named_policy_factory(kind), suite));
        }
        std::vector<ranking_entry> ranking = order(scores);
        py::dict out;
        out["suite_manifest"] = suite.manifest_json();
        out["suite_hash"] = hex64(suite.manifest_hash());
        std::vector<py::dict> score_rows;
        for (const auto& s : scores) {
          py::dict d;
          d["policy"] = s.policy_id;
          d["upsilon"] = s.upsilon;
          d["upsilon_se"] = s.upsilon_se;
          std::vector<py::dict> per_env;
          for (const auto& e : s.per_env) {
            py::dict ed;
            ed["env"] = e.env_name;
            ed["weight"] = rational_str(e.weight);
            ed["mean_value"] = e.mean_value;
            ed["std_err"] = e.std_err;
            per_env.push_back(ed);
          }
          d["per_env"] = per_env;
          score_rows.push_back(d);
        }
        out["scores"] = score_rows;
        std::vector<py::dict> rank_rows;
        for (const auto& r : ranking) {
          py::dict d;
          d["rank"] = r.rank;
          d["policy"] = r.policy_id;
          d["upsilon"] = r.upsilon;
          d["gap_to_next"] = r.gap_to_next;
          d["combined_se_to_next"] = r.combined_se_to_next;
          d["incomparable_with_next"] = r.incomparable_with_next;
          rank_rows.push_back(d);
        }
        out["ranking"] = rank_rows;
        return out;
      },
      py::arg("m") = 100, py::arg("seeds") = 30, py::arg("base_seed") = 1000,
      py::arg("policies") = std::vector<std::string>{"aixi", "myopic", "random"},
      "Score policies on the default suite and rank them by upsilon.");

  // --- experiments -------------------------------------------------------------------
  m.def("experiments", [] {
    std::vector<py::dict> out;
    for (const auto& info : experiment_registry()) {
      py::dict d;
      d["name"] = info.name;
      d["description"] = info.description;
      d["defaults"] = info.defaults.to_json();
      out.push_back(d);
    }
    return out;
  });

  m.def(
      "run_experiment",
      [](const std::string& name, const std::map<std::string, std::string>& overrides) {
        experiment_manifest manifest = experiment_lookup(name).defaults;
        std::vector<std::string> sets;
        for (const auto& [k, v] : overrides) sets.push_back(k + "=" + v);
        return run_manifest(with_overrides(manifest, sets));
      },
      py::arg("name"), py::arg("overrides") = std::map<std::string, std::string>{},
      "Run a registered experiment with parameter overrides; returns csv and summary.");

  m.def(
      "run_manifest",
      [](const std::string& manifest_json) {
        return run_manifest(experiment_manifest::from_json(manifest_json));
      },
      py::arg("manifest_json"), "Run an experiment from a manifest JSON string.");
}

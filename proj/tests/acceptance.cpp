// Acceptance gate: one line per criterion, PASS or FAIL, nonzero exit on any
// failure.  Tolerances and budgets are pinned here on purpose — editing them
// is editing the acceptance contract.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "aixilab/agent.hpp"
#include "aixilab/bits.hpp"
#include "aixilab/environments.hpp"
#include "aixilab/experiments.hpp"
#include "aixilab/ior.hpp"
#include "aixilab/mixture.hpp"
#include "aixilab/rational.hpp"
#include "aixilab/solomonoff.hpp"

using namespace aixilab;

namespace {

int failures = 0;

class stopwatch {
 public:
  stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int num, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << ": criterion " << num << " — " << name << " ("
            << detail << ")\n"
            << std::flush;
  if (!pass) ++failures;
}

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// --- 1. Kraft / semimeasure ------------------------------------------------------

void criterion_1() {
  stopwatch timer;
  std::size_t checks = 0, violations = 0;
  for (const auto& [L, T] : std::vector<std::pair<unsigned, uint64_t>>{{8, 64}, {12, 256}}) {
    approximation_params params{L, T};
    if (lower_m(bit_string(), params) > 1) ++violations;
    ++checks;
    for (std::size_t len = 0; len <= 6; ++len) {
      for (const bit_string& x : bit_string::all_of_length(len)) {
        rational parent = lower_m(x, params);
        rational child_sum = lower_m(x.with(0), params) + lower_m(x.with(1), params);
        if (child_sum > parent) ++violations;
        ++checks;
      }
    }
  }
  report(1, "Kraft/semimeasure lower_m suite", violations == 0,
         std::to_string(checks) + " exact checks, " + std::to_string(violations) +
             " violations, " + fmt(timer.seconds()) + " s");
}

// --- 2. Dominance ------------------------------------------------------------------

void criterion_2() {
  stopwatch timer;
  std::vector<mixture> classes;
  classes.push_back(bernoulli_model_class(bernoulli_grid()));
  classes.push_back(bernoulli_model_class({rational(1, 2), rational(1)}));
  std::size_t checks = 0, violations = 0;
  for (const mixture& mix : classes) {
    for (std::size_t len = 0; len <= 10; ++len) {
      for (std::uint64_t obs_bits = 0; obs_bits < (std::uint64_t(1) << len); ++obs_bits) {
        history h;
        for (std::size_t k = 0; k < len; ++k) {
          int obs = int((obs_bits >> k) & 1);
          h.push(0, percept{obs, rational(obs == 0 ? 1 : 0)});
        }
        rational xi = mix.mass(h);
        for (std::size_t i = 0; i < mix.size(); ++i) {
          if (xi < mix.components()[i].weight * mix.component_mass(i, h)) ++violations;
          ++checks;
        }
      }
    }
  }
  report(2, "mixture dominance xi >= w nu", violations == 0,
         std::to_string(checks) + " exact checks over histories <= 10, " +
             std::to_string(violations) + " violations, " + fmt(timer.seconds()) + " s");
}

// --- 3. Convergence bound -----------------------------------------------------------

void criterion_3() {
  stopwatch timer;
  experiment_manifest m = experiment_lookup("convergence").defaults;
  // Pinned: bernoulli-grid-9, theta 3/4, n = 10^4, 100 seeds.
  experiment_result res = run_experiment(m);
  double err = res.summary.at("final_mean_cum_sq_error");
  double bound = res.summary.at("bound_ln_inv_w") + 3.0 * res.summary.at("final_se");
  report(3, "cumulative squared error within ln 9 + 3 sigma", err <= bound,
         "error " + fmt(err) + " vs bound " + fmt(bound) + ", n=10000, 100 seeds, " +
             fmt(timer.seconds()) + " s");
}

// --- 4. Expectimax oracle equivalence ---------------------------------------------

// Independent check: enumerate every deterministic policy tree and take the
// maximum at the very end, instead of maximizing inside the recursion.
std::vector<rational> oracle_action_values(const mixture& mix, history& h, int depth, int a);

std::vector<rational> oracle_policy_values(const mixture& mix, history& h, int depth) {
  if (depth == 0) return {rational(0)};
  std::vector<rational> all;
  for (int a = 0; a < mix.num_actions(); ++a) {
    auto vals = oracle_action_values(mix, h, depth, a);
    all.insert(all.end(), vals.begin(), vals.end());
  }
  return all;
}

std::vector<rational> oracle_action_values(const mixture& mix, history& h, int depth, int a) {
  auto dist = mix.predict(h, a, false);
  rational immediate(0);
  for (const auto& wp : dist) immediate += wp.prob * wp.p.reward;
  std::vector<std::vector<rational>> subs;
  for (const auto& wp : dist) {
    h.push(a, wp.p);
    subs.push_back(oracle_policy_values(mix, h, depth - 1));
    h.pop();
  }
  std::vector<rational> vals;
  std::vector<std::size_t> idx(subs.size(), 0);
  while (true) {
    rational v = immediate;
    for (std::size_t i = 0; i < subs.size(); ++i) v += dist[i].prob * subs[i][idx[i]];
    vals.push_back(v);
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == subs[pos].size()) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  return vals;
}

bool oracle_agrees(const mixture& mix, history& h, int depth, std::string& why) {
  value_report planner = expectimax(mix, h, depth);
  rational best_value(0);
  int best_action = 0;
  bool first = true;
  for (int a = 0; a < mix.num_actions(); ++a) {
    auto vals = oracle_action_values(mix, h, depth, a);
    rational best_a = vals.front();
    for (const rational& v : vals) {
      if (v > best_a) best_a = v;
    }
    if (planner.action_values[std::size_t(a)] != best_a) {
      why = "root Q(" + std::to_string(a) + ") mismatch";
      return false;
    }
    if (first || best_a > best_value) {  // strict: ties keep the lowest action
      best_value = best_a;
      best_action = a;
      first = false;
    }
  }
  if (planner.value != best_value) {
    why = "root value mismatch";
    return false;
  }
  if (planner.best_action != best_action) {
    why = "chosen action mismatch (tie-break)";
    return false;
  }
  return true;
}

void criterion_4() {
  stopwatch timer;
  // Fixed environment grid: three Bernoulli laws and three PD opponents.
  std::vector<std::pair<std::string, env_ptr>> grid;
  grid.emplace_back("bern-1/5", std::make_shared<bernoulli_prediction_env>(rational(1, 5)));
  grid.emplace_back("bern-1/2", std::make_shared<bernoulli_prediction_env>(rational(1, 2)));
  grid.emplace_back("bern-4/5", std::make_shared<bernoulli_prediction_env>(rational(4, 5)));
  grid.emplace_back("pd-coop", pd_vs(always_move_opponent(0)));
  grid.emplace_back("pd-defect", pd_vs(always_move_opponent(1)));
  grid.emplace_back("pd-tft", pd_vs(tit_for_tat_opponent()));

  std::size_t checks = 0;
  std::string why;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      for (std::size_t k = j + 1; k < grid.size(); ++k) {
        std::vector<std::pair<std::string, env_ptr>> envs{grid[i], grid[j], grid[k]};
        std::vector<mixture> mixes;
        mixes.push_back(mixture({{envs[0].first, envs[0].second, rational(1, 3)},
                                 {envs[1].first, envs[1].second, rational(1, 3)},
                                 {envs[2].first, envs[2].second, rational(1, 3)}}));
        mixes.push_back(mixture::with_gamma_weights(
            {{envs[0].first, envs[0].second}, {envs[1].first, envs[1].second},
             {envs[2].first, envs[2].second}}));
        for (const mixture& mix : mixes) {
          history empty;
          for (int d = 1; d <= 3; ++d) {
            ++checks;
            if (!oracle_agrees(mix, empty, d, why)) {
              report(4, "expectimax equals flat policy enumeration", false,
                     why + " at depth " + std::to_string(d));
              return;
            }
          }
          // Non-empty histories: every reachable one-cycle prefix, m - k <= 2.
          for (int a = 0; a < 2; ++a) {
            for (const auto& wp : mix.predict(empty, a, false)) {
              history h;
              h.push(a, wp.p);
              for (int d = 1; d <= 2; ++d) {
                ++checks;
                if (!oracle_agrees(mix, h, d, why)) {
                  report(4, "expectimax equals flat policy enumeration", false,
                         why + " after one cycle, depth " + std::to_string(d));
                  return;
                }
              }
            }
          }
        }
      }
    }
  }
  report(4, "expectimax equals flat policy enumeration", true,
         std::to_string(checks) + " exact root comparisons over 20 mixtures x 2 priors, " +
             fmt(timer.seconds()) + " s");
}

// --- 5. Value linearity and convexity ----------------------------------------------

void criterion_5() {
  stopwatch timer;
  std::vector<std::pair<std::string, env_ptr>> comps;
  comps.emplace_back("bern-1/5", std::make_shared<bernoulli_prediction_env>(rational(1, 5)));
  comps.emplace_back("bern-4/5", std::make_shared<bernoulli_prediction_env>(rational(4, 5)));
  comps.emplace_back("pd-tft", pd_vs(tit_for_tat_opponent()));
  const std::vector<rational> wa{rational(1, 2), rational(1, 4), rational(1, 4)};
  const std::vector<rational> wb{rational(1, 6), rational(1, 3), rational(1, 2)};
  auto blend_mixture = [&](const rational& lambda) {
    std::vector<mixture_component> blend;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      blend.push_back({comps[i].first, comps[i].second,
                       lambda * wa[i] + (1 - lambda) * wb[i]});
    }
    return mixture(std::move(blend));
  };

  const std::vector<rational> lambdas{rational(0), rational(1, 4), rational(1, 2), rational(1)};
  const history empty;
  const int depth = 3;
  // Two fixed plans: constant defect/guess-1, and alternate starting at 0.
  std::vector<std::function<int(const history&)>> plans;
  plans.emplace_back([](const history&) { return 1; });
  plans.emplace_back([](const history& h) { return int(h.cycles() % 2); });

  std::size_t checks = 0;
  for (const auto& plan : plans) {
    rational va = policy_value(mixture_env(blend_mixture(rational(1))), plan, empty, depth);
    rational vb = policy_value(mixture_env(blend_mixture(rational(0))), plan, empty, depth);
    for (const rational& lambda : lambdas) {
      rational blended = policy_value(mixture_env(blend_mixture(lambda)), plan, empty, depth);
      ++checks;
      if (blended != lambda * va + (1 - lambda) * vb) {
        report(5, "fixed-plan linearity and optimal-value convexity", false,
               "linearity violated at lambda " + rational_str(lambda));
        return;
      }
    }
  }
  rational va_opt = expectimax(blend_mixture(rational(1)), empty, depth).value;
  rational vb_opt = expectimax(blend_mixture(rational(0)), empty, depth).value;
  for (const rational& lambda : lambdas) {
    rational blended = expectimax(blend_mixture(lambda), empty, depth).value;
    ++checks;
    if (blended > lambda * va_opt + (1 - lambda) * vb_opt) {
      report(5, "fixed-plan linearity and optimal-value convexity", false,
             "convexity violated at lambda " + rational_str(lambda));
      return;
    }
  }
  report(5, "fixed-plan linearity and optimal-value convexity", true,
         std::to_string(checks) + " exact checks on the lambda grid {0,1/4,1/2,1}, " +
             fmt(timer.seconds()) + " s");
}

// --- 6. Selected-bits learning -------------------------------------------------------

void criterion_6() {
  stopwatch timer;
  experiment_manifest m = experiment_lookup("selected-bits").defaults;
  // Pinned: L=24, T=16 (admits the copy program), n=1000, 30 seeds, window 100.
  experiment_result res = run_experiment(m);
  double even = res.summary.at("even_error_last_window");
  double odd = res.summary.at("odd_error_last_window");
  bool pass = even < 0.1 && odd >= 0.4 && odd <= 0.6;
  report(6, "selected-bits even errors < 0.1, odd errors in [0.4, 0.6]", pass,
         "even " + fmt(even) + ", odd " + fmt(odd) + ", 30 seeds, " + fmt(timer.seconds()) +
             " s");
}

// --- 7. Monotone approximation ------------------------------------------------------

void criterion_7() {
  stopwatch timer;
  const std::vector<std::string> probes{
      "",      "0",     "1",     "00",     "01",    "10",    "11",
      "000",   "010",   "101",   "111",    "0000",  "0011",  "0101",
      "1111",  "00000", "01010", "11111",  "000000", "010101"};
  const std::vector<unsigned> Ls{6, 8, 10, 12};
  const std::vector<uint64_t> Ts{16, 64, 256, 1024};
  std::size_t checks = 0, violations = 0;
  for (const std::string& text : probes) {
    bit_string x = bit_string::parse(text);
    rational grid[4][4];
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      for (std::size_t j = 0; j < Ts.size(); ++j) {
        grid[i][j] = lower_m(x, approximation_params{Ls[i], Ts[j]});
      }
    }
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      for (std::size_t j = 0; j < Ts.size(); ++j) {
        if (i > 0 && grid[i][j] < grid[i - 1][j]) ++violations;
        if (j > 0 && grid[i][j] < grid[i][j - 1]) ++violations;
        checks += (i > 0) + (j > 0);
      }
    }
  }
  report(7, "lower_m nondecreasing in L and T", violations == 0,
         std::to_string(checks) + " exact comparisons on a 4x4 budget grid x 20 probes, " +
             std::to_string(violations) + " violations, " + fmt(timer.seconds()) + " s");
}

// --- 8. IOR sanity ordering ----------------------------------------------------------

void criterion_8() {
  stopwatch timer;
  ior_suite suite = default_ior_suite();  // m = 100, 30 seeds, 4 environments
  std::vector<ior_score> scores;
  for (const std::string kind : {"aixi", "myopic", "random"}) {
    scores.push_back(intelligence_score(kind, named_policy_factory(kind), suite));
  }
  std::vector<ranking_entry> ranking = order(scores);
  bool pass = ranking.size() == 3 && ranking[0].policy_id == "aixi" &&
              ranking[1].policy_id == "myopic" && ranking[2].policy_id == "random";
  std::string gaps;
  for (std::size_t i = 0; i + 1 < ranking.size() && pass; ++i) {
    double gap = ranking[i].gap_to_next;
    double need = 3.0 * ranking[i].combined_se_to_next;
    if (!(gap > 0.0 && gap >= need)) pass = false;
    if (!gaps.empty()) gaps += ", ";
    gaps += "gap " + fmt(gap) + " vs 3se " + fmt(need);
  }
  report(8, "IOR: aixi > myopic > random by >= 3 combined SE", pass,
         (gaps.empty() ? std::string("ranking wrong") : gaps) + ", " + fmt(timer.seconds()) +
             " s");
}

// --- 9. Reproducibility ---------------------------------------------------------------

void criterion_9() {
  stopwatch timer;
  std::vector<experiment_manifest> manifests;
  manifests.push_back(with_overrides(experiment_lookup("convergence").defaults,
                                     {"class=two-point", "true_theta=1", "n=400", "seeds=5"}));
  manifests.push_back(experiment_lookup("selfplay").defaults);
  manifests.push_back(with_overrides(experiment_lookup("prediction-gap").defaults,
                                     {"n=60", "seeds=2"}));
  bool pass = true;
  std::string detail;
  for (const auto& m : manifests) {
    std::string first = run_experiment(m).csv;
    std::string second = run_experiment(m).csv;
    if (first != second) {
      pass = false;
      detail = m.experiment + " rerun differed";
      break;
    }
    write_file_atomic("acceptance_rerun.csv", first);
    std::ifstream in("acceptance_rerun.csv", std::ios::binary);
    std::string from_disk((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    std::remove("acceptance_rerun.csv");
    if (from_disk != first) {
      pass = false;
      detail = m.experiment + " file round-trip differed";
      break;
    }
  }
  if (detail.empty()) detail = "3 manifests byte-identical across reruns";
  report(9, "manifest reruns are byte-identical", pass, detail + ", " + fmt(timer.seconds()) + " s");
}

}  // namespace

int main() {
  stopwatch total;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failures))
            << " (total " << fmt(total.seconds()) << " s)\n";
  return failures == 0 ? 0 : 1;
}

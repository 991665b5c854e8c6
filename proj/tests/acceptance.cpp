// Acceptance run: one PASS/FAIL line per criterion. argv[1] is the epictrl
// binary used by the determinism check.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "epictrl/chunglu.hpp"
#include "epictrl/edge_list.hpp"
#include "epictrl/instances.hpp"
#include "epictrl/network.hpp"
#include "epictrl/percolate.hpp"
#include "epictrl/rng.hpp"
#include "epictrl/saa.hpp"
#include "epictrl/sbcc.hpp"

using namespace epictrl;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::uint64_t inst_seed(std::uint64_t tag, std::uint64_t i) {
  return rng::derive(kSeed + tag, rng::Stream::Instance, i);
}

double n23(std::size_t n) {
  const double r = std::cbrt(static_cast<double>(n));
  return r * r;
}

// 1. Monte Carlo within 4 sigma of exact enumeration.
Outcome percolation_oracle() {
  int ok = 0;
  double worst = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    InstanceSpec spec;
    spec.n = 4 + i % 5;
    spec.m = std::min<std::size_t>(12, spec.n * (spec.n - 1) / 2 - i % 3);
    spec.connected = i % 4 != 0;
    const ContactNetwork g = random_instance(spec, inst_seed(1, i));
    const double exact = exact_expected_infections(g, no_intervention()).mean;
    const InfectionEstimate mc = estimate_infections(g, no_intervention(), 100000, inst_seed(1, i));
    const double sigma = mc.half_width / kZ99;
    const double z = sigma > 0 ? std::abs(mc.mean - exact) / sigma : (mc.mean == exact ? 0 : 1e9);
    worst = std::max(worst, z);
    ok += z <= 4.0;
  }
  return {ok >= 49, fmt("%.0f/50 within 4 sigma, max |z| = %.2f", ok, worst)};
}

struct DeskInstance {
  ContactNetwork g;
  SampleSet set;
  double budget;
};

std::vector<DeskInstance> desk_instances() {
  std::vector<DeskInstance> out;
  for (std::uint64_t i = 0; i < 20; ++i) {
    InstanceSpec spec;
    spec.n = 7 + i % 3;
    spec.m = 10 + i % 5;
    spec.p_min = 0.2;
    spec.p_max = 0.8;
    spec.max_cost = 2;
    ContactNetwork g = random_instance(spec, inst_seed(2, i));
    SampleSet set = draw_samples(g, 30, inst_seed(2, i));
    out.push_back({std::move(g), std::move(set), 2.0 + static_cast<double>(i % 3)});
  }
  return out;
}

// 2. LP objective + 1 never exceeds the brute-force optimum.
Outcome lp_soundness(const std::vector<DeskInstance>& insts) {
  int ok = 0;
  double min_gap = 1e300;
  for (const DeskInstance& d : insts) {
    const FractionalSolution frac = solve_lp(build_lp(d.set, d.budget, RemovalMode::Edge));
    const BruteForceResult brute = brute_force_optimum(d.set, d.budget, RemovalMode::Edge);
    const double gap = brute.h - (frac.objective + 1.0);
    min_gap = std::min(min_gap, gap);
    ok += gap >= -1e-6;
  }
  return {ok == 20, fmt("%.0f/20 sound, smallest gap %.3g", ok, min_gap)};
}

// 3. Deterministic rounding: cost and infection bounds.
Outcome deterministic_rounding(const std::vector<DeskInstance>& insts) {
  int cost_ok = 0, h_ok = 0;
  double worst_cost = 0, worst_h = 0;
  for (const DeskInstance& d : insts) {
    const std::size_t n = d.g.num_vertices();
    const FractionalSolution frac = solve_lp(build_lp(d.set, d.budget, RemovalMode::Edge));
    const Intervention f = round_deterministic(frac);
    const BruteForceResult brute = brute_force_optimum(d.set, d.budget, RemovalMode::Edge);
    const double h = empirical_h(d.set.samples, d.g, f);
    const double cost_ratio = f.cost / (4 * n23(n) * d.budget);
    const double h_ratio = h / (2 * n23(n) * brute.h);
    worst_cost = std::max(worst_cost, cost_ratio);
    worst_h = std::max(worst_h, h_ratio);
    cost_ok += cost_ratio <= 1.0 + 1e-12;
    h_ok += h_ratio <= 1.0 + 1e-12;
  }
  return {cost_ok == 20 && h_ok == 20,
          fmt("cost %.0f/20 (max ratio %.3f), infections ", cost_ok, worst_cost) +
              fmt("%.0f/20 (max ratio %.3f)", h_ok, worst_h)};
}

// 4 and 11. Randomized rounding cost tail over 200 seeds.
int budget_tail(const FractionalSolution& frac, double gamma, double eps, std::uint64_t tag) {
  const double cap = 6 * (gamma + 5) * std::log(static_cast<double>(frac.num_vertices)) / eps *
                     frac.budget;
  int ok = 0;
  for (std::uint64_t r = 0; r < 200; ++r)
    ok += round_randomized(frac, gamma, eps, rng::derive(kSeed + tag, rng::Stream::Rounding, r)).cost <= cap;
  return ok;
}

Outcome randomized_tail() {
  InstanceSpec spec;
  spec.n = 50;
  spec.m = 120;
  spec.p_min = 0.05;
  spec.p_max = 0.3;
  const ContactNetwork g = random_instance(spec, inst_seed(4, 0));
  const SampleSet set = draw_samples(g, 60, inst_seed(4, 0));
  const FractionalSolution frac = solve_lp(build_lp(set, 3.0, RemovalMode::Edge));
  const int ok = budget_tail(frac, 2.0, 0.3, 4);
  return {ok >= 190, fmt("%.0f/200 runs within budget cap (N = 60 override)", ok)};
}

// 5. Uniform SAA accuracy over every subset of a 10-edge instance.
Outcome simultaneity() {
  InstanceSpec spec;
  spec.n = 7;
  spec.m = 10;
  spec.p_min = 0.2;
  spec.p_max = 0.8;
  const ContactNetwork g = random_instance(spec, inst_seed(5, 0));
  const double eps = 0.5;
  const std::uint64_t n_samples = sample_count(g.num_vertices(), g.num_edges(), eps);
  const std::size_t subsets = std::size_t{1} << g.num_edges();

  std::vector<Intervention> fs(subsets);
  std::vector<double> exact(subsets);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<EdgeId> ids;
    for (EdgeId e = 0; e < g.num_edges(); ++e)
      if (mask >> e & 1u) ids.push_back(e);
    fs[mask] = make_edge_intervention(g, ids);
    exact[mask] = exact_expected_infections(g, fs[mask]).mean;
  }

  int good_trials = 0;
  double worst = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const SampleSet set = draw_samples(g, n_samples, rng::derive(kSeed + 5, rng::Stream::Percolation, t));
    double trial_worst = 0;
#pragma omp parallel for schedule(static) reduction(max : trial_worst)
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      const double h = empirical_h(set.samples, g, fs[mask]);
      trial_worst = std::max(trial_worst, std::abs(h - exact[mask]) / exact[mask]);
    }
    worst = std::max(worst, trial_worst);
    good_trials += trial_worst <= eps;
  }
  return {good_trials >= 99, fmt("%.0f/100 trials, N = %.0f, worst relative error %.4f",
                                 good_trials, static_cast<double>(n_samples), worst)};
}

// 6. Recurrence against enumeration and the closed-form bound.
Outcome recurrence_grid() {
  double worst_rel = 0;
  int dominated = 0, cells = 0;
  for (double c1 : {1.1, 1.5, 2.0})
    for (int w : {1, 2})
      for (int d = w; d <= 8; ++d)
        for (int k = 1; k <= 8; ++k) {
          const double rec = n_recurrence(d, k, c1, w);
          const double en = n_enumeration(d, k, c1, w);
          worst_rel = std::max(worst_rel, std::abs(rec - en) / std::max(std::abs(en), 1e-300));
          dominated += lemma42_bound(d, k, c1, w) >= rec * (1 - 1e-12);
          ++cells;
        }
  const double witness_rec = n_recurrence(2, 1, 2.0, 1);
  const double witness_bound = lemma42_bound(2, 1, 2.0, 1);
  const bool witness = std::abs(witness_rec - 1.25) <= 1e-12 && std::abs(witness_bound - 1.25) <= 1e-12;
  return {worst_rel <= 1e-10 && dominated == cells && witness,
          fmt("max relative gap %.2e, bound dominates %.0f/", worst_rel, dominated) +
              std::to_string(cells) + fmt(" cells, witness %.6f vs %.6f", witness_rec, witness_bound)};
}

struct PathModel {
  int w_min, w_max;
  double beta;
  PathCensus census;
  ChungLuModel model;
};

std::vector<PathModel> path_models() {
  std::vector<PathModel> out;
  const std::pair<int, int> weights[] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}};
  for (auto [lo, hi] : weights)
    for (double beta : {2.5, 3.5}) {
      ChungLuModel model = build_model(10, beta, lo, hi);
      PathCensus census = estimate_gamma(model, 1.0, 2000, 5, kSeed + 7);
      out.push_back({lo, hi, beta, std::move(census), std::move(model)});
    }
  return out;
}

// 7. Estimated l_k minus 4 half-widths stays below the class-sum bound.
Outcome path_bound(const std::vector<PathModel>& models) {
  int ok = 0, cells = 0;
  double worst = 0;
  for (const PathModel& pm : models)
    for (int k = 1; k <= 5; ++k) {
      const double est = pm.census.counts[k - 1] - 4 * pm.census.half_widths[k - 1];
      const double bound = lemma41_bound(pm.model, k);
      worst = std::max(worst, est / bound);
      ok += est <= bound;
      ++cells;
    }
  return {ok == cells, fmt("%.0f/%.0f (model, k) cells dominated, max lower-estimate/bound %.3f",
                           ok, cells, worst)};
}

// 8. Ratio l_k(2.5) / l_k(3.5) shows no significant decrease in k.
Outcome phase_ratio(const std::vector<PathModel>& models) {
  int ok = 0, steps = 0, distinct = 0;
  double worst_z = -1e300;
  for (std::size_t i = 0; i + 1 < models.size(); i += 2) {
    distinct += models[i].model.class_sizes != models[i + 1].model.class_sizes;
    const PathCensus& heavy = models[i].census;     // beta 2.5
    const PathCensus& light = models[i + 1].census; // beta 3.5
    std::vector<double> ratio(5), se(5);
    for (int k = 0; k < 5; ++k) {
      const double a = heavy.counts[k], b = light.counts[k];
      const double sa = heavy.half_widths[k] / kZ99, sb = light.half_widths[k] / kZ99;
      ratio[k] = a / b;
      se[k] = ratio[k] * std::sqrt((sa / a) * (sa / a) + (sb / b) * (sb / b));
    }
    for (int k = 0; k + 1 < 5; ++k) {
      const double drop = ratio[k] - ratio[k + 1];
      const double z = drop / std::sqrt(se[k] * se[k] + se[k + 1] * se[k + 1]);
      worst_z = std::max(worst_z, z);
      ok += z <= kZ99;
      ++steps;
    }
  }
  return {ok == steps, fmt("%.0f/%.0f steps without a significant decrease, max drop z = %.2f",
                           ok, steps, worst_z) +
                           fmt(", class sizes differ in %.0f/%.0f weight pairs", distinct,
                               static_cast<double>(models.size() / 2))};
}

// 9. Bicriteria guarantee of min_sbcc against exhaustive search.
Outcome sbcc_contract() {
  int cases = 0, ok = 0;
  for (std::size_t n : {6u, 8u, 10u})
    for (std::size_t m = n - 1; m <= 16; m += 2)
      for (std::uint64_t s = 0; s < 3; ++s) {
        InstanceSpec spec;
        spec.n = n;
        spec.m = m;
        const ContactNetwork g = random_instance(spec, inst_seed(9, n * 1000 + m * 10 + s));
        const EdgeMask h = g.all_edges_mask();
        for (double budget : {0.0, 1.0, 2.0, 3.0, 4.0}) {
          const SbccExact exact = min_sbcc_exact(g, h, g.source(), budget);
          for (double lambda : {0.25, 0.5, 0.75}) {
            const SbccSolution sol = min_sbcc(g, h, g.source(), budget, lambda);
            const double cap = std::ceil(static_cast<double>(exact.component_size) / (1 - lambda) - 1e-9);
            ok += static_cast<double>(sol.cut_size) <= budget / lambda + 1e-9 &&
                  static_cast<double>(sol.component_size) <= cap;
            ++cases;
          }
        }
      }
  return {ok == cases, fmt("%.0f/%.0f (instance, budget, lambda) cases", ok, cases)};
}

// 10. End-to-end sparsification on K40.
Outcome karger_k40() {
  const ContactNetwork g = complete_graph(40, 0.9);
  int ok = 0, consistent = 0;
  double bound = 0, largest = 0;
  for (std::uint64_t run = 0; run < 50; ++run) {
    KargerConfig cfg;
    cfg.budget = 40;
    cfg.gamma = 4;
    cfg.lambda = 0.5;
    cfg.repetitions = 16;
    cfg.eval_samples = 2000;
    cfg.seed = kSeed + 100 + run;
    try {
      const KargerOutcome out = solve_karger(g, cfg);
      bound = out.report.lemma23_bound;
      largest = std::max(largest, out.intervention.cost);
      ok += out.intervention.cost <= bound;
      ++consistent;  // solve_karger throws when a lifted cut fails to reproduce S
    } catch (const std::exception&) {
    }
  }
  return {ok >= 45 && consistent == 50,
          fmt("%.0f/50 within bound %.1f, largest |F| = %.0f, ", ok, bound, largest) +
              fmt("reconstruction consistent in %.0f/50", consistent)};
}

// 11. Node mode.
Outcome node_variant() {
  int det_ok = 0, tail_ok = 0, lp_ok = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    InstanceSpec spec;
    spec.n = 8 + i % 5;
    spec.m = spec.n + 4 + i % 4;
    spec.p_min = 0.2;
    spec.p_max = 0.8;
    const ContactNetwork g = random_instance(spec, inst_seed(11, i));
    const SampleSet set = draw_samples(g, 30, inst_seed(11, i));
    const double budget = 2.0;
    const FractionalSolution frac = solve_lp(build_lp(set, budget, RemovalMode::Node));
    const Intervention det = round_deterministic(frac);
    det_ok += det.cost <= 4 * n23(g.num_vertices()) * budget;
    tail_ok += budget_tail(frac, 2.0, 0.3, 1100 + i) >= 190;
    lp_ok += frac.objective + 1.0 <= brute_force_optimum(set, budget, RemovalMode::Node).h + 1e-6;
  }
  return {det_ok == 10 && tail_ok == 10 && lp_ok == 10,
          fmt("deterministic cost %.0f/10, randomized tail %.0f/10, ", det_ok, tail_ok) +
              fmt("LP sound %.0f/10", lp_ok)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 12. Re-running CLI commands with the same seed gives identical files.
Outcome determinism(const std::string& tool) {
  if (tool.empty()) return {false, "no epictrl path given"};
  const fs::path dir = fs::temp_directory_path() / "epictrl_acceptance";
  fs::create_directories(dir);
  const fs::path k12 = dir / "k12.txt";
  save_network(k12, complete_graph(12, 0.6));
  const std::string model = "--n 40 --beta 2.5 --w-min 1 --w-max 4 --p 0.3";
  const std::vector<std::string> commands = {
      "oracle --suite percolation --instances 4 --n 8 --m 12 --samples 20000",
      "oracle --suite lp --instances 4 --n 7 --m 10 --budget 2",
      "oracle --suite node --instances 4 --n 7 --m 10 --budget 2",
      "oracle --suite sbcc --instances 4 --n 8 --m 12 --budget 2 --lambda 0.5",
      "generate " + model,
      "percolate " + model + " --samples 5000",
      "solve-saa " + model + " --budget 3 --rounding randomized --samples 40 --eval-samples 2000",
      "solve-node " + model + " --budget 3 --samples 40 --eval-samples 2000",
      "solve-karger --graph " + k12.string() + " --budget 2 --repetitions 4 --eval-samples 1000",
      "count-paths --n 10 --beta 2.5 --w-min 1 --w-max 4 --trials 200 --kmax 5",
      "bounds --table recurrence --kmax 8 --dmax 8 --c1 1.1,1.5,2 --w-mins 1,2",
      "compare " + model + " --budget 3 --algos none,saa-det,saa-rand,karger --samples 40 --eval-samples 2000",
  };
  int same = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path file = dir / ("run" + std::to_string(i) + "_" + std::to_string(rep));
      fs::remove(file);
      const std::string cmd = "\"" + tool + "\" " + commands[i] + " --seed 17 --no-timing -o \"" +
                              file.string() + "\" 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      outputs[rep] = rc == 0 ? slurp(file) : "";
    }
    if (!outputs[0].empty() && outputs[0] == outputs[1]) {
      ++same;
    } else if (first_bad.empty()) {
      first_bad = commands[i];
    }
  }
  const double total = static_cast<double>(commands.size());
  return {same == static_cast<int>(commands.size()),
          fmt("%.0f/%.0f commands byte-identical", same, total) +
              (first_bad.empty() ? "" : ", first mismatch: " + first_bad)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? argv[1] : "";
  std::printf("threads: %d\n", omp_get_max_threads());
  std::fflush(stdout);

  std::vector<DeskInstance> desk;
  std::vector<PathModel> paths;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"percolation oracle equivalence", percolation_oracle},
      {"LP relaxation soundness", [&] { desk = desk_instances(); return lp_soundness(desk); }},
      {"deterministic rounding bounds", [&] { return deterministic_rounding(desk); }},
      {"randomized rounding budget tail", randomized_tail},
      {"SAA uniform accuracy", simultaneity},
      {"recurrence vs enumeration", recurrence_grid},
      {"path-count bound dominance", [&] { paths = path_models(); return path_bound(paths); }},
      {"path-count ratio monotone in k", [&] { return phase_ratio(paths); }},
      {"MinSBCC bicriteria contract", sbcc_contract},
      {"K40 sparsification end-to-end", karger_k40},
      {"node-removal variant", node_variant},
      {"determinism of CLI outputs", [&] { return determinism(tool); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s criterion %zu: %s | %s | %.1fs\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}

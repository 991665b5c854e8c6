#include <doctest.h>

#include <cmath>
#include <limits>
#include <queue>

#include "epictrl/error.hpp"
#include "epictrl/instances.hpp"
#include "epictrl/rng.hpp"
#include "epictrl/saa.hpp"
#include "helpers.hpp"

using namespace epictrl;

namespace {

SampleSet fixed_samples(const ContactNetwork& g, std::vector<std::vector<EdgeId>> kept) {
  SampleSet set{g, {}, 0, std::nullopt};
  for (std::size_t j = 0; j < kept.size(); ++j) {
    PercolationSample s;
    s.kept_edges = kept[j];
    s.sample_index = j;
    set.samples.push_back(s);
  }
  return set;
}

// Dijkstra over the kept edges of sample j. Edge mode charges x_e per edge,
// node mode charges x_v on entering v.
std::vector<double> distances(const SampleSet& set, const FractionalSolution& frac, std::size_t j) {
  const ContactNetwork& g = set.network;
  const std::size_t n = g.num_vertices();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj(n);
  for (EdgeId e : set.samples[j].kept_edges) {
    const Edge& edge = g.edge(e);
    if (edge.is_loop()) continue;
    adj[edge.u].push_back({edge.v, e});
    adj[edge.v].push_back({edge.u, e});
  }
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[g.source()] = 0;
  pq.push({0, g.source()});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (auto [w, e] : adj[v]) {
      const double step = frac.mode == RemovalMode::Edge ? frac.x[e] : frac.x[w];
      if (d + step < dist[w]) {
        dist[w] = d + step;
        pq.push({dist[w], w});
      }
    }
  }
  return dist;
}

FractionalSolution manual_frac(std::size_t n, std::vector<double> x, double budget) {
  FractionalSolution f;
  f.num_vertices = n;
  f.budget = budget;
  f.costs.assign(x.size(), 1.0);
  f.x = std::move(x);
  return f;
}

}  // namespace

TEST_CASE("sample_count examples") {
  CHECK(sample_count(10, 20, 0.5) == 2300);
  CHECK(sample_count(2, 1, 1 - 1e-9) == 17);
  CHECK_THROWS_AS(sample_count(10, 20, 0.0), ValidationError);
  CHECK_THROWS_AS(sample_count(10, 20, 1.0), ValidationError);
  CHECK_THROWS_AS(sample_count(1, 20, 0.5), ValidationError);
}

TEST_CASE("draw_samples") {
  const ContactNetwork full = testing::path3(1.0);
  const SampleSet one = draw_samples(full, 1, 4);
  CHECK(one.size() == 1);
  CHECK(one.samples[0].kept_edges == std::vector<EdgeId>{0, 1});

  const ContactNetwork single = testing::graph(2, {{0, 1}}, 0.3);
  const SampleSet many = draw_samples(single, 1000, 4);
  double present = 0;
  for (const auto& s : many.samples) present += static_cast<double>(s.kept_edges.size());
  CHECK(std::abs(present - 300) <= 4 * std::sqrt(1000 * 0.3 * 0.7));

  const SampleSet again = draw_samples(single, 1000, 4);
  for (std::size_t j = 0; j < 1000; ++j) CHECK(again.samples[j].kept_edges == many.samples[j].kept_edges);
  CHECK_THROWS_AS(draw_samples(single, 0, 4), ValidationError);
}

TEST_CASE("path LP hand solution") {
  const ContactNetwork g = testing::path3(1.0);
  const SampleSet set = fixed_samples(g, {{0, 1}});
  const LpModel model = build_lp(set, 1.0, RemovalMode::Edge);
  CHECK(model.objective_constant == 2.0);
  const FractionalSolution frac = solve_lp(model);
  CHECK(frac.status == FractionalSolution::Status::Optimal);
  CHECK(frac.objective == doctest::Approx(0.0));
  CHECK(frac.x[0] == doctest::Approx(1.0));
  CHECK(frac.x[1] == doctest::Approx(0.0));
  CHECK(frac.y_at(0, 0) == 0.0);
  CHECK(frac.y_at(0, 1) == doctest::Approx(1.0));
  CHECK(frac.y_at(0, 2) == doctest::Approx(1.0));

  const auto hits = hit_sets(frac, set, 0.5);
  CHECK(hits[0] == std::vector<VertexId>{1, 2});
  CHECK(hit_sets(frac, set, 1 - 1e-9)[0] == std::vector<VertexId>{1, 2});
}

TEST_CASE("empty samples give objective 0") {
  const ContactNetwork g = testing::path3(0.0);
  const SampleSet set = draw_samples(g, 5, 1);
  const LpModel model = build_lp(set, 1.0, RemovalMode::Edge);
  CHECK(model.scenarios.size() == 1);
  const FractionalSolution frac = solve_lp(model);
  CHECK(frac.objective == 0.0);
  CHECK(frac.x == std::vector<double>{0.0, 0.0});
  // disconnected vertices sit at y = 1
  CHECK(hit_sets(frac, set, 0.1)[0] == std::vector<VertexId>{1, 2});
}

TEST_CASE("budget below every cost hard-wires x to 0") {
  ContactNetwork g(4, {{0, 1, 2.0, 0.6}, {1, 2, 3.0, 0.6}, {0, 3, 2.5, 0.6}}, 0);
  const SampleSet set = draw_samples(g, 40, 2);
  const LpModel model = build_lp(set, 1.0, RemovalMode::Edge);
  CHECK(model.decision_ids.empty());
  const FractionalSolution frac = solve_lp(model);
  CHECK(frac.objective == doctest::Approx(empirical_h(set.samples, g, no_intervention()) - 1.0));
}

TEST_CASE("build_lp errors") {
  const ContactNetwork g = testing::path3(0.5);
  const SampleSet set = draw_samples(g, 3, 1);
  CHECK_THROWS_AS(build_lp(set, 0.0, RemovalMode::Edge), ValidationError);
  CHECK_THROWS_AS(build_lp(set, -1.0, RemovalMode::Node), ValidationError);
  const std::vector<VertexId> seeds{0};
  ContactNetwork meta_only = merge_seeds(ContactNetwork(1, {}, 0), seeds);
  CHECK_THROWS_AS(build_lp(draw_samples(meta_only, 2, 0), 1.0, RemovalMode::Edge), ValidationError);

  const ContactNetwork big = random_instance({40, 200, 0.9, 1.0, 1, true}, 1);
  CHECK_THROWS_AS(build_lp(draw_samples(big, 200, 0), 5.0, RemovalMode::Edge), TooLargeError);
}

TEST_CASE("meta-source edges are never variables") {
  const ContactNetwork base = testing::graph(4, {{0, 1}, {1, 2}, {2, 3}}, 0.8);
  const std::vector<VertexId> seeds{0, 3};
  const ContactNetwork g = merge_seeds(base, seeds);
  const LpModel model = build_lp(draw_samples(g, 10, 1), 2.0, RemovalMode::Edge);
  for (std::uint32_t id : model.decision_ids) CHECK(std::isfinite(g.edge(id).cost));
  const LpModel nodes = build_lp(draw_samples(g, 10, 1), 2.0, RemovalMode::Node);
  for (std::uint32_t id : nodes.decision_ids) CHECK(id != g.source());
}

TEST_CASE("compact LP reproduces shortest-path y") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const RemovalMode mode = seed % 2 ? RemovalMode::Node : RemovalMode::Edge;
    const ContactNetwork g = random_instance({8, 13, 0.3, 0.9, 3, true}, seed);
    const SampleSet set = draw_samples(g, 15, seed);
    const FractionalSolution frac = solve_lp(build_lp(set, 2.0, mode));
    REQUIRE(frac.status == FractionalSolution::Status::Optimal);
    CHECK(frac.budget_violation <= 1e-7);
    double objective = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      const std::vector<double> dist = distances(set, frac, j);
      for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (v == g.source()) continue;
        CHECK(frac.y_at(j, v) == doctest::Approx(std::min(1.0, dist[v])).epsilon(1e-6));
        objective += 1.0 - frac.y_at(j, v);
      }
    }
    CHECK(frac.objective == doctest::Approx(objective / static_cast<double>(set.size())).epsilon(1e-7));
    CHECK(frac.objective >= -1e-9);
    CHECK(frac.objective <= static_cast<double>(g.num_vertices() - 1) + 1e-9);
  }
}

TEST_CASE("LP relaxation lower-bounds every feasible integral set") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RemovalMode mode = seed % 2 ? RemovalMode::Node : RemovalMode::Edge;
    const ContactNetwork g = random_instance({7, 10, 0.3, 0.9, 2, true}, 50 + seed);
    const SampleSet set = draw_samples(g, 20, seed);
    const FractionalSolution frac = solve_lp(build_lp(set, 2.0, mode));
    const BruteForceResult brute = brute_force_optimum(set, 2.0, mode);
    CHECK(frac.objective + 1.0 <= brute.h + 1e-6);
  }
}

TEST_CASE("round_deterministic threshold") {
  CHECK(deterministic_threshold(8) == doctest::Approx(1.0 / 16));
  const Intervention f = round_deterministic(manual_frac(8, {0.07, 0.06, 0.0625}, 1.0));
  CHECK(f.members == std::vector<std::uint32_t>{0, 2});
  CHECK(f.provenance == "saa-deterministic");
  CHECK(round_deterministic(manual_frac(8, {0, 0, 0}, 1.0)).members.empty());
  CHECK(round_deterministic(manual_frac(8, {1, 1, 1}, 3.0)).members.size() == 3);
  // cost over 4 n^(2/3) B is a hard failure
  CHECK_THROWS_AS(round_deterministic(manual_frac(8, std::vector<double>(20, 1.0), 1.0)), SolverError);
}

TEST_CASE("round_randomized probabilities") {
  CHECK(round_randomized(manual_frac(100, {0.0, 0.0}, 1.0), 2, 0.5, 1).members.empty());
  CHECK(round_randomized(manual_frac(100, {0.5, 1.0}, 1.0), 2, 0.5, 1).members.size() == 2);
  CHECK_THROWS_AS(round_randomized(manual_frac(100, {0.5}, 1.0), 1.0, 0.5, 1), ValidationError);

  // x = 0.01, gamma = 2, eps = 0.5, n = 100 -> 7 * 0.01 * ln 100 / 0.5
  const double expected = 7 * 0.01 * std::log(100.0) / 0.5;
  CHECK(expected == doctest::Approx(0.644724).epsilon(1e-6));
  const int draws = 20000;
  int hits = 0;
  for (int s = 0; s < draws; ++s)
    hits += static_cast<int>(round_randomized(manual_frac(100, {0.01}, 1.0), 2, 0.5, s).members.size());
  CHECK(std::abs(hits / double(draws) - expected) <= 4 * std::sqrt(expected * (1 - expected) / draws));
}

TEST_CASE("randomized rounding breaks heavy paths") {
  // 30 edges at x' = 7 * 0.02 * ln 4 / 0.5 each; sum exceeds (gamma + 5) ln n
  const std::size_t len = 30;
  const double x_prime = 7 * 0.02 * std::log(4.0) / 0.5;
  REQUIRE(x_prime < 1.0);
  REQUIRE(len * x_prime >= 7 * std::log(4.0));
  const FractionalSolution frac = manual_frac(4, std::vector<double>(len, 0.02), 1.0);
  const int draws = 10000;
  int survived = 0;
  for (int s = 0; s < draws; ++s) survived += round_randomized(frac, 2, 0.5, s).members.empty();
  const double bound = std::exp(-static_cast<double>(len) * x_prime);
  CHECK(survived / double(draws) <= bound + 3 * std::sqrt(bound * (1 - bound) / draws) + 1.0 / draws);
}

TEST_CASE("brute force examples") {
  const ContactNetwork star = testing::star4(1.0);
  const SampleSet set = draw_samples(star, 1, 0);
  const BruteForceResult two = brute_force_optimum(set, 2.0, RemovalMode::Edge);
  CHECK(two.h == 3.0);
  CHECK(two.best.members == std::vector<std::uint32_t>{0, 1});
  const BruteForceResult none = brute_force_optimum(set, 0.0, RemovalMode::Edge);
  CHECK(none.best.members.empty());
  CHECK(none.h == 5.0);
  CHECK(brute_force_optimum(set, 4.0, RemovalMode::Edge).h == 1.0);

  const ContactNetwork path = testing::path3(1.0);
  const BruteForceResult node = brute_force_optimum(draw_samples(path, 1, 0), 1.0, RemovalMode::Node);
  CHECK(node.h == 1.0);
  CHECK(node.best.members == std::vector<std::uint32_t>{1});
  CHECK(node.best.kind == InterventionKind::NodeRemoval);
}

TEST_CASE("brute force caps") {
  const ContactNetwork big = testing::complete(8, 0.5);  // 28 edges
  CHECK_THROWS_AS(brute_force_optimum(draw_samples(big, 2, 0), 1.0, RemovalMode::Edge), TooLargeError);
  const ContactNetwork many = random_instance({21, 25, 0.5, 0.5, 1, true}, 0);
  CHECK_THROWS_AS(brute_force_optimum(draw_samples(many, 2, 0), 1.0, RemovalMode::Node), TooLargeError);
}

TEST_CASE("brute force parallel matches serial reference") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const RemovalMode mode = seed % 2 ? RemovalMode::Node : RemovalMode::Edge;
    const ContactNetwork g = random_instance({8, 12, 0.2, 0.9, 3, true}, seed);
    const SampleSet set = draw_samples(g, 25, seed);
    const BruteForceResult a = brute_force_optimum(set, 3.0, mode);
    const BruteForceResult b = serial::brute_force_optimum(set, 3.0, mode);
    CHECK(a.best.members == b.best.members);
    CHECK(a.h == b.h);
    CHECK(a.best.cost <= 3.0);
  }
}

TEST_CASE("solve_saa on a p = 1 network isolates the source") {
  const ContactNetwork g = testing::graph(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}}, 1.0);
  SaaConfig cfg;
  cfg.budget = 2.0;
  cfg.num_samples = 3;
  cfg.eval_samples = 100;
  const SaaOutcome out = solve_saa(g, cfg);
  CHECK(out.report.empirical_h == 1.0);
  CHECK(out.report.fresh_mc_mean == 1.0);
  CHECK(out.intervention.members == std::vector<std::uint32_t>{0, 1});
  CHECK(out.report.distinct_scenarios == 1);
  CHECK_FALSE(out.report.warnings.empty());
}

TEST_CASE("solve_saa randomized budget tail") {
  const ContactNetwork g = random_instance({10, 15, 0.2, 0.7, 1, true}, 4);
  SaaConfig cfg;
  cfg.budget = 2.0;
  cfg.epsilon = 0.3;
  cfg.gamma = 2.0;
  cfg.rounding = Rounding::Randomized;
  cfg.num_samples = 40;
  cfg.eval_samples = 10;
  const FractionalSolution frac = solve_lp(build_lp(draw_samples(g, 40, 0), cfg.budget, RemovalMode::Edge));
  const double cap = 6 * 7 * std::log(10.0) / 0.3 * cfg.budget;
  int within = 0;
  for (int s = 0; s < 200; ++s) within += round_randomized(frac, 2, 0.3, s).cost <= cap;
  CHECK(within >= 190);
}

TEST_CASE("solve_saa with zero budget") {
  const ContactNetwork g = random_instance({8, 12, 0.3, 0.8, 1, true}, 2);
  SaaConfig cfg;
  cfg.budget = 0.0;
  cfg.mode = RemovalMode::Node;
  cfg.num_samples = 50;
  cfg.eval_samples = 100;
  const SaaOutcome out = solve_saa(g, cfg);
  CHECK(out.intervention.members.empty());
  CHECK(out.intervention.kind == InterventionKind::NodeRemoval);
  CHECK(out.report.lp_objective + 1.0 == doctest::Approx(out.report.empirical_h));
  CHECK_FALSE(out.fractional.has_value());
}

TEST_CASE("solve_saa is deterministic") {
  const ContactNetwork g = random_instance({9, 14, 0.3, 0.8, 2, true}, 3);
  SaaConfig cfg;
  cfg.budget = 3.0;
  cfg.rounding = Rounding::Randomized;
  cfg.num_samples = 30;
  cfg.eval_samples = 500;
  cfg.seed = 11;
  const SaaOutcome a = solve_saa(g, cfg);
  const SaaOutcome b = solve_saa(g, cfg);
  CHECK(a.intervention.members == b.intervention.members);
  CHECK(a.report.lp_objective == b.report.lp_objective);
  CHECK(a.report.fresh_mc_mean == b.report.fresh_mc_mean);
  CHECK(a.report.n_samples_theory == sample_count(9, 14, 0.3));
}

TEST_CASE("hit_sets validates") {
  const ContactNetwork g = testing::path3(1.0);
  const SampleSet set = fixed_samples(g, {{0, 1}});
  const FractionalSolution frac = solve_lp(build_lp(set, 1.0, RemovalMode::Edge));
  CHECK_THROWS_AS(hit_sets(frac, set, 0.0), ValidationError);
  const SampleSet other = fixed_samples(g, {{0}, {1}});
  CHECK_THROWS_AS(hit_sets(frac, other, 0.5), ValidationError);
}

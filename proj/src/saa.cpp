#include "epictrl/saa.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "epictrl/error.hpp"
#include "epictrl/reach.hpp"
#include "epictrl/rng.hpp"

namespace epictrl {

const char* to_string(RemovalMode mode) {
  return mode == RemovalMode::Edge ? "edge" : "node";
}

const char* to_string(Rounding rounding) {
  return rounding == Rounding::Randomized ? "randomized" : "deterministic";
}

std::uint64_t sample_count(std::size_t n, std::size_t m, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (n < 2) throw ValidationError("sample_count needs n >= 2");
  if (m < 1) throw ValidationError("sample_count needs m >= 1");
  const double nn = static_cast<double>(n);
  const double log_term = 2.0 * std::log(nn) + (static_cast<double>(m) + 1.0) * std::log(2.0);
  return static_cast<std::uint64_t>(std::ceil(3.0 * nn / (epsilon * epsilon) * log_term));
}

SampleSet draw_samples(const ContactNetwork& network, std::uint64_t num_samples,
                       std::uint64_t seed) {
  if (num_samples == 0) throw ValidationError("need at least one sample");
  SampleSet set{network, std::vector<PercolationSample>(num_samples), seed, std::nullopt};
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(num_samples); ++j)
    set.samples[j] = sample_subgraph(network, seed, static_cast<std::uint64_t>(j));
  return set;
}

namespace {

bool within_budget(double cost, double budget) {
  return cost <= budget + 1e-9 * std::max(1.0, budget);
}

}  // namespace

LpModel build_lp(const SampleSet& samples, double budget, RemovalMode mode) {
  if (!(budget > 0.0)) throw ValidationError("budget must be positive");
  if (samples.samples.empty()) throw ValidationError("empty sample set");
  const ContactNetwork& g = samples.network;
  const std::size_t n = g.num_vertices();
  const VertexId s = g.source();

  LpModel model;
  model.mode = mode;
  model.budget = budget;
  model.num_vertices = n;
  model.source = s;
  model.num_samples = samples.size();

  // Decision variables.
  std::vector<std::ptrdiff_t> x_var;
  bool any_removable = false;
  if (mode == RemovalMode::Edge) {
    x_var.assign(g.num_edges(), -1);
    model.id_costs.resize(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const Edge& edge = g.edge(static_cast<EdgeId>(e));
      model.id_costs[e] = edge.cost;
      if (edge.is_loop() || std::isinf(edge.cost)) continue;
      any_removable = true;
      if (edge.cost > budget) continue;
      x_var[e] = static_cast<std::ptrdiff_t>(model.problem.add_variable(0.0, 1.0));
      model.decision_ids.push_back(static_cast<std::uint32_t>(e));
      model.decision_costs.push_back(edge.cost / budget);
    }
  } else {
    x_var.assign(n, -1);
    model.id_costs.assign(g.vertex_costs().begin(), g.vertex_costs().end());
    for (std::size_t v = 0; v < n; ++v) {
      const double c = g.vertex_cost(static_cast<VertexId>(v));
      if (v == s || std::isinf(c)) continue;
      any_removable = true;
      if (c > budget) continue;
      x_var[v] = static_cast<std::ptrdiff_t>(model.problem.add_variable(0.0, 1.0));
      model.decision_ids.push_back(static_cast<std::uint32_t>(v));
      model.decision_costs.push_back(c / budget);
    }
  }
  if (!any_removable) throw ValidationError("network has no removable elements");

  model.budget_row = model.problem.add_row(1.0);
  for (std::size_t i = 0; i < model.decision_ids.size(); ++i)
    model.problem.add_coefficient(model.budget_row, i, model.decision_costs[i]);

  // Group samples by the edge set of their source component.
  Reacher reacher(g);
  EdgeMask mask(g.num_edges(), 0);
  std::map<std::vector<EdgeId>, std::size_t> index;
  std::vector<std::size_t> multiplicity;
  model.scenario_of_sample.resize(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto& kept = samples.samples[j].kept_edges;
    for (EdgeId e : kept) mask[e] = 1;
    reacher.count(mask.data());
    std::vector<EdgeId> inside;
    for (EdgeId e : kept) {
      const Edge& edge = g.edge(e);
      if (!edge.is_loop() && reacher.reached(edge.u)) inside.push_back(e);
    }
    std::vector<VertexId> verts;
    for (VertexId v : reacher.visited())
      if (v != s) verts.push_back(v);
    for (EdgeId e : kept) mask[e] = 0;

    auto [it, inserted] = index.emplace(inside, model.scenarios.size());
    if (inserted) {
      std::sort(verts.begin(), verts.end());
      model.scenarios.push_back({0.0, std::move(verts), 0, std::move(inside)});
      multiplicity.push_back(0);
    }
    ++multiplicity[it->second];
    model.scenario_of_sample[j] = it->second;
  }

  const double inv_n = 1.0 / static_cast<double>(samples.size());
  std::size_t rows = 1;
  for (const auto& sc : model.scenarios) rows += 2 * sc.edges.size();
  if (rows > kMaxLpRows)
    throw TooLargeError("LP would need about " + std::to_string(rows) +
                        " rows; reduce the sample count");

  std::vector<std::ptrdiff_t> d_var(n, -1);
  for (std::size_t k = 0; k < model.scenarios.size(); ++k) {
    auto& sc = model.scenarios[k];
    sc.weight = static_cast<double>(multiplicity[k]) * inv_n;
    model.objective_constant += sc.weight * static_cast<double>(sc.vertices.size());
    sc.first_variable = model.problem.num_variables();
    for (VertexId v : sc.vertices)
      d_var[v] = static_cast<std::ptrdiff_t>(model.problem.add_variable(-sc.weight, 1.0));

    // d_to <= d_from + x  for every kept edge direction; d_s is the constant 0.
    auto add_arc = [&](VertexId from, VertexId to, EdgeId e) {
      if (to == s) return;
      const std::size_t row = model.problem.add_row(0.0);
      model.problem.add_coefficient(row, static_cast<std::size_t>(d_var[to]), 1.0);
      if (from != s)
        model.problem.add_coefficient(row, static_cast<std::size_t>(d_var[from]), -1.0);
      const std::ptrdiff_t x = mode == RemovalMode::Edge ? x_var[e] : x_var[to];
      if (x >= 0) model.problem.add_coefficient(row, static_cast<std::size_t>(x), -1.0);
    };
    for (EdgeId e : sc.edges) {
      const Edge& edge = g.edge(e);
      add_arc(edge.u, edge.v, e);
      add_arc(edge.v, edge.u, e);
    }
    for (VertexId v : sc.vertices) d_var[v] = -1;
  }
  return model;
}

FractionalSolution solve_lp(const LpModel& model, const lp::Options& options) {
  const lp::Result result = lp::solve(model.problem, options);

  FractionalSolution frac;
  frac.mode = model.mode;
  frac.num_vertices = model.num_vertices;
  frac.num_samples = model.num_samples;
  frac.budget = model.budget;
  frac.costs = model.id_costs;
  frac.x.assign(model.id_costs.size(), 0.0);
  frac.iterations = result.iterations;
  frac.status = result.status == lp::Status::Optimal ? FractionalSolution::Status::Optimal
                                                     : FractionalSolution::Status::IterationLimit;
  double normalized_cost = 0.0;
  for (std::size_t i = 0; i < model.decision_ids.size(); ++i) {
    frac.x[model.decision_ids[i]] = result.x[i];
    normalized_cost += model.decision_costs[i] * result.x[i];
  }
  frac.budget_violation = std::max(0.0, normalized_cost - 1.0);

  const std::size_t n = model.num_vertices;
  frac.y.assign(model.num_samples * n, 1.0);
  detail::CompensatedSum objective;
  for (std::size_t j = 0; j < model.num_samples; ++j) {
    const auto& sc = model.scenarios[model.scenario_of_sample[j]];
    frac.y[j * n + model.source] = 0.0;
    for (std::size_t i = 0; i < sc.vertices.size(); ++i) {
      const double d = result.x[sc.first_variable + i];
      frac.y[j * n + sc.vertices[i]] = d;
      objective.add(1.0 - d);
    }
  }
  frac.objective = objective.value() / static_cast<double>(model.num_samples);
  return frac;
}

double deterministic_threshold(std::size_t n) {
  const double root = std::cbrt(static_cast<double>(n));
  return 1.0 / (4.0 * root * root);
}

namespace {

Intervention make_intervention(RemovalMode mode, std::vector<std::uint32_t> members,
                               const std::vector<double>& costs, std::string provenance) {
  Intervention out;
  out.kind = mode == RemovalMode::Edge ? InterventionKind::EdgeRemoval
                                       : InterventionKind::NodeRemoval;
  out.members = std::move(members);
  for (std::uint32_t id : out.members) out.cost += costs[id];
  out.provenance = std::move(provenance);
  return out;
}

}  // namespace

Intervention round_randomized(const FractionalSolution& frac, double gamma, double epsilon,
                              std::uint64_t seed) {
  if (!(gamma > 1.0)) throw ValidationError("gamma must be > 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  const double inflation =
      (gamma + 5.0) * std::log(static_cast<double>(frac.num_vertices)) / epsilon;
  std::vector<std::uint32_t> picked;
  for (std::size_t id = 0; id < frac.x.size(); ++id) {
    const double prob = std::min(inflation * frac.x[id], 1.0);
    if (prob > 0.0 && rng::bernoulli(prob, seed, rng::Stream::Rounding, 0, id))
      picked.push_back(static_cast<std::uint32_t>(id));
  }
  return make_intervention(frac.mode, std::move(picked), frac.costs, "saa-randomized");
}

Intervention round_deterministic(const FractionalSolution& frac) {
  const double threshold = deterministic_threshold(frac.num_vertices);
  std::vector<std::uint32_t> picked;
  for (std::size_t id = 0; id < frac.x.size(); ++id)
    if (frac.x[id] >= threshold) picked.push_back(static_cast<std::uint32_t>(id));
  Intervention out = make_intervention(frac.mode, std::move(picked), frac.costs,
                                       "saa-deterministic");
  const double limit = frac.budget / threshold;
  if (out.cost > limit * (1.0 + 1e-7) + 1e-9)
    throw SolverError("deterministic rounding exceeded 4 n^(2/3) B");
  return out;
}

namespace {

struct Candidates {
  std::vector<std::uint32_t> ids;  // ascending
  std::vector<double> costs;
};

Candidates brute_force_candidates(const SampleSet& samples, double budget, RemovalMode mode) {
  const ContactNetwork& g = samples.network;
  Candidates c;
  if (mode == RemovalMode::Edge) {
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const Edge& edge = g.edge(static_cast<EdgeId>(e));
      if (edge.is_loop() || !within_budget(edge.cost, budget)) continue;
      c.ids.push_back(static_cast<std::uint32_t>(e));
      c.costs.push_back(edge.cost);
    }
    if (c.ids.size() > kBruteForceCap)
      throw TooLargeError("brute force is capped at " + std::to_string(kBruteForceCap) +
                          " removable edges");
  } else {
    if (g.num_vertices() > kBruteForceCap)
      throw TooLargeError("node brute force is capped at " +
                          std::to_string(kBruteForceCap) + " vertices");
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      const double cost = g.vertex_cost(static_cast<VertexId>(v));
      if (v == g.source() || !within_budget(cost, budget)) continue;
      c.ids.push_back(static_cast<std::uint32_t>(v));
      c.costs.push_back(cost);
    }
  }
  return c;
}

std::vector<std::uint32_t> members_of(const Candidates& c, std::uint64_t subset) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < c.ids.size(); ++i)
    if ((subset >> i) & 1U) out.push_back(c.ids[i]);
  return out;
}

struct Best {
  std::uint64_t total = ~std::uint64_t{0};
  std::vector<std::uint32_t> members;
  bool found = false;

  void offer(std::uint64_t t, std::vector<std::uint32_t> m) {
    if (!found || t < total || (t == total && m < members)) {
      total = t;
      members = std::move(m);
      found = true;
    }
  }
};

BruteForceResult finish(const SampleSet& samples, RemovalMode mode, const Best& best) {
  const ContactNetwork& g = samples.network;
  BruteForceResult out;
  std::vector<double> costs;
  if (mode == RemovalMode::Edge) {
    for (const Edge& e : g.edges()) costs.push_back(e.cost);
  } else {
    costs.assign(g.vertex_costs().begin(), g.vertex_costs().end());
  }
  out.best = make_intervention(mode, best.members, costs, "brute-force");
  out.h = static_cast<double>(best.total) / static_cast<double>(samples.size());
  return out;
}

}  // namespace

BruteForceResult brute_force_optimum(const SampleSet& samples, double budget,
                                     RemovalMode mode) {
  if (samples.samples.empty()) throw ValidationError("empty sample set");
  const ContactNetwork& g = samples.network;
  const Candidates cand = brute_force_candidates(samples, budget, mode);
  const std::size_t m = g.num_edges();

  std::vector<std::uint8_t> sample_masks(samples.size() * m, 0);
  for (std::size_t j = 0; j < samples.size(); ++j)
    for (EdgeId e : samples.samples[j].kept_edges) sample_masks[j * m + e] = 1;

  const std::uint64_t subsets = std::uint64_t{1} << cand.ids.size();
  Best best;
#pragma omp parallel
  {
    Best local;
    Reacher reacher(g);
    EdgeMask residual(m);
    std::vector<std::uint8_t> removed(g.num_vertices());
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t sub = 0; sub < static_cast<std::int64_t>(subsets); ++sub) {
      double cost = 0.0;
      for (std::size_t i = 0; i < cand.ids.size(); ++i)
        if ((sub >> i) & 1) cost += cand.costs[i];
      if (!within_budget(cost, budget)) continue;

      std::fill(residual.begin(), residual.end(), 1);
      if (mode == RemovalMode::Edge) {
        for (std::size_t i = 0; i < cand.ids.size(); ++i)
          if ((sub >> i) & 1) residual[cand.ids[i]] = 0;
      } else {
        std::fill(removed.begin(), removed.end(), 0);
        for (std::size_t i = 0; i < cand.ids.size(); ++i)
          if ((sub >> i) & 1) removed[cand.ids[i]] = 1;
        for (std::size_t e = 0; e < m; ++e) {
          const Edge& edge = g.edge(static_cast<EdgeId>(e));
          if (removed[edge.u] || removed[edge.v]) residual[e] = 0;
        }
      }
      std::uint64_t total = 0;
      for (std::size_t j = 0; j < samples.size() && total <= local.total; ++j)
        total += reacher.count(sample_masks.data() + j * m, residual.data());
      if (total <= local.total) local.offer(total, members_of(cand, static_cast<std::uint64_t>(sub)));
    }
#pragma omp critical
    if (local.found) best.offer(local.total, local.members);
  }
  return finish(samples, mode, best);
}

namespace serial {

BruteForceResult brute_force_optimum(const SampleSet& samples, double budget,
                                     RemovalMode mode) {
  if (samples.samples.empty()) throw ValidationError("empty sample set");
  const Candidates cand = brute_force_candidates(samples, budget, mode);
  Best best;
  const std::uint64_t subsets = std::uint64_t{1} << cand.ids.size();
  for (std::uint64_t sub = 0; sub < subsets; ++sub) {
    double cost = 0.0;
    for (std::size_t i = 0; i < cand.ids.size(); ++i)
      if ((sub >> i) & 1U) cost += cand.costs[i];
    if (!within_budget(cost, budget)) continue;
    auto members = members_of(cand, sub);
    Intervention f = mode == RemovalMode::Edge
                         ? make_edge_intervention(samples.network, members)
                         : make_node_intervention(samples.network, members);
    best.offer(empirical_total(samples.samples, samples.network, f), std::move(members));
  }
  return finish(samples, mode, best);
}

}  // namespace serial

std::vector<std::vector<VertexId>> hit_sets(const FractionalSolution& frac,
                                            const SampleSet& samples, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (samples.size() != frac.num_samples)
    throw ValidationError("sample set does not match the fractional solution");
  std::vector<std::vector<VertexId>> out(frac.num_samples);
  for (std::size_t j = 0; j < frac.num_samples; ++j)
    for (std::size_t v = 0; v < frac.num_vertices; ++v)
      if (frac.y_at(j, static_cast<VertexId>(v)) >= epsilon)
        out[j].push_back(static_cast<VertexId>(v));
  return out;
}

SaaOutcome solve_saa(const ContactNetwork& network, const SaaConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!(config.budget >= 0.0)) throw ValidationError("budget must be >= 0");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
    throw ValidationError("epsilon must lie in (0, 1)");
  if (config.rounding == Rounding::Randomized && !(config.gamma > 1.0))
    throw ValidationError("gamma must be > 1");
  if (config.eval_samples == 0) throw ValidationError("eval_samples must be >= 1");

  SaaOutcome out;
  SaaReport& report = out.report;
  report.rounding = config.rounding;
  report.mode = config.mode;
  report.budget = config.budget;
  report.n_samples_theory =
      sample_count(std::max<std::size_t>(network.num_vertices(), 2),
                   std::max<std::size_t>(network.num_edges(), 1), config.epsilon);
  report.n_samples = config.num_samples.value_or(report.n_samples_theory);
  if (report.n_samples == 0) throw ValidationError("sample count must be >= 1");
  if (report.n_samples < report.n_samples_theory)
    report.warnings.push_back("sample count " + std::to_string(report.n_samples) +
                              " is below the theoretical N = " +
                              std::to_string(report.n_samples_theory) +
                              "; approximation guarantees are void");

  SampleSet samples = draw_samples(network, report.n_samples, config.seed);
  if (!config.num_samples) samples.epsilon = config.epsilon;
  const InterventionKind kind = config.mode == RemovalMode::Edge
                                    ? InterventionKind::EdgeRemoval
                                    : InterventionKind::NodeRemoval;

  if (config.budget == 0.0) {
    out.intervention = no_intervention(kind);
    out.intervention.provenance = std::string("saa-") + to_string(config.rounding);
    report.lp_objective = empirical_h(samples.samples, network, out.intervention) - 1.0;
  } else {
    const LpModel model = build_lp(samples, config.budget, config.mode);
    report.distinct_scenarios = model.scenarios.size();
    FractionalSolution frac = solve_lp(model);
    report.lp_iterations = frac.iterations;
    if (frac.status != FractionalSolution::Status::Optimal)
      throw SolverError("LP solver hit its iteration limit");
    report.lp_objective = frac.objective;
    out.intervention =
        config.rounding == Rounding::Randomized
            ? round_randomized(frac, config.gamma, config.epsilon,
                               rng::derive(config.seed, rng::Stream::Rounding, 0))
            : round_deterministic(frac);
    out.fractional = std::move(frac);
  }

  report.cost = out.intervention.cost;
  report.cost_ratio = config.budget > 0.0 ? report.cost / config.budget : 0.0;
  report.empirical_h = empirical_h(samples.samples, network, out.intervention);
  const InfectionEstimate fresh =
      estimate_infections(network, out.intervention, config.eval_samples,
                          rng::derive(config.seed, rng::Stream::Evaluation, 0));
  report.fresh_mc_mean = fresh.mean;
  report.fresh_mc_half_width = fresh.half_width;
  report.runtime_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return out;
}

}  // namespace epictrl

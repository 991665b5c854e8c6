#include "epictrl/sbcc.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "epictrl/error.hpp"
#include "epictrl/maxflow.hpp"
#include "epictrl/percolate.hpp"
#include "epictrl/reach.hpp"
#include "epictrl/rng.hpp"

namespace epictrl {

namespace {

void check_h(const ContactNetwork& network, const EdgeMask& h_mask, VertexId source) {
  if (h_mask.size() != network.num_edges())
    throw ValidationError("edge mask size does not match the network");
  if (source >= network.num_vertices()) throw ValidationError("source out of range");
}

// The source component of H with a local numbering; local 0 is the source.
struct Component {
  std::vector<VertexId> vertices;
  std::vector<std::uint32_t> local;  // per global vertex, or npos
  std::vector<EdgeId> edges;         // non-loop H edges inside
  static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();
};

Component source_component(const ContactNetwork& g, const EdgeMask& h, VertexId s) {
  Reacher reacher(g);
  reacher.count_from(s, h.data());
  Component c;
  c.local.assign(g.num_vertices(), Component::npos);
  c.vertices.assign(reacher.visited().begin(), reacher.visited().end());
  for (std::size_t i = 0; i < c.vertices.size(); ++i)
    c.local[c.vertices[i]] = static_cast<std::uint32_t>(i);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edge(static_cast<EdgeId>(e));
    if (h[e] && !edge.is_loop() && c.local[edge.u] != Component::npos)
      c.edges.push_back(static_cast<EdgeId>(e));
  }
  return c;
}

SweepPoint make_point(const ContactNetwork& g, const Component& c,
                      const std::vector<std::uint8_t>& inside, double alpha) {
  SweepPoint p;
  p.alpha = alpha;
  for (std::size_t i = 0; i < c.vertices.size(); ++i)
    if (inside[i]) p.component.push_back(c.vertices[i]);
  std::sort(p.component.begin(), p.component.end());
  p.component_size = p.component.size();
  for (EdgeId e : c.edges) {
    const Edge& edge = g.edge(e);
    if (inside[c.local[edge.u]] != inside[c.local[edge.v]]) ++p.cut_size;
  }
  return p;
}

// Minimal minimizer of den * cut + num * (|S| - 1).
SweepPoint solve_at(const ContactNetwork& g, const Component& c, std::int64_t num,
                    std::int64_t den) {
  const std::size_t k = c.vertices.size();
  MaxFlow flow(k + 1);
  for (EdgeId e : c.edges) {
    const Edge& edge = g.edge(e);
    flow.add_arc(c.local[edge.u], c.local[edge.v], den);
    flow.add_arc(c.local[edge.v], c.local[edge.u], den);
  }
  for (std::size_t v = 1; v < k; ++v) flow.add_arc(v, k, num);
  flow.run(0, k);
  std::vector<std::uint8_t> side = flow.source_side();
  side.resize(k);
  return make_point(g, c, side, static_cast<double>(num) / static_cast<double>(den));
}

std::int64_t lagrangian(const SweepPoint& p, std::int64_t num, std::int64_t den) {
  return den * static_cast<std::int64_t>(p.cut_size) +
         num * static_cast<std::int64_t>(p.component_size - 1);
}

void refine(const ContactNetwork& g, const Component& c, const SweepPoint& a,
            const SweepPoint& b, std::vector<SweepPoint>& out) {
  // a has the smaller component and the larger cut.
  const auto num = static_cast<std::int64_t>(a.cut_size) - static_cast<std::int64_t>(b.cut_size);
  const auto den = static_cast<std::int64_t>(b.component_size) -
                   static_cast<std::int64_t>(a.component_size);
  if (num <= 0 || den <= 0) return;
  SweepPoint r = solve_at(g, c, num, den);
  if (lagrangian(r, num, den) >= lagrangian(a, num, den)) return;
  refine(g, c, a, r, out);
  out.push_back(r);
  refine(g, c, r, b, out);
}

}  // namespace

std::vector<SweepPoint> lagrangian_sweep(const ContactNetwork& network,
                                         const EdgeMask& h_mask, VertexId source) {
  check_h(network, h_mask, source);
  const Component c = source_component(network, h_mask, source);
  const std::size_t k = c.vertices.size();

  std::map<std::size_t, SweepPoint> by_size;
  by_size.emplace(k, make_point(network, c, std::vector<std::uint8_t>(k, 1), 0.0));
  if (k > 1) {
    std::vector<std::uint8_t> only_source(k, 0);
    only_source[0] = 1;
    SweepPoint iso = make_point(network, c, only_source, 0.0);
    iso.alpha = static_cast<double>(iso.cut_size) + 1.0;
    by_size.emplace(1, std::move(iso));

    const auto n = static_cast<std::int64_t>(network.num_vertices());
    const int top = static_cast<int>(std::ceil(2.0 * std::log2(static_cast<double>(n)))) + 4;
    for (int i = 0; i <= top; ++i) {
      SweepPoint p = solve_at(network, c, std::int64_t{1} << i, n);
      by_size.emplace(p.component_size, std::move(p));
    }
  }

  std::vector<SweepPoint> coarse;
  for (auto& [size, p] : by_size) coarse.push_back(std::move(p));
  std::vector<SweepPoint> hull;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (i > 0) refine(network, c, coarse[i - 1], coarse[i], hull);
    hull.push_back(coarse[i]);
  }
  return hull;
}

SbccSolution min_sbcc(const ContactNetwork& network, const EdgeMask& h_mask,
                      VertexId source, double budget, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must lie in (0, 1)");
  if (!(budget >= 0.0)) throw ValidationError("budget must be >= 0");
  const std::vector<SweepPoint> hull = lagrangian_sweep(network, h_mask, source);

  const double limit = budget / lambda;
  const SweepPoint* pick = nullptr;
  SbccSolution out;
  for (const SweepPoint& p : hull) {
    if (static_cast<double>(p.cut_size) <= limit + 1e-9) {
      pick = &p;
      break;
    }
  }
  if (!pick) {
    pick = &hull.back();
    out.status = SbccSolution::Status::FallbackSmallestCut;
  }

  out.component = pick->component;
  out.component_size = pick->component_size;
  out.cut_size = pick->cut_size;
  out.lambda = lambda;
  out.lagrange_alpha = pick->alpha;
  std::vector<std::uint8_t> in(network.num_vertices(), 0);
  for (VertexId v : out.component) in[v] = 1;
  for (std::size_t e = 0; e < network.num_edges(); ++e) {
    const Edge& edge = network.edge(static_cast<EdgeId>(e));
    if (h_mask[e] && in[edge.u] != in[edge.v]) out.cut_edges.push_back(static_cast<EdgeId>(e));
  }
  if (out.status == SbccSolution::Status::Qualified &&
      static_cast<double>(out.cut_size) > limit + 1e-9)
    throw SolverError("min_sbcc exceeded budget / lambda");
  return out;
}

SbccExact min_sbcc_exact(const ContactNetwork& network, const EdgeMask& h_mask,
                         VertexId source, double budget) {
  check_h(network, h_mask, source);
  if (!(budget >= 0.0)) throw ValidationError("budget must be >= 0");
  const Component c = source_component(network, h_mask, source);
  const std::size_t m = c.edges.size();
  if (m > kSbccExactCap)
    throw TooLargeError("min_sbcc_exact is capped at " + std::to_string(kSbccExactCap) +
                        " edges");
  const auto max_cut = static_cast<int>(std::floor(budget + 1e-9));

  Reacher reacher(network);
  EdgeMask residual(network.num_edges(), 1);
  SbccExact best;
  best.component_size = std::numeric_limits<std::size_t>::max();
  for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << m); ++sub) {
    if (std::popcount(sub) > max_cut) continue;
    for (std::size_t i = 0; i < m; ++i) residual[c.edges[i]] = ((sub >> i) & 1U) ? 0 : 1;
    const std::size_t size = reacher.count_from(source, h_mask.data(), residual.data());
    if (size > best.component_size) continue;
    std::vector<EdgeId> cut;
    for (std::size_t i = 0; i < m; ++i)
      if ((sub >> i) & 1U) cut.push_back(c.edges[i]);
    if (size < best.component_size || cut < best.cut_edges) {
      best.component_size = size;
      best.cut_edges = std::move(cut);
    }
  }
  return best;
}

KargerOutcome solve_karger(const ContactNetwork& network, const KargerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!network.unit_costs()) throw ValidationError("solve_karger requires unit edge costs");
  const std::optional<double> p = network.uniform_probability();
  if (!p) throw ValidationError("solve_karger requires a uniform probability");
  if (!(config.gamma > 2.0)) throw ValidationError("gamma must be > 2");
  if (!(config.lambda > 0.0 && config.lambda < 1.0))
    throw ValidationError("lambda must lie in (0, 1)");
  if (!(config.budget >= 0.0)) throw ValidationError("budget must be >= 0");
  if (config.eval_samples == 0) throw ValidationError("eval_samples must be >= 1");

  KargerOutcome out;
  KargerReport& report = out.report;
  const KargerRegime regime = karger_regime(network, 1.0);
  report.epsilon_regime = regime.epsilon;
  report.in_regime = regime.in_regime;
  report.c_min = regime.c_min;
  report.p = *p;
  report.sbcc_budget = config.gamma * config.budget * *p;
  report.lemma23_bound = regime.epsilon < 1.0
                             ? config.gamma / ((1.0 - regime.epsilon) * config.lambda) *
                                   config.budget
                             : std::numeric_limits<double>::infinity();
  if (!regime.in_regime) report.warnings.push_back("out-of-regime: guarantees void");

  const std::size_t n = network.num_vertices();
  const std::size_t reps =
      config.repetitions
          ? config.repetitions
          : std::max<std::size_t>(1, static_cast<std::size_t>(
                                         std::ceil(4.0 * std::log(static_cast<double>(n)))));
  const std::uint64_t eval_seed = rng::derive(config.seed, rng::Stream::Evaluation, 0);
  report.candidates.resize(reps);

  std::vector<std::string> errors(reps);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(reps); ++r) {
    try {
      EdgeMask h(network.num_edges());
      sample_mask(network, rng::derive(config.seed, rng::Stream::Karger, r), 0, h.data());
      const SbccSolution sol =
          min_sbcc(network, h, network.source(), report.sbcc_budget, config.lambda);
      KargerCandidate& cand = report.candidates[r];
      cand.component = sol.component;
      cand.component_size = sol.component_size;
      cand.sampled_cut = sol.cut_size;
      cand.status = sol.status;
      cand.edges = boundary_edges(network, sol.component);
      const Intervention f = make_edge_intervention(network, cand.edges, "karger");
      cand.cut_cost = f.cost;
      if (component_of(network, f).members != sol.component)
        throw SolverError("lifted cut does not reproduce the sampled component");
      const InfectionEstimate est =
          estimate_infections(network, f, config.eval_samples, eval_seed);
      cand.mc_mean = est.mean;
      cand.mc_half_width = est.half_width;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw SolverError(e);

  for (std::size_t r = 1; r < reps; ++r)
    if (report.candidates[r].mc_mean < report.candidates[report.chosen_index].mc_mean)
      report.chosen_index = r;
  out.intervention =
      make_edge_intervention(network, report.candidates[report.chosen_index].edges, "karger");
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

}  // namespace epictrl

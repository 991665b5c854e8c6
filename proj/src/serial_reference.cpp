// Plain single-threaded versions of the parallel kernels. They share no
// traversal code with the optimized paths so that agreement means something.

#include <cmath>
#include <queue>
#include <vector>

#include "epictrl/chunglu.hpp"
#include "epictrl/error.hpp"
#include "epictrl/percolate.hpp"
#include "epictrl/rng.hpp"
#include "epictrl/saa.hpp"

namespace epictrl::serial {

namespace {

std::size_t bfs_size(const ContactNetwork& network, const std::vector<bool>& alive) {
  std::vector<bool> seen(network.num_vertices(), false);
  std::queue<VertexId> frontier;
  frontier.push(network.source());
  seen[network.source()] = true;
  std::size_t count = 0;
  while (!frontier.empty()) {
    VertexId u = frontier.front();
    frontier.pop();
    ++count;
    for (std::size_t e = 0; e < network.num_edges(); ++e) {
      if (!alive[e]) continue;
      const Edge& edge = network.edge(static_cast<EdgeId>(e));
      if (edge.is_loop() || (edge.u != u && edge.v != u)) continue;
      VertexId w = edge.other(u);
      if (!seen[w]) {
        seen[w] = true;
        frontier.push(w);
      }
    }
  }
  return count;
}

std::vector<bool> alive_after(const ContactNetwork& network,
                              const Intervention& intervention) {
  std::vector<bool> alive(network.num_edges(), true);
  for (std::size_t e = 0; e < network.num_edges(); ++e) {
    const Edge& edge = network.edge(static_cast<EdgeId>(e));
    if (intervention.kind == InterventionKind::EdgeRemoval) {
      alive[e] = !intervention.contains(static_cast<EdgeId>(e));
    } else {
      alive[e] = !intervention.contains(edge.u) && !intervention.contains(edge.v);
    }
  }
  return alive;
}

}  // namespace

InfectionEstimate estimate_infections(const ContactNetwork& network,
                                      const Intervention& intervention,
                                      std::uint64_t num_samples,
                                      std::uint64_t seed) {
  if (num_samples == 0) throw ValidationError("num_samples must be >= 1");
  const std::vector<bool> residual = alive_after(network, intervention);
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
  for (std::uint64_t j = 0; j < num_samples; ++j) {
    std::vector<bool> alive = residual;
    for (std::size_t e = 0; e < network.num_edges(); ++e) {
      const double p = network.edge(static_cast<EdgeId>(e)).prob;
      if (!rng::bernoulli(p, seed, rng::Stream::Percolation, j, e)) alive[e] = false;
    }
    const std::uint64_t size = bfs_size(network, alive);
    sum += size;
    sum_sq += size * size;
  }
  return detail::summarize(sum, sum_sq, num_samples);
}

InfectionEstimate exact_expected_infections(const ContactNetwork& network,
                                            const Intervention& intervention) {
  const std::vector<bool> residual = alive_after(network, intervention);
  std::vector<EdgeId> random;
  for (std::size_t e = 0; e < network.num_edges(); ++e) {
    const Edge& edge = network.edge(static_cast<EdgeId>(e));
    if (residual[e] && !edge.is_loop() && edge.prob > 0.0 && edge.prob < 1.0)
      random.push_back(static_cast<EdgeId>(e));
  }
  if (random.size() > kExactEdgeCap)
    throw TooLargeError("exact enumeration exceeds the edge cap");

  detail::CompensatedSum total;
  const std::uint64_t patterns = std::uint64_t{1} << random.size();
  for (std::uint64_t pattern = 0; pattern < patterns; ++pattern) {
    std::vector<bool> alive = residual;
    for (std::size_t e = 0; e < network.num_edges(); ++e)
      if (network.edge(static_cast<EdgeId>(e)).prob <= 0.0) alive[e] = false;
    double weight = 1.0;
    for (std::size_t i = 0; i < random.size(); ++i) {
      const double p = network.edge(random[i]).prob;
      const bool keep = (pattern >> i) & 1U;
      alive[random[i]] = keep;
      weight *= keep ? p : 1.0 - p;
    }
    total.add(weight * static_cast<double>(bfs_size(network, alive)));
  }
  InfectionEstimate est;
  est.mean = total.value();
  est.exact = true;
  est.num_samples = patterns;
  return est;
}

}  // namespace epictrl::serial

#include "epictrl/instances.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "epictrl/error.hpp"
#include "epictrl/rng.hpp"

namespace epictrl {

ContactNetwork random_instance(const InstanceSpec& spec, std::uint64_t seed) {
  if (spec.n < 1) throw ValidationError("instance needs at least one vertex");
  if (!(spec.p_min >= 0.0 && spec.p_min <= spec.p_max && spec.p_max <= 1.0))
    throw ValidationError("need 0 <= p_min <= p_max <= 1");
  if (spec.max_cost < 1) throw ValidationError("max_cost must be >= 1");
  const std::size_t max_m = spec.n * (spec.n - 1) / 2;
  const std::size_t m = std::min(spec.m, max_m);

  std::uint64_t draw = 0;
  auto next = [&]() { return rng::uniform(seed, rng::Stream::Instance, 0, draw++); };
  auto pick = [&](std::size_t bound) {
    return std::min(bound - 1, static_cast<std::size_t>(next() * static_cast<double>(bound)));
  };

  std::set<std::pair<VertexId, VertexId>> used;
  std::vector<std::pair<VertexId, VertexId>> pairs;
  auto add = [&](std::size_t a, std::size_t b) {
    const std::pair<VertexId, VertexId> key{static_cast<VertexId>(std::min(a, b)),
                                            static_cast<VertexId>(std::max(a, b))};
    if (a == b || !used.insert(key).second) return false;
    pairs.emplace_back(static_cast<VertexId>(a), static_cast<VertexId>(b));
    return true;
  };
  if (spec.connected)
    for (std::size_t v = 1; v < spec.n && pairs.size() < m; ++v) add(pick(v), v);
  while (pairs.size() < m) add(pick(spec.n), pick(spec.n));

  std::vector<Edge> edges;
  for (auto [u, v] : pairs) {
    Edge e;
    e.u = u;
    e.v = v;
    e.prob = spec.p_min + (spec.p_max - spec.p_min) * next();
    e.cost = static_cast<double>(1 + pick(static_cast<std::size_t>(spec.max_cost)));
    edges.push_back(e);
  }
  return ContactNetwork(spec.n, std::move(edges), 0);
}

ContactNetwork complete_graph(std::size_t n, double p) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) edges.push_back({u, v, 1.0, p});
  return ContactNetwork(n, std::move(edges), 0);
}

}  // namespace epictrl

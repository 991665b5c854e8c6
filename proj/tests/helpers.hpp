#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "epictrl/network.hpp"

namespace testing {

using epictrl::ContactNetwork;
using epictrl::Edge;
using epictrl::VertexId;

inline ContactNetwork graph(std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& pairs,
                            double p = 1.0, VertexId source = 0) {
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v, 1.0, p});
  return ContactNetwork(n, std::move(edges), source);
}

// s-a-b
inline ContactNetwork path3(double p = 1.0) { return graph(3, {{0, 1}, {1, 2}}, p); }

// centre 0, leaves 1..4
inline ContactNetwork star4(double p = 1.0) {
  return graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, p);
}

inline ContactNetwork triangle(double p = 1.0) { return graph(3, {{0, 1}, {1, 2}, {0, 2}}, p); }

inline ContactNetwork complete(std::size_t n, double p = 1.0) {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  return graph(n, pairs, p);
}

// Component size of `from` using edges with keep[e] set, by repeated
// relaxation over the edge list.
inline std::size_t naive_component(const ContactNetwork& g, const std::vector<std::uint8_t>& keep,
                                   VertexId from) {
  std::vector<std::uint8_t> in(g.num_vertices(), 0);
  in[from] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (!keep[e]) continue;
      const Edge& edge = g.edge(static_cast<epictrl::EdgeId>(e));
      if (in[edge.u] != in[edge.v]) {
        in[edge.u] = in[edge.v] = 1;
        changed = true;
      }
    }
  }
  std::size_t count = 0;
  for (auto b : in) count += b;
  return count;
}

}  // namespace testing

#include <algorithm>
#include <limits>
#include <vector>

#include "epictrl/network.hpp"
#include "epictrl/reach.hpp"

namespace epictrl {

// Stoer-Wagner on a dense weight matrix; O(n^3), fine at desk scale.
double global_min_cut(const ContactNetwork& network) {
  const std::size_t n = network.num_vertices();
  if (n < 2) return 0.0;

  Reacher reacher(network);
  EdgeMask all = network.all_edges_mask();
  if (reacher.count_from(0, all.data()) != n) return 0.0;

  std::vector<double> w(n * n, 0.0);
  for (const Edge& e : network.edges()) {
    if (e.is_loop()) continue;
    w[e.u * n + e.v] += e.cost;
    w[e.v * n + e.u] += e.cost;
  }

  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;
  double best = std::numeric_limits<double>::infinity();

  std::vector<double> key(n);
  std::vector<std::uint8_t> added(n);
  while (active.size() > 1) {
    std::fill(key.begin(), key.end(), 0.0);
    std::fill(added.begin(), added.end(), 0);
    std::size_t prev = active[0];
    std::size_t last = active[0];
    for (std::size_t step = 0; step < active.size(); ++step) {
      std::size_t pick = n;
      for (std::size_t v : active) {
        if (added[v]) continue;
        if (pick == n || key[v] > key[pick]) pick = v;
      }
      added[pick] = 1;
      prev = last;
      last = pick;
      if (step + 1 == active.size()) {
        best = std::min(best, key[pick]);
        break;
      }
      for (std::size_t v : active)
        if (!added[v]) key[v] += w[pick * n + v];
    }
    // Merge `last` into `prev`.
    for (std::size_t v : active) {
      w[prev * n + v] += w[last * n + v];
      w[v * n + prev] = w[prev * n + v];
    }
    w[prev * n + prev] = 0.0;
    active.erase(std::find(active.begin(), active.end(), last));
  }
  return best;
}

}  // namespace epictrl

#pragma once

#include <cstdint>

#include "epictrl/network.hpp"

namespace epictrl {

struct InstanceSpec {
  std::size_t n = 8;
  std::size_t m = 12;       // clipped to n (n - 1) / 2
  double p_min = 0.1;
  double p_max = 0.9;
  int max_cost = 1;         // costs drawn uniformly from 1..max_cost
  bool connected = true;    // start from a random spanning tree
};

// Random simple graph with source 0. Edge order, probabilities and costs
// depend only on (spec, seed).
ContactNetwork random_instance(const InstanceSpec& spec, std::uint64_t seed);

// Complete graph K_n with unit costs and uniform p, source 0.
ContactNetwork complete_graph(std::size_t n, double p);

}  // namespace epictrl

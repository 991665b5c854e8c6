#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epictrl/network.hpp"

namespace epictrl {

struct SbccSolution {
  enum class Status { Qualified, FallbackSmallestCut };

  std::vector<EdgeId> cut_edges;     // F', boundary of component inside H
  std::vector<VertexId> component;   // S, ascending, contains the source
  std::size_t cut_size = 0;
  std::size_t component_size = 0;
  double lambda = 0.0;
  double lagrange_alpha = 0.0;
  Status status = Status::Qualified;
};

// One point of the Lagrangian sweep: the minimal source side of a minimum
// cut for cut_size + alpha * (component_size - 1).
struct SweepPoint {
  double alpha = 0.0;
  std::size_t cut_size = 0;
  std::size_t component_size = 0;
  std::vector<VertexId> component;
};

// Points on the lower convex hull of (component_size, cut_size) over all
// source sets of H, ordered by component size. H is the network restricted
// to edges with h_mask[e] != 0; costs and probabilities are ignored.
std::vector<SweepPoint> lagrangian_sweep(const ContactNetwork& network,
                                         const EdgeMask& h_mask, VertexId source);

// Bicriteria MinSBCC: cut_size <= budget / lambda and, whenever an exact
// optimum k exists at this budget, component_size <= k / (1 - lambda).
SbccSolution min_sbcc(const ContactNetwork& network, const EdgeMask& h_mask,
                      VertexId source, double budget, double lambda);

struct SbccExact {
  std::vector<EdgeId> cut_edges;
  std::size_t component_size = 0;
};

inline constexpr std::size_t kSbccExactCap = 20;

// Exhaustive minimum over edge subsets of H with at most floor(budget)
// edges; ties go to the lexicographically smallest edge list.
SbccExact min_sbcc_exact(const ContactNetwork& network, const EdgeMask& h_mask,
                         VertexId source, double budget);

struct KargerConfig {
  double budget = 1.0;
  double gamma = 4.0;
  double lambda = 0.5;
  std::size_t repetitions = 0;  // 0 = ceil(4 ln n)
  std::uint64_t eval_samples = 10000;
  std::uint64_t seed = 0;
};

struct KargerCandidate {
  std::vector<EdgeId> edges;          // F-bar in the original graph
  std::vector<VertexId> component;    // S
  std::size_t sampled_cut = 0;        // |F'|
  SbccSolution::Status status = SbccSolution::Status::Qualified;
  double cut_cost = 0.0;
  std::size_t component_size = 0;
  double mc_mean = 0.0;
  double mc_half_width = 0.0;
};

struct KargerReport {
  std::vector<KargerCandidate> candidates;
  std::size_t chosen_index = 0;
  double epsilon_regime = 0.0;
  bool in_regime = false;
  double c_min = 0.0;
  double p = 0.0;
  double sbcc_budget = 0.0;       // gamma * B * p
  double lemma23_bound = 0.0;     // gamma / ((1 - eps) lambda) * B, inf when eps >= 1
  std::vector<std::string> warnings;
  double runtime_ms = 0.0;
};

struct KargerOutcome {
  Intervention intervention;
  KargerReport report;
};

// Sample H, solve MinSBCC with budget gamma B p, lift the cut back to G,
// repeat, and keep the candidate with the fewest estimated infections.
// Requires unit costs and a uniform probability.
KargerOutcome solve_karger(const ContactNetwork& network, const KargerConfig& config);

}  // namespace epictrl

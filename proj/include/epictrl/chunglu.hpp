#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "epictrl/network.hpp"

namespace epictrl {

// Power-law Chung-Lu model: n_i vertices of weight i for i in
// [w_min, w_max], n_i proportional to n / i^beta, and edge (u, v) present
// with probability q_uv = w_u w_v / sum_r w_r (self-loops included).
struct ChungLuModel {
  std::size_t n = 0;
  double beta = 0.0;
  int w_min = 1;
  int w_max = 1;
  std::vector<std::size_t> class_sizes;  // class_sizes[i - w_min] = n_i
  std::vector<int> weights;              // per vertex, ascending by id
  double total_weight = 0.0;

  std::size_t class_size(int weight) const;
  double c1() const { return beta - 2.0; }
  bool supercritical_safe() const { return beta > 3.0; }
  // m as the expected edge count, sum_v w_v / 2.
  double expected_edges() const { return total_weight / 2.0; }
  double q(VertexId u, VertexId v) const;
};

// Largest-remainder apportionment of n over the weight classes, then any
// empty class takes one vertex from the largest class. Throws when
// beta <= 2, the range is empty, n is smaller than the number of classes,
// or w_max^2 > sum_r w_r (q would exceed 1).
ChungLuModel build_model(std::size_t n, double beta, int w_min, int w_max);

// {"n": .., "beta": .., "w_min": .., "w_max": ..}
ChungLuModel parse_model_json(const std::string& text);
std::string model_to_json(const ChungLuModel& model);

// Draws every unordered pair u <= v independently. Costs are 1 and
// probabilities 1 (callers set p); vertex 0 is the source.
ContactNetwork generate(const ChungLuModel& model, std::uint64_t seed);

struct PathCensus {
  enum class Mode { Exact, Estimated };

  std::vector<double> counts;       // counts[k - 1] = l_k
  std::vector<double> half_widths;  // zero in exact mode
  double total = 0.0;               // sum over k = 1..k_max
  double total_half_width = 0.0;
  std::uint64_t trials = 0;
  Mode mode = Mode::Exact;

  std::size_t k_max() const { return counts.size(); }
};

inline constexpr std::size_t kPathCountVertexCap = 12;

// Exact number of undirected simple paths of each length 1..k_max (each
// unordered vertex sequence once, self-loops ignored).
PathCensus count_simple_paths(const ContactNetwork& network, std::size_t k_max);
PathCensus count_simple_paths(const ContactNetwork& network, const EdgeMask& keep,
                              std::size_t k_max);

// Per trial: generate a graph, percolate it with uniform p, count paths.
// Trials run in parallel; the result is identical to serial::estimate_gamma.
PathCensus estimate_gamma(const ChungLuModel& model, double p, std::uint64_t trials,
                          std::size_t k_max, std::uint64_t seed);

// CSV with header "k,count_or_mean,half_width"; a final row k=total.
void write_census_csv(std::ostream& out, const PathCensus& census);

inline constexpr double kEnumerationCap = 1e7;

// |S(D, k)| = C(D - w_min + k, k).
double composition_count(int d, int k, int w_min);

// Upper bound on l_k from the class-composition sum, with m = sum w / 2.
double lemma41_bound(const ChungLuModel& model, int k);

// N(D, k) by dynamic programming over D.
double n_recurrence(int d, int k, double c1, int w_min);
// N(D, k) by summing over every composition in S(D, k).
double n_enumeration(int d, int k, double c1, int w_min);
// (1/k!) prod_{i = w_min + 1}^{D} (1 + i^-c1)^k; needs c1 > 1.
double lemma42_bound(int d, int k, double c1, int w_min);

struct C0Sweep {
  std::vector<double> p_values;
  std::vector<double> gamma;
  std::vector<double> gamma_half_width;
  double ceiling = 0.0;      // coefficient * n^exponent
  double largest_p = 0.0;    // largest grid p with gamma <= ceiling; 0 if none
};

// Empirical stand-in for the survival-probability ceiling c0: the largest
// grid p for which the estimated path count stays under coefficient * n^exponent.
C0Sweep sweep_c0(const ChungLuModel& model, const std::vector<double>& p_grid,
                 double coefficient, double exponent, std::uint64_t trials,
                 std::size_t k_max, std::uint64_t seed);

namespace serial {

PathCensus estimate_gamma(const ChungLuModel& model, double p, std::uint64_t trials,
                          std::size_t k_max, std::uint64_t seed);

}  // namespace serial

}  // namespace epictrl

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epictrl/network.hpp"

namespace epictrl {

// One realized subgraph G_j of G(p): each edge kept independently with
// probability p_e.
struct PercolationSample {
  std::vector<EdgeId> kept_edges;  // ascending
  std::uint64_t sample_index = 0;
  std::uint64_t seed = 0;

  EdgeMask mask(std::size_t num_edges) const;
};

struct InfectionEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 99% normal-approximation half-width
  std::uint64_t num_samples = 0;
  bool exact = false;
};

// z for a two-sided 99% normal interval.
inline constexpr double kZ99 = 2.5758293035489004;

// Edge e is kept iff uniform(seed, Percolation, index, e) < p_e, so the
// result depends only on (seed, index, edge id).
PercolationSample sample_subgraph(const ContactNetwork& network,
                                  std::uint64_t seed, std::uint64_t index);

// Writes the keep flags of sample (seed, index) into `mask` (size m).
void sample_mask(const ContactNetwork& network, std::uint64_t seed,
                 std::uint64_t index, std::uint8_t* mask);

// Monte Carlo mean of inf(V, E(p) \ F, s) over samples 0..num_samples-1.
// OpenMP-parallel across samples; bit-identical to the serial reference.
InfectionEstimate estimate_infections(const ContactNetwork& network,
                                      const Intervention& intervention,
                                      std::uint64_t num_samples,
                                      std::uint64_t seed);

// Largest number of random edges (0 < p_e < 1, not removed) enumerated.
inline constexpr std::size_t kExactEdgeCap = 22;

// Exact expectation by summing over all retention patterns of the random
// edges; p in {0, 1} edges and removed edges are folded in first.
InfectionEstimate exact_expected_infections(const ContactNetwork& network,
                                            const Intervention& intervention);

// (1/N) sum_j inf(V, E_j \ F, s) over a fixed sample list.
double empirical_h(std::span<const PercolationSample> samples,
                   const ContactNetwork& network,
                   const Intervention& intervention);

// Sum over samples of the component size, the integer behind empirical_h.
std::uint64_t empirical_total(std::span<const PercolationSample> samples,
                              const ContactNetwork& network,
                              const Intervention& intervention);

// Serial reference kernels. Kept deliberately plain: tests and the
// benchmark compare the parallel kernels against them.
namespace serial {

InfectionEstimate estimate_infections(const ContactNetwork& network,
                                      const Intervention& intervention,
                                      std::uint64_t num_samples,
                                      std::uint64_t seed);

InfectionEstimate exact_expected_infections(const ContactNetwork& network,
                                            const Intervention& intervention);

}  // namespace serial

namespace detail {

InfectionEstimate summarize(std::uint64_t sum, std::uint64_t sum_sq,
                            std::uint64_t count);

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

}  // namespace detail

}  // namespace epictrl

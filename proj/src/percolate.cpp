#include "epictrl/percolate.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "epictrl/error.hpp"
#include "epictrl/reach.hpp"
#include "epictrl/rng.hpp"

namespace epictrl {

EdgeMask PercolationSample::mask(std::size_t num_edges) const {
  EdgeMask out(num_edges, 0);
  for (EdgeId e : kept_edges) out[e] = 1;
  return out;
}

void sample_mask(const ContactNetwork& network, std::uint64_t seed,
                 std::uint64_t index, std::uint8_t* mask) {
  const auto edges = network.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    mask[e] = rng::bernoulli(edges[e].prob, seed, rng::Stream::Percolation,
                             index, e)
                  ? 1
                  : 0;
  }
}

PercolationSample sample_subgraph(const ContactNetwork& network,
                                  std::uint64_t seed, std::uint64_t index) {
  PercolationSample sample;
  sample.seed = seed;
  sample.sample_index = index;
  EdgeMask mask(network.num_edges());
  sample_mask(network, seed, index, mask.data());
  for (std::size_t e = 0; e < mask.size(); ++e)
    if (mask[e]) sample.kept_edges.push_back(static_cast<EdgeId>(e));
  return sample;
}

namespace detail {

InfectionEstimate summarize(std::uint64_t sum, std::uint64_t sum_sq,
                            std::uint64_t count) {
  InfectionEstimate est;
  est.num_samples = count;
  if (count == 0) return est;
  const double n = static_cast<double>(count);
  est.mean = static_cast<double>(sum) / n;
  if (count > 1) {
    // Exact integer sums keep the variance independent of summation order.
    const double var = (static_cast<double>(sum_sq) - n * est.mean * est.mean) / (n - 1.0);
    est.half_width = kZ99 * std::sqrt(std::max(var, 0.0) / n);
  }
  return est;
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace detail

InfectionEstimate estimate_infections(const ContactNetwork& network,
                                      const Intervention& intervention,
                                      std::uint64_t num_samples,
                                      std::uint64_t seed) {
  if (num_samples == 0) throw ValidationError("num_samples must be >= 1");
  const EdgeMask residual = residual_mask(network, intervention);
  const std::size_t m = network.num_edges();
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;

#pragma omp parallel reduction(+ : sum, sum_sq)
  {
    Reacher reacher(network);
    EdgeMask mask(m);
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(num_samples); ++j) {
      sample_mask(network, seed, static_cast<std::uint64_t>(j), mask.data());
      const std::uint64_t size = reacher.count(mask.data(), residual.data());
      sum += size;
      sum_sq += size * size;
    }
  }
  return detail::summarize(sum, sum_sq, num_samples);
}

namespace {

struct ExactPlan {
  EdgeMask base;                 // deterministic part of the residual graph
  std::vector<EdgeId> random;    // edges with 0 < p < 1 still present
};

ExactPlan plan_exact(const ContactNetwork& network, const Intervention& intervention) {
  ExactPlan plan;
  plan.base = residual_mask(network, intervention);
  for (std::size_t e = 0; e < network.num_edges(); ++e) {
    if (!plan.base[e]) continue;
    const Edge& edge = network.edge(static_cast<EdgeId>(e));
    if (edge.is_loop()) {
      plan.base[e] = 0;
    } else if (edge.prob <= 0.0) {
      plan.base[e] = 0;
    } else if (edge.prob < 1.0) {
      plan.random.push_back(static_cast<EdgeId>(e));
    }
  }
  if (plan.random.size() > kExactEdgeCap)
    throw TooLargeError("exact enumeration over " + std::to_string(plan.random.size()) +
                        " random edges exceeds the cap of " +
                        std::to_string(kExactEdgeCap));
  return plan;
}

double pattern_term(const ContactNetwork& network, const ExactPlan& plan,
                    std::uint64_t pattern, EdgeMask& mask, Reacher& reacher) {
  double weight = 1.0;
  for (std::size_t i = 0; i < plan.random.size(); ++i) {
    const EdgeId e = plan.random[i];
    const double p = network.edge(e).prob;
    const bool keep = (pattern >> i) & 1U;
    mask[e] = keep ? 1 : 0;
    weight *= keep ? p : 1.0 - p;
  }
  return weight * static_cast<double>(reacher.count(mask.data()));
}

}  // namespace

InfectionEstimate exact_expected_infections(const ContactNetwork& network,
                                            const Intervention& intervention) {
  const ExactPlan plan = plan_exact(network, intervention);
  const std::uint64_t patterns = std::uint64_t{1} << plan.random.size();
  // Fixed blocks make the floating-point result independent of threads.
  const std::uint64_t blocks = std::min<std::uint64_t>(patterns, 1024);
  std::vector<double> block_sum(blocks, 0.0);

#pragma omp parallel
  {
    Reacher reacher(network);
    EdgeMask mask = plan.base;
#pragma omp for schedule(dynamic)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
      const std::uint64_t lo = patterns * b / blocks;
      const std::uint64_t hi = patterns * (b + 1) / blocks;
      detail::CompensatedSum acc;
      for (std::uint64_t pattern = lo; pattern < hi; ++pattern)
        acc.add(pattern_term(network, plan, pattern, mask, reacher));
      block_sum[b] = acc.value();
    }
  }
  detail::CompensatedSum total;
  for (double s : block_sum) total.add(s);

  InfectionEstimate est;
  est.mean = total.value();
  est.exact = true;
  est.num_samples = patterns;
  return est;
}

std::uint64_t empirical_total(std::span<const PercolationSample> samples,
                              const ContactNetwork& network,
                              const Intervention& intervention) {
  if (samples.empty()) throw ValidationError("empty sample list");
  const EdgeMask residual = residual_mask(network, intervention);
  Reacher reacher(network);
  EdgeMask mask(network.num_edges(), 0);
  std::uint64_t total = 0;
  for (const PercolationSample& sample : samples) {
    for (EdgeId e : sample.kept_edges) {
      if (e >= mask.size())
        throw ValidationError("sample references an edge outside the network");
      mask[e] = 1;
    }
    total += reacher.count(mask.data(), residual.data());
    for (EdgeId e : sample.kept_edges) mask[e] = 0;
  }
  return total;
}

double empirical_h(std::span<const PercolationSample> samples,
                   const ContactNetwork& network,
                   const Intervention& intervention) {
  return static_cast<double>(empirical_total(samples, network, intervention)) /
         static_cast<double>(samples.size());
}

}  // namespace epictrl

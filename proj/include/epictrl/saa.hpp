#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epictrl/network.hpp"
#include "epictrl/percolate.hpp"
#include "epictrl/simplex.hpp"

namespace epictrl {

enum class RemovalMode { Edge, Node };
enum class Rounding { Randomized, Deterministic };

const char* to_string(RemovalMode mode);
const char* to_string(Rounding rounding);

struct SampleSet {
  ContactNetwork network;
  std::vector<PercolationSample> samples;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;  // set when N came from sample_count

  std::size_t size() const { return samples.size(); }
};

// N = ceil((3n / eps^2) ln(n^2 2^(m+1))).
std::uint64_t sample_count(std::size_t n, std::size_t m, double epsilon);

SampleSet draw_samples(const ContactNetwork& network, std::uint64_t num_samples,
                       std::uint64_t seed);

// Compact form of the path LP. For a fixed x the largest feasible d is
// min(1, x-weighted distance from s), which is exactly the y of the path
// formulation, so d doubles as y. Samples whose source components carry
// the same edge set collapse into one weighted scenario.
struct LpModel {
  struct Scenario {
    double weight = 0.0;                // multiplicity / N
    std::vector<VertexId> vertices;     // source component minus s, ascending
    std::size_t first_variable = 0;     // d of vertices[i] is first_variable + i
    std::vector<EdgeId> edges;          // kept edges inside the component
  };

  RemovalMode mode = RemovalMode::Edge;
  double budget = 0.0;                  // un-normalized B
  std::size_t num_vertices = 0;
  VertexId source = 0;
  std::size_t num_samples = 0;

  lp::Problem problem;
  std::vector<std::uint32_t> decision_ids;       // x variable i acts on id decision_ids[i]
  std::vector<double> decision_costs;            // c / B
  std::vector<double> id_costs;                  // un-normalized cost per edge or vertex id
  std::size_t budget_row = 0;
  std::vector<Scenario> scenarios;
  std::vector<std::size_t> scenario_of_sample;
  double objective_constant = 0.0;               // (1/N) sum_j (|component_j| - 1)
};

// Budget must be > 0. Ids costing more than B are hard-wired to 0 and the
// remaining costs are scaled by 1/B. Throws when the network has no
// removable element at all, or when the LP would exceed kMaxLpRows.
inline constexpr std::size_t kMaxLpRows = 6000;
LpModel build_lp(const SampleSet& samples, double budget, RemovalMode mode);

struct FractionalSolution {
  enum class Status { Optimal, IterationLimit };

  RemovalMode mode = RemovalMode::Edge;
  std::size_t num_vertices = 0;
  std::size_t num_samples = 0;
  double budget = 0.0;
  std::vector<double> x;       // per edge id (edge mode) or vertex id (node mode)
  std::vector<double> costs;   // un-normalized, same indexing as x
  std::vector<double> y;       // y[j * num_vertices + v]
  double objective = 0.0;      // (1/N) sum_j sum_{v != s} (1 - y_vj)
  double budget_violation = 0.0;
  std::size_t iterations = 0;
  Status status = Status::Optimal;

  double y_at(std::size_t sample, VertexId v) const { return y[sample * num_vertices + v]; }
};

FractionalSolution solve_lp(const LpModel& model, const lp::Options& options = {});

// Picks id i with probability min((gamma + 5) x_i ln n / eps, 1).
Intervention round_randomized(const FractionalSolution& frac, double gamma, double epsilon,
                              std::uint64_t seed);

// Keeps every id with x_i >= 1 / (4 n^(2/3)). Throws SolverError if the
// result costs more than 4 n^(2/3) B.
Intervention round_deterministic(const FractionalSolution& frac);

double deterministic_threshold(std::size_t n);

struct BruteForceResult {
  Intervention best;
  double h = 0.0;  // empirical_h of best
};

inline constexpr std::size_t kBruteForceCap = 20;

// Exhaustive minimum of empirical_h over budget-feasible subsets; ties go
// to the lexicographically smallest member list.
BruteForceResult brute_force_optimum(const SampleSet& samples, double budget,
                                     RemovalMode mode);

// S(j) = {v : y_vj >= eps} for each sample j.
std::vector<std::vector<VertexId>> hit_sets(const FractionalSolution& frac,
                                            const SampleSet& samples, double epsilon);

struct SaaConfig {
  double budget = 1.0;
  double epsilon = 0.3;
  double gamma = 2.0;
  Rounding rounding = Rounding::Deterministic;
  RemovalMode mode = RemovalMode::Edge;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> num_samples;  // override for sample_count
  std::uint64_t eval_samples = 10000;
};

struct SaaReport {
  double lp_objective = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t n_samples_theory = 0;
  std::size_t distinct_scenarios = 0;
  std::size_t lp_iterations = 0;
  Rounding rounding = Rounding::Deterministic;
  RemovalMode mode = RemovalMode::Edge;
  double cost = 0.0;
  double budget = 0.0;
  double cost_ratio = 0.0;
  double empirical_h = 0.0;
  double fresh_mc_mean = 0.0;
  double fresh_mc_half_width = 0.0;
  double runtime_ms = 0.0;
  std::vector<std::string> warnings;
};

struct SaaOutcome {
  Intervention intervention;
  SaaReport report;
  std::optional<FractionalSolution> fractional;  // absent when B = 0
};

// sample_count -> draw_samples -> build_lp -> solve_lp -> rounding, then
// re-evaluation on the same samples and on fresh ones.
SaaOutcome solve_saa(const ContactNetwork& network, const SaaConfig& config);

namespace serial {

BruteForceResult brute_force_optimum(const SampleSet& samples, double budget,
                                     RemovalMode mode);

}  // namespace serial

}  // namespace epictrl

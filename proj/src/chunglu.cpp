#include "epictrl/chunglu.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "epictrl/error.hpp"
#include "epictrl/percolate.hpp"
#include "epictrl/rng.hpp"

namespace epictrl {

std::size_t ChungLuModel::class_size(int weight) const {
  if (weight < w_min || weight > w_max) return 0;
  return class_sizes[static_cast<std::size_t>(weight - w_min)];
}

double ChungLuModel::q(VertexId u, VertexId v) const {
  return static_cast<double>(weights[u]) * static_cast<double>(weights[v]) / total_weight;
}

ChungLuModel build_model(std::size_t n, double beta, int w_min, int w_max) {
  if (!(beta > 2.0)) throw ValidationError("Chung-Lu model needs beta > 2");
  if (w_min < 1 || w_max < w_min)
    throw ValidationError("Chung-Lu model needs 1 <= w_min <= w_max");
  if (n < 1) throw ValidationError("Chung-Lu model needs n >= 1");
  const std::size_t classes = static_cast<std::size_t>(w_max - w_min + 1);
  if (n < classes)
    throw ValidationError("n = " + std::to_string(n) + " cannot populate " +
                          std::to_string(classes) + " weight classes");

  std::vector<double> share(classes);
  for (std::size_t c = 0; c < classes; ++c)
    share[c] = std::pow(static_cast<double>(w_min + static_cast<int>(c)), -beta);
  const double norm = std::accumulate(share.begin(), share.end(), 0.0);

  ChungLuModel model;
  model.n = n;
  model.beta = beta;
  model.w_min = w_min;
  model.w_max = w_max;
  model.class_sizes.resize(classes);
  std::vector<double> remainder(classes);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double quota = static_cast<double>(n) * share[c] / norm;
    model.class_sizes[c] = static_cast<std::size_t>(std::floor(quota));
    remainder[c] = quota - std::floor(quota);
    assigned += model.class_sizes[c];
  }
  std::vector<std::size_t> order(classes);
  std::iota(order.begin(), order.end(), 0);
  // Largest remainder first; lower weight wins ties.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned)
    ++model.class_sizes[order[i % classes]];

  for (std::size_t c = 0; c < classes; ++c) {
    if (model.class_sizes[c] > 0) continue;
    auto largest = std::max_element(model.class_sizes.begin(), model.class_sizes.end());
    --*largest;
    model.class_sizes[c] = 1;
  }

  model.weights.reserve(n);
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t i = 0; i < model.class_sizes[c]; ++i)
      model.weights.push_back(w_min + static_cast<int>(c));
  model.total_weight = 0.0;
  for (int w : model.weights) model.total_weight += w;

  const double top = static_cast<double>(w_max) * w_max;
  if (top > model.total_weight)
    throw ValidationError("q for the heaviest pair is " +
                          std::to_string(top / model.total_weight) +
                          " > 1; shrink w_max or grow n");
  return model;
}

ChungLuModel parse_model_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    return build_model(doc.at("n").get<std::size_t>(), doc.at("beta").get<double>(),
                       doc.at("w_min").get<int>(), doc.at("w_max").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad model document: ") + e.what());
  }
}

std::string model_to_json(const ChungLuModel& model) {
  nlohmann::json doc;
  doc["n"] = model.n;
  doc["beta"] = model.beta;
  doc["w_min"] = model.w_min;
  doc["w_max"] = model.w_max;
  doc["class_sizes"] = model.class_sizes;
  doc["total_weight"] = model.total_weight;
  doc["expected_edges"] = model.expected_edges();
  doc["c1"] = model.c1();
  doc["supercritical_safe"] = model.supercritical_safe();
  return doc.dump(2);
}

ContactNetwork generate(const ChungLuModel& model, std::uint64_t seed) {
  const std::size_t n = model.n;
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u; v < n; ++v) {
      const double q = model.q(static_cast<VertexId>(u), static_cast<VertexId>(v));
      if (rng::bernoulli(q, seed, rng::Stream::Generation, u, v))
        edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), 1.0, 1.0});
    }
  }
  return ContactNetwork(n, std::move(edges), 0);
}

namespace {

// Counts directed simple paths by length (each undirected path twice).
class PathCounter {
 public:
  PathCounter(const ContactNetwork& network, const EdgeMask* keep, std::size_t k_max)
      : adjacency_(network.num_vertices()), directed_(k_max, 0), k_max_(k_max) {
    for (std::size_t e = 0; e < network.num_edges(); ++e) {
      const Edge& edge = network.edge(static_cast<EdgeId>(e));
      if (edge.is_loop() || (keep && !(*keep)[e])) continue;
      adjacency_[edge.u].push_back(edge.v);
      adjacency_[edge.v].push_back(edge.u);
    }
  }

  std::vector<std::uint64_t> run() {
    for (std::size_t v = 0; v < adjacency_.size(); ++v)
      extend(static_cast<VertexId>(v), std::uint32_t{1} << v, 0);
    for (auto& c : directed_) c /= 2;
    return directed_;
  }

 private:
  void extend(VertexId at, std::uint32_t used, std::size_t length) {
    if (length == k_max_) return;
    for (VertexId next : adjacency_[at]) {
      if (used & (std::uint32_t{1} << next)) continue;
      ++directed_[length];
      extend(next, used | (std::uint32_t{1} << next), length + 1);
    }
  }

  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::uint64_t> directed_;
  std::size_t k_max_;
};

std::vector<std::uint64_t> path_counts(const ContactNetwork& network, const EdgeMask* keep,
                                       std::size_t k_max) {
  if (network.num_vertices() > kPathCountVertexCap)
    throw TooLargeError("path enumeration is capped at " +
                        std::to_string(kPathCountVertexCap) + " vertices");
  if (k_max == 0) throw ValidationError("k_max must be >= 1");
  return PathCounter(network, keep, k_max).run();
}

PathCensus exact_census(const std::vector<std::uint64_t>& counts) {
  PathCensus census;
  census.mode = PathCensus::Mode::Exact;
  census.trials = 1;
  for (std::uint64_t c : counts) {
    census.counts.push_back(static_cast<double>(c));
    census.half_widths.push_back(0.0);
    census.total += static_cast<double>(c);
  }
  return census;
}

std::vector<std::uint64_t> gamma_trial(const ChungLuModel& model, double p,
                                       std::size_t k_max, std::uint64_t seed,
                                       std::uint64_t trial) {
  const ContactNetwork graph = generate(model, rng::derive(seed, rng::Stream::Generation, trial));
  EdgeMask keep(graph.num_edges());
  for (std::size_t e = 0; e < keep.size(); ++e)
    keep[e] = rng::bernoulli(p, seed, rng::Stream::Percolation, trial, e) ? 1 : 0;
  return path_counts(graph, &keep, k_max);
}

// Mean and 99% half-width per column of a trials x k_max table, reduced in
// trial order so the answer does not depend on the thread count.
PathCensus summarize_trials(const std::vector<std::uint64_t>& table, std::uint64_t trials,
                            std::size_t k_max) {
  PathCensus census;
  census.mode = PathCensus::Mode::Estimated;
  census.trials = trials;
  const double t = static_cast<double>(trials);
  auto moments = [&](auto value_of) {
    detail::CompensatedSum sum;
    detail::CompensatedSum sum_sq;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const double x = value_of(i);
      sum.add(x);
      sum_sq.add(x * x);
    }
    const double mean = sum.value() / t;
    double hw = 0.0;
    if (trials > 1) {
      const double var = std::max(0.0, (sum_sq.value() - t * mean * mean) / (t - 1.0));
      hw = kZ99 * std::sqrt(var / t);
    }
    return std::pair{mean, hw};
  };
  for (std::size_t k = 0; k < k_max; ++k) {
    auto [mean, hw] = moments(
        [&](std::uint64_t i) { return static_cast<double>(table[i * k_max + k]); });
    census.counts.push_back(mean);
    census.half_widths.push_back(hw);
  }
  auto [total, total_hw] = moments([&](std::uint64_t i) {
    double s = 0.0;
    for (std::size_t k = 0; k < k_max; ++k) s += static_cast<double>(table[i * k_max + k]);
    return s;
  });
  census.total = total;
  census.total_half_width = total_hw;
  return census;
}

void check_gamma_args(const ChungLuModel& model, double p, std::uint64_t trials,
                      std::size_t k_max) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (trials == 0) throw ValidationError("trials must be >= 1");
  if (k_max == 0) throw ValidationError("k_max must be >= 1");
  if (model.n > kPathCountVertexCap)
    throw TooLargeError("path enumeration is capped at " +
                        std::to_string(kPathCountVertexCap) + " vertices");
}

}  // namespace

PathCensus count_simple_paths(const ContactNetwork& network, std::size_t k_max) {
  return exact_census(path_counts(network, nullptr, k_max));
}

PathCensus count_simple_paths(const ContactNetwork& network, const EdgeMask& keep,
                              std::size_t k_max) {
  if (keep.size() != network.num_edges())
    throw ValidationError("edge mask length does not match edge count");
  return exact_census(path_counts(network, &keep, k_max));
}

PathCensus estimate_gamma(const ChungLuModel& model, double p, std::uint64_t trials,
                          std::size_t k_max, std::uint64_t seed) {
  check_gamma_args(model, p, trials, k_max);
  std::vector<std::uint64_t> table(trials * k_max, 0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
    const auto counts = gamma_trial(model, p, k_max, seed, static_cast<std::uint64_t>(t));
    std::copy(counts.begin(), counts.end(), table.begin() + t * static_cast<std::int64_t>(k_max));
  }
  return summarize_trials(table, trials, k_max);
}

namespace serial {

PathCensus estimate_gamma(const ChungLuModel& model, double p, std::uint64_t trials,
                          std::size_t k_max, std::uint64_t seed) {
  check_gamma_args(model, p, trials, k_max);
  std::vector<std::uint64_t> table;
  table.reserve(trials * k_max);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto counts = gamma_trial(model, p, k_max, seed, t);
    table.insert(table.end(), counts.begin(), counts.end());
  }
  return summarize_trials(table, trials, k_max);
}

}  // namespace serial

void write_census_csv(std::ostream& out, const PathCensus& census) {
  out << "k,count_or_mean,half_width\n";
  out.precision(12);
  for (std::size_t k = 0; k < census.counts.size(); ++k)
    out << (k + 1) << ',' << census.counts[k] << ',' << census.half_widths[k] << '\n';
  out << "total," << census.total << ',' << census.total_half_width << '\n';
}

namespace {

// Calls fn(a) for every a in Z_{>=0}^parts with sum(a) == total.
void for_each_composition(std::size_t parts, int total,
                          const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(parts, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == parts) {
      a[i] = left;
      fn(a);
      return;
    }
    for (int x = left; x >= 0; --x) {
      a[i] = x;
      rec(i + 1, left - x);
    }
  };
  rec(0, total);
}

double log_choose(double n, double k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_sum_exp(const std::vector<double>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (std::isinf(top)) return top;
  detail::CompensatedSum acc;
  for (double t : terms) acc.add(std::exp(t - top));
  return top + std::log(acc.value());
}

void check_enumerable(int d, int k, int w_min) {
  if (composition_count(d, k, w_min) > kEnumerationCap)
    throw TooLargeError("composition set S(" + std::to_string(d) + ", " +
                        std::to_string(k) + ") is too large to enumerate");
}

void check_nk_args(int d, int k, double c1, int w_min) {
  if (w_min < 1) throw ValidationError("w_min must be >= 1");
  if (d < w_min) throw ValidationError("D must be >= w_min");
  if (k < 0) throw ValidationError("k must be >= 0");
  if (!(c1 > 0.0)) throw ValidationError("c1 must be > 0");
}

}  // namespace

double composition_count(int d, int k, int w_min) {
  const double parts = d - w_min + 1;
  return std::round(std::exp(log_choose(parts - 1 + k, k)));
}

double lemma41_bound(const ChungLuModel& model, int k) {
  if (k < 0) throw ValidationError("k must be >= 0");
  const double n = static_cast<double>(model.n);
  if (k == 0) return n;
  check_enumerable(model.w_max, k, model.w_min);

  const std::size_t classes = model.class_sizes.size();
  std::vector<double> terms;
  for_each_composition(classes, k, [&](const std::vector<int>& a) {
    double t = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (a[c] == 0) continue;
      const double weight = model.w_min + static_cast<int>(c);
      t += log_choose(static_cast<double>(model.class_sizes[c]), a[c]) +
           2.0 * a[c] * std::log(weight);
    }
    terms.push_back(t);
  });
  const double lse = log_sum_exp(terms);
  if (std::isinf(lse)) return 0.0;
  const double m = model.expected_edges();
  const double log_bound = std::log(n) + k * std::log(2.0) + std::lgamma(k + 1.0) -
                           k * std::log(m) + lse;
  return std::exp(log_bound);
}

double n_recurrence(int d, int k, double c1, int w_min) {
  check_nk_args(d, k, c1, w_min);
  // row[j] = N(D', j) for the current D'.
  std::vector<double> row(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j)
    row[j] = std::exp(-c1 * j * std::log(static_cast<double>(w_min)) - std::lgamma(j + 1.0));
  for (int level = w_min + 1; level <= d; ++level) {
    std::vector<double> next(row.size(), 0.0);
    const double log_level = std::log(static_cast<double>(level));
    for (int kk = 0; kk <= k; ++kk) {
      detail::CompensatedSum acc;
      for (int j = 0; j <= kk; ++j)
        acc.add(row[kk - j] * std::exp(-c1 * j * log_level - std::lgamma(j + 1.0)));
      next[kk] = acc.value();
    }
    row = std::move(next);
  }
  return row[k];
}

double n_enumeration(int d, int k, double c1, int w_min) {
  check_nk_args(d, k, c1, w_min);
  if (k == 0) return 1.0;
  check_enumerable(d, k, w_min);
  detail::CompensatedSum acc;
  for_each_composition(static_cast<std::size_t>(d - w_min + 1), k,
                       [&](const std::vector<int>& a) {
                         double log_term = 0.0;
                         for (std::size_t c = 0; c < a.size(); ++c) {
                           const double i = w_min + static_cast<int>(c);
                           log_term -= c1 * a[c] * std::log(i) + std::lgamma(a[c] + 1.0);
                         }
                         acc.add(std::exp(log_term));
                       });
  return acc.value();
}

double lemma42_bound(int d, int k, double c1, int w_min) {
  check_nk_args(d, k, c1, w_min);
  if (!(c1 > 1.0)) throw ValidationError("the N(D, k) bound needs c1 > 1");
  double log_bound = -std::lgamma(k + 1.0);
  for (int i = w_min + 1; i <= d; ++i)
    log_bound += k * std::log1p(std::pow(static_cast<double>(i), -c1));
  return std::exp(log_bound);
}

C0Sweep sweep_c0(const ChungLuModel& model, const std::vector<double>& p_grid,
                 double coefficient, double exponent, std::uint64_t trials,
                 std::size_t k_max, std::uint64_t seed) {
  C0Sweep sweep;
  sweep.ceiling = coefficient * std::pow(static_cast<double>(model.n), exponent);
  std::vector<double> grid = p_grid;
  std::sort(grid.begin(), grid.end());
  for (double p : grid) {
    const PathCensus census = estimate_gamma(model, p, trials, k_max, seed);
    sweep.p_values.push_back(p);
    sweep.gamma.push_back(census.total);
    sweep.gamma_half_width.push_back(census.total_half_width);
    if (census.total <= sweep.ceiling) sweep.largest_p = p;
  }
  return sweep;
}

}  // namespace epictrl

#include "epictrl/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "epictrl/error.hpp"
#include "epictrl/reach.hpp"

namespace epictrl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation:
      return "validation";
    case ErrorCode::Parse:
      return "parse";
    case ErrorCode::TooLarge:
      return "too_large";
    case ErrorCode::Solver:
      return "solver";
  }
  return "unknown";
}

const char* to_string(InterventionKind kind) {
  return kind == InterventionKind::EdgeRemoval ? "edge" : "node";
}

ContactNetwork::ContactNetwork(std::size_t num_vertices, std::vector<Edge> edges,
                               VertexId source, std::vector<std::string> labels,
                               std::vector<double> vertex_costs)
    : edges_(std::move(edges)),
      source_(source),
      labels_(std::move(labels)),
      vertex_costs_(std::move(vertex_costs)) {
  if (num_vertices == 0) throw ValidationError("network has no vertices");
  if (labels_.empty()) {
    labels_.reserve(num_vertices);
    for (std::size_t v = 0; v < num_vertices; ++v)
      labels_.push_back(std::to_string(v));
  }
  if (labels_.size() != num_vertices)
    throw ValidationError("label count does not match vertex count");
  if (vertex_costs_.empty()) vertex_costs_.assign(num_vertices, 1.0);
  if (vertex_costs_.size() != num_vertices)
    throw ValidationError("vertex cost count does not match vertex count");
  if (source_ >= num_vertices)
    throw ValidationError("source " + std::to_string(source_) +
                          " is not a vertex");
  for (double c : vertex_costs_)
    if (!(c >= 0.0)) throw ValidationError("negative vertex cost");

  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (!label_index_.emplace(labels_[v], static_cast<VertexId>(v)).second)
      throw ValidationError("duplicate vertex label '" + labels_[v] + "'");
  }

  std::set<std::pair<VertexId, VertexId>> seen;
  std::vector<std::size_t> degree(num_vertices, 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.u >= num_vertices || edge.v >= num_vertices)
      throw ValidationError("edge " + std::to_string(e) +
                            " has an endpoint outside the vertex range");
    if (!(edge.prob >= 0.0 && edge.prob <= 1.0))
      throw ValidationError("edge " + std::to_string(e) +
                            ": probability outside [0, 1]");
    if (!(edge.cost >= 0.0))
      throw ValidationError("edge " + std::to_string(e) + ": negative cost");
    auto key = std::minmax(edge.u, edge.v);
    if (!seen.insert(key).second)
      throw ValidationError("duplicate edge " + labels_[edge.u] + " " +
                            labels_[edge.v]);
    if (edge.is_loop()) {
      ++num_loops_;
    } else {
      ++degree[edge.u];
      ++degree[edge.v];
    }
  }

  offsets_.assign(num_vertices + 1, 0);
  for (std::size_t v = 0; v < num_vertices; ++v)
    offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.is_loop()) continue;
    adjacency_[fill[edge.u]++] = {edge.v, static_cast<EdgeId>(e)};
    adjacency_[fill[edge.v]++] = {edge.u, static_cast<EdgeId>(e)};
  }
  for (std::size_t v = 0; v < num_vertices; ++v) {
    std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1],
              [](const Incidence& a, const Incidence& b) {
                return a.neighbor < b.neighbor;
              });
  }
}

std::size_t ContactNetwork::max_degree() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v < num_vertices(); ++v)
    best = std::max(best, degree(static_cast<VertexId>(v)));
  return best;
}

std::optional<VertexId> ContactNetwork::find_label(const std::string& label) const {
  auto it = label_index_.find(label);
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ContactNetwork::uniform_probability() const {
  std::optional<double> p;
  for (const Edge& e : edges_) {
    if (e.is_loop()) continue;
    if (!p) {
      p = e.prob;
    } else if (*p != e.prob) {
      return std::nullopt;
    }
  }
  return p;
}

bool ContactNetwork::unit_costs() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) {
    return e.is_loop() || e.cost == 1.0;
  });
}

ContactNetwork ContactNetwork::with_source(VertexId source) const {
  return ContactNetwork(num_vertices(), edges_, source, labels_, vertex_costs_);
}

ContactNetwork ContactNetwork::with_probability(double p) const {
  std::vector<Edge> edges = edges_;
  for (Edge& e : edges) e.prob = p;
  return ContactNetwork(num_vertices(), std::move(edges), source_, labels_,
                        vertex_costs_);
}

ContactNetwork ContactNetwork::with_probabilities(std::span<const double> probs) const {
  if (probs.size() != edges_.size())
    throw ValidationError("probability vector length does not match edge count");
  std::vector<Edge> edges = edges_;
  for (std::size_t e = 0; e < edges.size(); ++e) edges[e].prob = probs[e];
  return ContactNetwork(num_vertices(), std::move(edges), source_, labels_,
                        vertex_costs_);
}

ContactNetwork merge_seeds(const ContactNetwork& network,
                           std::span<const VertexId> seeds) {
  if (seeds.empty()) throw ValidationError("seed set is empty");
  std::vector<VertexId> unique(seeds.begin(), seeds.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (VertexId v : unique)
    if (v >= network.num_vertices())
      throw ValidationError("seed " + std::to_string(v) + " is not a vertex");

  const auto meta = static_cast<VertexId>(network.num_vertices());
  std::vector<Edge> edges(network.edges().begin(), network.edges().end());
  for (VertexId v : unique) edges.push_back({meta, v, kUnremovable, 1.0});

  std::vector<std::string> labels(network.labels().begin(), network.labels().end());
  std::string meta_label = "__meta__";
  while (network.find_label(meta_label)) meta_label += "_";
  labels.push_back(meta_label);

  std::vector<double> costs(network.vertex_costs().begin(),
                            network.vertex_costs().end());
  costs.push_back(kUnremovable);
  return ContactNetwork(network.num_vertices() + 1, std::move(edges), meta,
                        std::move(labels), std::move(costs));
}

bool Intervention::contains(std::uint32_t id) const {
  return std::binary_search(members.begin(), members.end(), id);
}

namespace {

void sort_unique(std::vector<std::uint32_t>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

}  // namespace

Intervention make_edge_intervention(const ContactNetwork& network,
                                    std::vector<EdgeId> edges,
                                    std::string provenance) {
  Intervention out;
  out.kind = InterventionKind::EdgeRemoval;
  out.members = std::move(edges);
  out.provenance = std::move(provenance);
  sort_unique(out.members);
  for (EdgeId e : out.members) {
    if (e >= network.num_edges())
      throw ValidationError("edge id " + std::to_string(e) + " out of range");
    out.cost += network.edge(e).cost;
  }
  return out;
}

Intervention make_node_intervention(const ContactNetwork& network,
                                    std::vector<VertexId> nodes,
                                    std::string provenance) {
  Intervention out;
  out.kind = InterventionKind::NodeRemoval;
  out.members = std::move(nodes);
  out.provenance = std::move(provenance);
  sort_unique(out.members);
  for (VertexId v : out.members) {
    if (v >= network.num_vertices())
      throw ValidationError("vertex id " + std::to_string(v) + " out of range");
    if (v == network.source())
      throw ValidationError("node removal may not include the source");
    out.cost += network.vertex_cost(v);
  }
  return out;
}

Intervention no_intervention(InterventionKind kind) {
  Intervention out;
  out.kind = kind;
  out.provenance = "none";
  return out;
}

void validate(const ContactNetwork& network, const Intervention& intervention) {
  const bool edges = intervention.kind == InterventionKind::EdgeRemoval;
  const std::size_t limit = edges ? network.num_edges() : network.num_vertices();
  double cost = 0.0;
  for (std::size_t i = 0; i < intervention.members.size(); ++i) {
    std::uint32_t id = intervention.members[i];
    if (id >= limit)
      throw ValidationError("intervention member " + std::to_string(id) +
                            " out of range");
    if (i > 0 && intervention.members[i - 1] >= id)
      throw ValidationError("intervention members not sorted and unique");
    if (!edges && id == network.source())
      throw ValidationError("node removal may not include the source");
    cost += edges ? network.edge(id).cost : network.vertex_cost(id);
  }
  if (cost != intervention.cost && !(std::isinf(cost) && std::isinf(intervention.cost)))
    throw ValidationError("intervention cost does not match its members");
}

EdgeMask residual_mask(const ContactNetwork& network,
                       const Intervention& intervention) {
  EdgeMask mask = network.all_edges_mask();
  if (intervention.kind == InterventionKind::EdgeRemoval) {
    for (std::uint32_t e : intervention.members) {
      if (e >= mask.size())
        throw ValidationError("edge id " + std::to_string(e) + " out of range");
      mask[e] = 0;
    }
    return mask;
  }
  std::vector<std::uint8_t> removed(network.num_vertices(), 0);
  for (std::uint32_t v : intervention.members) {
    if (v >= removed.size())
      throw ValidationError("vertex id " + std::to_string(v) + " out of range");
    if (v == network.source())
      throw ValidationError("node removal may not include the source");
    removed[v] = 1;
  }
  for (std::size_t e = 0; e < mask.size(); ++e) {
    const Edge& edge = network.edge(static_cast<EdgeId>(e));
    if (removed[edge.u] || removed[edge.v]) mask[e] = 0;
  }
  return mask;
}

std::vector<EdgeId> boundary_edges(const ContactNetwork& network,
                                   std::span<const VertexId> members) {
  std::vector<std::uint8_t> inside(network.num_vertices(), 0);
  for (VertexId v : members) inside[v] = 1;
  std::vector<EdgeId> out;
  for (std::size_t e = 0; e < network.num_edges(); ++e) {
    const Edge& edge = network.edge(static_cast<EdgeId>(e));
    if (inside[edge.u] != inside[edge.v]) out.push_back(static_cast<EdgeId>(e));
  }
  return out;
}

namespace {

ComponentReport component_with_mask(const ContactNetwork& network,
                                    const EdgeMask& alive,
                                    const EdgeMask* restrict_to) {
  Reacher reacher(network);
  reacher.count(alive.data(), restrict_to ? restrict_to->data() : nullptr);
  ComponentReport report;
  report.members.assign(reacher.visited().begin(), reacher.visited().end());
  std::sort(report.members.begin(), report.members.end());
  report.size = report.members.size();
  report.boundary = boundary_edges(network, report.members);
  return report;
}

}  // namespace

ComponentReport component_of(const ContactNetwork& network,
                             const Intervention& removed) {
  return component_with_mask(network, residual_mask(network, removed), nullptr);
}

ComponentReport component_of(const ContactNetwork& network,
                             const Intervention& removed,
                             const EdgeMask& edge_mask) {
  if (edge_mask.size() != network.num_edges())
    throw ValidationError("edge mask length does not match edge count");
  return component_with_mask(network, residual_mask(network, removed), &edge_mask);
}

Reacher::Reacher(const ContactNetwork& network)
    : network_(&network),
      stamp_(network.num_vertices(), 0),
      queue_(network.num_vertices()) {}

std::size_t Reacher::run(VertexId from, const std::uint8_t* keep,
                         const std::uint8_t* also) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  std::size_t head = 0;
  std::size_t tail = 0;
  queue_[tail++] = from;
  stamp_[from] = epoch_;
  while (head < tail) {
    VertexId u = queue_[head++];
    for (const Incidence& inc : network_->neighbors(u)) {
      if (!keep[inc.edge] || (also && !also[inc.edge])) continue;
      if (stamp_[inc.neighbor] == epoch_) continue;
      stamp_[inc.neighbor] = epoch_;
      queue_[tail++] = inc.neighbor;
    }
  }
  visited_count_ = tail;
  return tail;
}

double karger_epsilon(double c_min, double p, std::size_t n, double d) {
  if (!(p > 0.0 && p <= 1.0))
    throw ValidationError("karger epsilon needs p in (0, 1]");
  if (!(d > 0.0)) throw ValidationError("karger epsilon needs d > 0");
  if (n < 2) throw ValidationError("karger epsilon needs n >= 2");
  if (!(c_min > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(3.0 * (d + 2.0) * std::log(static_cast<double>(n)) / (c_min * p));
}

KargerRegime karger_regime(const ContactNetwork& network, double d) {
  if (!network.unit_costs())
    throw ValidationError("karger regime requires unit edge costs");
  auto p = network.uniform_probability();
  if (!p) throw ValidationError("karger regime requires a uniform probability");
  KargerRegime regime;
  regime.p = *p;
  regime.c_min = global_min_cut(network);
  regime.epsilon = karger_epsilon(regime.c_min, regime.p, network.num_vertices(), d);
  regime.in_regime = regime.c_min * regime.p >=
                     9.0 * std::log(static_cast<double>(network.num_vertices()));
  return regime;
}

}  // namespace epictrl

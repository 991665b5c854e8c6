#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace epictrl {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

// Cost sentinel for edges no solver may select (meta-source edges).
inline constexpr double kUnremovable = std::numeric_limits<double>::infinity();

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  double cost = 1.0;
  double prob = 1.0;

  bool is_loop() const { return u == v; }
  VertexId other(VertexId w) const { return w == u ? v : u; }
};

struct Incidence {
  VertexId neighbor;
  EdgeId edge;
};

// Per-edge keep flags (1 = present). Indexed by EdgeId.
using EdgeMask = std::vector<std::uint8_t>;

// An undirected contact network with removal costs c_e, transmission
// probabilities p_e and a single infection source. Immutable once built;
// the constructor validates every invariant and throws ValidationError.
class ContactNetwork {
 public:
  ContactNetwork(std::size_t num_vertices, std::vector<Edge> edges,
                 VertexId source, std::vector<std::string> labels = {},
                 std::vector<double> vertex_costs = {});

  std::size_t num_vertices() const { return labels_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  VertexId source() const { return source_; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  // Incident non-loop edges of v, ascending by neighbor id.
  std::span<const Incidence> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const;
  std::size_t num_self_loops() const { return num_loops_; }

  const std::string& label(VertexId v) const { return labels_[v]; }
  std::span<const std::string> labels() const { return labels_; }
  std::optional<VertexId> find_label(const std::string& label) const;

  // Vaccination cost c_v; 1 unless supplied.
  double vertex_cost(VertexId v) const { return vertex_costs_[v]; }
  std::span<const double> vertex_costs() const { return vertex_costs_; }

  // The common p_e when every non-loop edge shares one value.
  std::optional<double> uniform_probability() const;
  bool unit_costs() const;

  ContactNetwork with_source(VertexId source) const;
  ContactNetwork with_probability(double p) const;
  ContactNetwork with_probabilities(std::span<const double> probs) const;

  EdgeMask all_edges_mask() const { return EdgeMask(edges_.size(), 1); }

 private:
  std::vector<Edge> edges_;
  VertexId source_;
  std::vector<std::string> labels_;
  std::vector<double> vertex_costs_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> adjacency_;
  std::unordered_map<std::string, VertexId> label_index_;
  std::size_t num_loops_ = 0;
};

// Replace a seed set I0 by a fresh meta-source joined to every seed with
// p = 1 and an unremovable cost. The input network is left untouched.
ContactNetwork merge_seeds(const ContactNetwork& network,
                           std::span<const VertexId> seeds);

enum class InterventionKind { EdgeRemoval, NodeRemoval };

const char* to_string(InterventionKind kind);

struct Intervention {
  InterventionKind kind = InterventionKind::EdgeRemoval;
  std::vector<std::uint32_t> members;  // sorted, unique
  double cost = 0.0;
  std::string provenance;

  bool contains(std::uint32_t id) const;
};

// Sorts and deduplicates members and recomputes cost. Throws on invalid ids
// or when a node removal includes the source.
Intervention make_edge_intervention(const ContactNetwork& network,
                                    std::vector<EdgeId> edges,
                                    std::string provenance = {});
Intervention make_node_intervention(const ContactNetwork& network,
                                    std::vector<VertexId> nodes,
                                    std::string provenance = {});
Intervention no_intervention(InterventionKind kind = InterventionKind::EdgeRemoval);

void validate(const ContactNetwork& network, const Intervention& intervention);

// Edges still usable after the intervention: removed edges, or every edge
// touching a removed node, are cleared.
EdgeMask residual_mask(const ContactNetwork& network,
                       const Intervention& intervention);

struct ComponentReport {
  std::vector<VertexId> members;  // ascending
  std::size_t size = 0;           // inf(V, E \ F, s)
  std::vector<EdgeId> boundary;   // edges of the full graph leaving members
};

ComponentReport component_of(const ContactNetwork& network,
                             const Intervention& removed);
ComponentReport component_of(const ContactNetwork& network,
                             const Intervention& removed,
                             const EdgeMask& edge_mask);

// Edges of the full graph with exactly one endpoint in `members`.
std::vector<EdgeId> boundary_edges(const ContactNetwork& network,
                                   std::span<const VertexId> members);

// Exact global minimum cut weight (Stoer-Wagner); 0 when disconnected.
double global_min_cut(const ContactNetwork& network);

struct KargerRegime {
  double epsilon = 0.0;
  bool in_regime = false;
  double c_min = 0.0;
  double p = 0.0;
};

// epsilon = sqrt(3 (d + 2) ln n / (c_min p)).
double karger_epsilon(double c_min, double p, std::size_t n, double d);

// Requires unit costs and one uniform probability. in_regime reports
// c_min * p >= 9 ln n.
KargerRegime karger_regime(const ContactNetwork& network, double d = 1.0);

}  // namespace epictrl

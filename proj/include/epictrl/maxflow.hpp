#pragma once

#include <cstdint>
#include <vector>

namespace epictrl {

// Dinic's algorithm on integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t num_nodes);

  // Returns the arc index; its reverse is index ^ 1.
  std::size_t add_arc(std::size_t from, std::size_t to, std::int64_t capacity);

  std::int64_t run(std::size_t source, std::size_t sink);

  // Nodes reachable from the source in the residual graph after run(): the
  // inclusion-minimal source side of a minimum cut.
  std::vector<std::uint8_t> source_side() const;

  std::size_t num_nodes() const { return head_.size(); }

 private:
  struct Arc {
    std::size_t to;
    std::int64_t cap;
    std::size_t next;
  };

  bool build_levels();
  std::int64_t push(std::size_t v, std::int64_t limit);

  std::vector<Arc> arcs_;
  std::vector<std::size_t> head_;
  std::vector<std::size_t> iter_;
  std::vector<std::int32_t> level_;
  std::size_t source_ = 0;
  std::size_t sink_ = 0;
};

}  // namespace epictrl

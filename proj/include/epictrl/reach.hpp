#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epictrl/network.hpp"

namespace epictrl {

// Reusable BFS workspace for counting the source component under edge
// masks. Not thread-safe; give each thread its own instance.
class Reacher {
 public:
  explicit Reacher(const ContactNetwork& network);

  // Component of `from` using edges with keep[e] != 0.
  std::size_t count(const std::uint8_t* keep) {
    return run(network_->source(), keep, nullptr);
  }
  // Edges must be set in both masks.
  std::size_t count(const std::uint8_t* keep, const std::uint8_t* also) {
    return run(network_->source(), keep, also);
  }
  std::size_t count_from(VertexId from, const std::uint8_t* keep,
                         const std::uint8_t* also = nullptr) {
    return run(from, keep, also);
  }

  // Vertices reached by the last call, in BFS order.
  std::span<const VertexId> visited() const {
    return {queue_.data(), visited_count_};
  }
  bool reached(VertexId v) const { return stamp_[v] == epoch_; }

 private:
  std::size_t run(VertexId from, const std::uint8_t* keep,
                  const std::uint8_t* also);

  const ContactNetwork* network_;
  std::vector<std::uint32_t> stamp_;
  std::vector<VertexId> queue_;
  std::uint32_t epoch_ = 0;
  std::size_t visited_count_ = 0;
};

}  // namespace epictrl

#include "epictrl/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace epictrl {

namespace {
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
}

MaxFlow::MaxFlow(std::size_t num_nodes) : head_(num_nodes, kNone), level_(num_nodes) {}

std::size_t MaxFlow::add_arc(std::size_t from, std::size_t to, std::int64_t capacity) {
  const std::size_t id = arcs_.size();
  arcs_.push_back({to, capacity, head_[from]});
  head_[from] = id;
  arcs_.push_back({from, 0, head_[to]});
  head_[to] = id + 1;
  return id;
}

bool MaxFlow::build_levels() {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<std::size_t> q;
  level_[source_] = 0;
  q.push(source_);
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop();
    for (std::size_t a = head_[v]; a != kNone; a = arcs_[a].next) {
      if (arcs_[a].cap > 0 && level_[arcs_[a].to] < 0) {
        level_[arcs_[a].to] = level_[v] + 1;
        q.push(arcs_[a].to);
      }
    }
  }
  return level_[sink_] >= 0;
}

std::int64_t MaxFlow::push(std::size_t v, std::int64_t limit) {
  if (v == sink_) return limit;
  for (std::size_t& a = iter_[v]; a != kNone; a = arcs_[a].next) {
    Arc& arc = arcs_[a];
    if (arc.cap <= 0 || level_[arc.to] != level_[v] + 1) continue;
    const std::int64_t got = push(arc.to, std::min(limit, arc.cap));
    if (got > 0) {
      arc.cap -= got;
      arcs_[a ^ 1].cap += got;
      return got;
    }
  }
  return 0;
}

std::int64_t MaxFlow::run(std::size_t source, std::size_t sink) {
  source_ = source;
  sink_ = sink;
  std::int64_t total = 0;
  while (build_levels()) {
    iter_ = head_;
    while (const std::int64_t f = push(source_, std::numeric_limits<std::int64_t>::max()))
      total += f;
  }
  return total;
}

std::vector<std::uint8_t> MaxFlow::source_side() const {
  std::vector<std::uint8_t> seen(head_.size(), 0);
  std::vector<std::size_t> stack{source_};
  seen[source_] = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t a = head_[v]; a != kNone; a = arcs_[a].next) {
      if (arcs_[a].cap > 0 && !seen[arcs_[a].to]) {
        seen[arcs_[a].to] = 1;
        stack.push_back(arcs_[a].to);
      }
    }
  }
  return seen;
}

}  // namespace epictrl

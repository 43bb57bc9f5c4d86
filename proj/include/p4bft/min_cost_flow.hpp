#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace p4bft {

// Successive shortest paths with Johnson potentials. Dijkstra uses a linear
// scan, which beats a heap on the dense bipartite graphs built by the
// placement solver. Initial potentials come from Bellman-Ford, so negative
// edge costs are fine as long as there is no negative cycle.
//
// Cost needs value-initialization to zero, +, - and <. It does not need an
// infinity; reachability is tracked separately.
template <typename Cost>
class MinCostFlow {
 public:
  struct Edge {
    int to;
    std::int64_t cap;
    Cost cost;
  };

  struct Result {
    std::int64_t flow = 0;
    Cost cost{};
  };

  explicit MinCostFlow(std::size_t nodes) : adj_(nodes) {}

  int add_edge(int from, int to, std::int64_t cap, Cost cost) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, cap, cost});
    edges_.push_back({from, 0, Cost{} - cost});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  // Flow currently routed on edge `id` (as returned by add_edge).
  [[nodiscard]] std::int64_t flow_on(int id) const { return edges_[id ^ 1].cap; }

  Result solve(int source, int sink,
               std::int64_t max_flow = std::numeric_limits<std::int64_t>::max()) {
    const std::size_t n = adj_.size();
    std::vector<Cost> pot(n, Cost{});
    bellman_ford(source, pot);

    Result res;
    std::vector<Cost> dist(n);
    std::vector<bool> reached(n);
    std::vector<bool> done(n);
    std::vector<int> via(n);
    while (res.flow < max_flow) {
      std::fill(reached.begin(), reached.end(), false);
      std::fill(done.begin(), done.end(), false);
      dist[source] = Cost{};
      reached[source] = true;
      for (;;) {
        int u = -1;
        for (std::size_t v = 0; v < n; ++v) {
          if (reached[v] && !done[v] && (u < 0 || dist[v] < dist[u])) u = static_cast<int>(v);
        }
        if (u < 0) break;
        done[u] = true;
        for (int id : adj_[u]) {
          const Edge& e = edges_[id];
          if (e.cap <= 0 || done[e.to]) continue;
          const Cost nd = dist[u] + e.cost + pot[u] - pot[e.to];
          if (!reached[e.to] || nd < dist[e.to]) {
            dist[e.to] = nd;
            reached[e.to] = true;
            via[e.to] = id;
          }
        }
      }
      if (!reached[sink]) break;
      for (std::size_t v = 0; v < n; ++v) {
        if (reached[v]) pot[v] = pot[v] + dist[v];
      }
      std::int64_t push = max_flow - res.flow;
      for (int v = sink; v != source; v = edges_[via[v] ^ 1].to) {
        push = std::min(push, edges_[via[v]].cap);
      }
      for (int v = sink; v != source; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].cap -= push;
        edges_[via[v] ^ 1].cap += push;
        res.cost = res.cost + edges_[via[v]].cost * push;
      }
      res.flow += push;
    }
    return res;
  }

 private:
  void bellman_ford(int source, std::vector<Cost>& pot) const {
    const std::size_t n = adj_.size();
    std::vector<bool> reached(n, false);
    reached[source] = true;
    for (std::size_t round = 0; round + 1 < n; ++round) {
      bool changed = false;
      for (std::size_t u = 0; u < n; ++u) {
        if (!reached[u]) continue;
        for (int id : adj_[u]) {
          const Edge& e = edges_[id];
          if (e.cap <= 0) continue;
          const Cost nd = pot[u] + e.cost;
          if (!reached[e.to] || nd < pot[e.to]) {
            pot[e.to] = nd;
            reached[e.to] = true;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace p4bft

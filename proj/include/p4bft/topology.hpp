#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "p4bft/error.hpp"
#include "p4bft/random.hpp"

namespace p4bft {

using SwitchId = std::uint32_t;
using ControllerId = std::uint32_t;

inline constexpr SwitchId kNoSwitch = std::numeric_limits<SwitchId>::max();

// Undirected unit-weight link, stored with a < b.
struct Edge {
  SwitchId a = 0;
  SwitchId b = 0;

  Edge() = default;
  Edge(SwitchId x, SwitchId y) : a(std::min(x, y)), b(std::max(x, y)) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Switch graph plus controller attachment metadata.
///
/// Controller-to-switch links are not graph edges: controller c sits one hop
/// behind switch attachment(c). Switches can be marked down (after a failure
/// event); down switches have no links and are excluded from connectivity.
class Topology {
 public:
  Topology() = default;

  Topology(std::vector<std::string> switch_names, std::vector<Edge> edges,
           std::vector<SwitchId> attachment, std::vector<std::string> controller_names = {})
      : names_(std::move(switch_names)),
        attachment_(std::move(attachment)),
        controller_names_(std::move(controller_names)) {
    up_.assign(names_.size(), true);
    init(std::move(edges));
  }

  [[nodiscard]] std::size_t switch_count() const noexcept { return names_.size(); }
  [[nodiscard]] std::size_t link_count() const noexcept { return edges_.size(); }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] std::span<const SwitchId> neighbors(SwitchId s) const { return adj_.at(s); }
  [[nodiscard]] bool is_up(SwitchId s) const { return up_.at(s); }
  [[nodiscard]] const std::string& switch_name(SwitchId s) const { return names_.at(s); }

  [[nodiscard]] std::vector<SwitchId> up_switches() const {
    std::vector<SwitchId> out;
    for (SwitchId s = 0; s < names_.size(); ++s) {
      if (up_[s]) out.push_back(s);
    }
    return out;
  }

  [[nodiscard]] bool has_edge(SwitchId x, SwitchId y) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{x, y});
  }

  [[nodiscard]] std::size_t controller_count() const noexcept { return attachment_.size(); }
  [[nodiscard]] SwitchId attachment(ControllerId c) const { return attachment_.at(c); }
  [[nodiscard]] const std::vector<SwitchId>& attachments() const noexcept { return attachment_; }
  [[nodiscard]] const std::string& controller_name(ControllerId c) const {
    return controller_names_.at(c);
  }

  [[nodiscard]] std::optional<SwitchId> find_switch(std::string_view name) const {
    for (SwitchId s = 0; s < names_.size(); ++s) {
      if (names_[s] == name) return s;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::optional<ControllerId> find_controller(std::string_view name) const {
    for (ControllerId c = 0; c < controller_names_.size(); ++c) {
      if (controller_names_[c] == name) return c;
    }
    return std::nullopt;
  }

  // M: switches hosting at least one controller, ascending.
  [[nodiscard]] std::vector<SwitchId> attachment_switches() const {
    std::set<SwitchId> m(attachment_.begin(), attachment_.end());
    return {m.begin(), m.end()};
  }

  [[nodiscard]] std::vector<ControllerId> controllers_at(SwitchId j) const {
    std::vector<ControllerId> out;
    for (ControllerId c = 0; c < attachment_.size(); ++c) {
      if (attachment_[c] == j) out.push_back(c);
    }
    return out;
  }

  [[nodiscard]] Topology with_attachments(std::vector<SwitchId> attachment,
                                          std::vector<std::string> controller_names = {}) const {
    Topology t = *this;
    t.attachment_ = std::move(attachment);
    t.controller_names_ = std::move(controller_names);
    t.fill_controller_names();
    t.validate_attachments();
    return t;
  }

  // Removes one link. Switches cut off from the component holding the most
  // controllers are marked down.
  [[nodiscard]] Topology with_link_removed(Edge e) const {
    Topology t = *this;
    std::vector<Edge> edges;
    for (const Edge& x : edges_) {
      if (x != e) edges.push_back(x);
    }
    t.rebuild_after_failure(std::move(edges));
    return t;
  }

  [[nodiscard]] Topology with_switch_removed(SwitchId s) const {
    Topology t = *this;
    t.up_.at(s) = false;
    std::vector<Edge> edges;
    for (const Edge& x : edges_) {
      if (x.a != s && x.b != s) edges.push_back(x);
    }
    t.rebuild_after_failure(std::move(edges));
    return t;
  }

 private:
  void init(std::vector<Edge> edges) {
    if (names_.empty()) throw Error(Errc::EmptyTopology, "topology has no switches");
    const auto n = names_.size();
    for (const Edge& e : edges) {
      if (e.b >= n) throw Error(Errc::UnknownSwitch, "edge references switch " + std::to_string(e.b));
      if (e.a == e.b) throw Error(Errc::SelfLoop, "self-loop on " + names_[e.a]);
    }
    std::sort(edges.begin(), edges.end());
    if (auto it = std::adjacent_find(edges.begin(), edges.end()); it != edges.end()) {
      throw Error(Errc::DuplicateEdge, names_[it->a] + "-" + names_[it->b]);
    }
    edges_ = std::move(edges);
    build_adjacency();
    if (!connected()) throw Error(Errc::Disconnected, "switch graph is not connected");
    fill_controller_names();
    validate_attachments();
  }

  void build_adjacency() {
    adj_.assign(names_.size(), {});
    for (const Edge& e : edges_) {
      adj_[e.a].push_back(e.b);
      adj_[e.b].push_back(e.a);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  [[nodiscard]] std::vector<int> components() const {
    std::vector<int> comp(names_.size(), -1);
    int next = 0;
    for (SwitchId s = 0; s < names_.size(); ++s) {
      if (!up_[s] || comp[s] >= 0) continue;
      std::deque<SwitchId> q{s};
      comp[s] = next;
      while (!q.empty()) {
        const SwitchId u = q.front();
        q.pop_front();
        for (SwitchId v : adj_[u]) {
          if (comp[v] < 0) {
            comp[v] = next;
            q.push_back(v);
          }
        }
      }
      ++next;
    }
    return comp;
  }

  [[nodiscard]] bool connected() const {
    const auto comp = components();
    return std::all_of(comp.begin(), comp.end(), [](int c) { return c <= 0; });
  }

  void rebuild_after_failure(std::vector<Edge> edges) {
    edges_ = std::move(edges);
    build_adjacency();
    const auto comp = components();
    int count = 0;
    for (int c : comp) count = std::max(count, c + 1);
    if (count <= 1) return;
    // Keep the component with the most attached controllers; ties go to the
    // component containing the lowest switch id.
    std::vector<std::size_t> weight(count, 0);
    for (SwitchId j : attachment_) {
      if (comp[j] >= 0) ++weight[comp[j]];
    }
    int keep = 0;
    for (int c = 1; c < count; ++c) {
      if (weight[c] > weight[keep]) keep = c;
    }
    std::vector<Edge> kept;
    for (SwitchId s = 0; s < names_.size(); ++s) {
      if (comp[s] != keep) up_[s] = false;
    }
    for (const Edge& e : edges_) {
      if (up_[e.a] && up_[e.b]) kept.push_back(e);
    }
    edges_ = std::move(kept);
    build_adjacency();
  }

  void fill_controller_names() {
    if (controller_names_.empty()) {
      for (std::size_t c = 0; c < attachment_.size(); ++c) {
        controller_names_.push_back("C" + std::to_string(c + 1));
      }
    }
    if (controller_names_.size() != attachment_.size()) {
      throw Error(Errc::InvalidConfig, "controller name count does not match attachments");
    }
  }

  void validate_attachments() const {
    for (std::size_t c = 0; c < attachment_.size(); ++c) {
      if (attachment_[c] >= names_.size()) {
        throw Error(Errc::DanglingAttachment, controller_names_[c] + " attached to unknown switch");
      }
    }
  }

  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<SwitchId>> adj_;
  std::vector<bool> up_;
  std::vector<SwitchId> attachment_;
  std::vector<std::string> controller_names_;
};

struct NamedEdge {
  std::string a;
  std::string b;
};

struct NamedAttachment {
  std::string controller;
  std::string sw;
};

/// Builds a topology from switch names. Ids are dense and follow first
/// appearance: `switches` first, then edge endpoints in order.
inline Topology build_topology(std::span<const NamedEdge> edges,
                               std::span<const NamedAttachment> attachments,
                               std::span<const std::string> switches = {}) {
  std::vector<std::string> names;
  std::map<std::string, SwitchId, std::less<>> ids;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = ids.try_emplace(name, static_cast<SwitchId>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  };
  for (const auto& s : switches) intern(s);
  std::vector<Edge> ids_edges;
  for (const auto& e : edges) {
    const SwitchId a = intern(e.a);
    const SwitchId b = intern(e.b);
    if (a == b) throw Error(Errc::SelfLoop, "self-loop on " + e.a);
    ids_edges.emplace_back(a, b);
  }
  std::vector<SwitchId> attach;
  std::vector<std::string> cnames;
  for (const auto& at : attachments) {
    auto it = ids.find(at.sw);
    if (it == ids.end()) {
      throw Error(Errc::DanglingAttachment, at.controller + " attached to unknown switch " + at.sw);
    }
    if (std::find(cnames.begin(), cnames.end(), at.controller) != cnames.end()) {
      throw Error(Errc::InvalidConfig, "controller " + at.controller + " attached twice");
    }
    attach.push_back(it->second);
    cnames.push_back(at.controller);
  }
  return Topology(std::move(names), std::move(ids_edges), std::move(attach), std::move(cnames));
}

// ---------------------------------------------------------------------------
// Text formats. Edge list: `<id> <id>` per line, a lone `<id>` declares an
// isolated switch, `#` starts a comment. Attachments: `<controller> <switch>`.

struct EdgeListDocument {
  std::vector<std::string> switches;
  std::vector<NamedEdge> edges;
};

namespace detail {

inline std::vector<std::vector<std::string>> tokenize_lines(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline EdgeListDocument parse_edge_list(std::string_view text) {
  EdgeListDocument doc;
  std::size_t lineno = 0;
  for (auto& tokens : detail::tokenize_lines(text)) {
    ++lineno;
    if (tokens.size() == 1) {
      doc.switches.push_back(std::move(tokens[0]));
    } else if (tokens.size() == 2) {
      doc.edges.push_back({std::move(tokens[0]), std::move(tokens[1])});
    } else {
      throw Error(Errc::ParseError, "edge list entry " + std::to_string(lineno) + " has " +
                                        std::to_string(tokens.size()) + " fields");
    }
  }
  return doc;
}

inline std::vector<NamedAttachment> parse_attachments(std::string_view text) {
  std::vector<NamedAttachment> out;
  for (auto& tokens : detail::tokenize_lines(text)) {
    if (tokens.size() != 2) throw Error(Errc::ParseError, "attachment lines need two fields");
    out.push_back({std::move(tokens[0]), std::move(tokens[1])});
  }
  return out;
}

inline Topology topology_from_text(std::string_view edge_text, std::string_view attach_text = {}) {
  const auto doc = parse_edge_list(edge_text);
  const auto att = parse_attachments(attach_text);
  return build_topology(doc.edges, att, doc.switches);
}

inline Topology load_topology(const std::string& edge_path, const std::string& attach_path = {}) {
  const std::string edges = detail::read_file(edge_path);
  const std::string att = attach_path.empty() ? std::string{} : detail::read_file(attach_path);
  return topology_from_text(edges, att);
}

// Declares every switch in id order first, so parsing the output keeps ids.
inline std::string to_edge_list(const Topology& t) {
  std::ostringstream out;
  for (SwitchId s = 0; s < t.switch_count(); ++s) out << t.switch_name(s) << '\n';
  for (const Edge& e : t.edges()) out << t.switch_name(e.a) << ' ' << t.switch_name(e.b) << '\n';
  return out.str();
}

inline std::string to_attachment_list(const Topology& t) {
  std::ostringstream out;
  for (ControllerId c = 0; c < t.controller_count(); ++c) {
    out << t.controller_name(c) << ' ' << t.switch_name(t.attachment(c)) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Generators.

/// Splits `controllers` as evenly as possible into `clusters` groups, each
/// behind a distinct random up switch. Larger groups come first.
inline Topology place_controllers(const Topology& t, std::size_t controllers, std::size_t clusters,
                                  Rng& rng) {
  if (clusters == 0 || controllers < clusters) {
    throw Error(Errc::InvalidConfig, "need controllers >= clusters >= 1");
  }
  auto pool = t.up_switches();
  if (clusters > pool.size()) throw Error(Errc::InvalidConfig, "more clusters than switches");
  // Partial Fisher-Yates: sample without replacement.
  for (std::size_t i = 0; i < clusters; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  std::vector<SwitchId> attach;
  for (std::size_t g = 0; g < clusters; ++g) {
    const std::size_t size = controllers / clusters + (g < controllers % clusters ? 1 : 0);
    attach.insert(attach.end(), size, pool[g]);
  }
  return t.with_attachments(std::move(attach));
}

inline std::vector<std::string> numbered_names(std::string_view prefix, std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(prefix) + std::to_string(i + 1));
  return names;
}

/// Random connected graph with floor(n * avg_degree / 2) links: a random
/// spanning tree, then uniformly drawn extra links. controllers = clusters = 0
/// leaves the graph without controllers.
inline Topology random_topology(std::size_t n, double avg_degree, std::size_t clusters,
                                std::size_t controllers, std::uint64_t seed) {
  if (n < 2 || avg_degree < 2.0) throw Error(Errc::InvalidConfig, "need n >= 2 and avg_degree >= 2");
  const auto m = static_cast<std::size_t>(static_cast<double>(n) * avg_degree / 2.0);
  const std::size_t max_edges = n * (n - 1) / 2;
  if (m < n - 1 || m > max_edges) {
    throw Error(Errc::InfeasibleDegree, std::to_string(m) + " links requested for " +
                                            std::to_string(n) + " switches (max " +
                                            std::to_string(max_edges) + ")");
  }
  Rng rng(seed);
  std::vector<SwitchId> order(n);
  for (SwitchId i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::set<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace(order[i], order[rng.below(i)]);
  if (2 * m > max_edges) {
    std::vector<Edge> rest;
    for (SwitchId a = 0; a < n; ++a) {
      for (SwitchId b = a + 1; b < n; ++b) {
        if (!edges.contains(Edge{a, b})) rest.emplace_back(a, b);
      }
    }
    rng.shuffle(rest);
    for (std::size_t i = 0; edges.size() < m; ++i) edges.insert(rest[i]);
  } else {
    while (edges.size() < m) {
      const auto a = static_cast<SwitchId>(rng.below(n));
      const auto b = static_cast<SwitchId>(rng.below(n));
      if (a != b) edges.emplace(a, b);
    }
  }
  Topology t(numbered_names("S", n), {edges.begin(), edges.end()}, {});
  if (controllers == 0 && clusters == 0) return t;
  return place_controllers(t, controllers, clusters, rng);
}

/// k-ary Fat-Tree: (k/2)^2 core, k*(k/2) aggregation, k*(k/2) edge switches.
/// Ids: core first, then aggregation pod by pod, then edge pod by pod.
inline Topology fat_tree(std::size_t k) {
  if (k < 2 || k % 2 != 0) throw Error(Errc::OddK, "fat-tree k must be even and >= 2");
  const std::size_t half = k / 2;
  const std::size_t core = half * half;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < core; ++c) names.push_back("core" + std::to_string(c));
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t a = 0; a < half; ++a) {
      names.push_back("agg" + std::to_string(p) + "_" + std::to_string(a));
    }
  }
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t e = 0; e < half; ++e) {
      names.push_back("edge" + std::to_string(p) + "_" + std::to_string(e));
    }
  }
  std::vector<Edge> edges;
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t a = 0; a < half; ++a) {
      const auto agg = static_cast<SwitchId>(core + p * half + a);
      for (std::size_t e = 0; e < half; ++e) {
        edges.emplace_back(agg, static_cast<SwitchId>(core + k * half + p * half + e));
      }
      for (std::size_t c = 0; c < half; ++c) {
        edges.emplace_back(agg, static_cast<SwitchId>(a * half + c));
      }
    }
  }
  return Topology(std::move(names), std::move(edges), {});
}

// ---------------------------------------------------------------------------
// Shortest paths.

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

class HopMatrix {
 public:
  HopMatrix() = default;
  explicit HopMatrix(std::size_t n) : n_(n), h_(n * n, kUnreachable) {}

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::uint32_t operator()(SwitchId i, SwitchId j) const { return h_[i * n_ + j]; }
  std::uint32_t& at(SwitchId i, SwitchId j) { return h_[i * n_ + j]; }

  // Largest finite entry.
  [[nodiscard]] std::uint32_t diameter() const {
    std::uint32_t d = 0;
    for (auto v : h_) {
      if (v != kUnreachable) d = std::max(d, v);
    }
    return d;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> h_;
};

/// BFS from every up switch; rows and columns of down switches stay unreachable.
inline HopMatrix all_pairs_hops(const Topology& t) {
  const auto n = t.switch_count();
  HopMatrix h(n);
  std::vector<SwitchId> queue;
  queue.reserve(n);
  for (SwitchId s = 0; s < n; ++s) {
    if (!t.is_up(s)) continue;
    queue.clear();
    queue.push_back(s);
    h.at(s, s) = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const SwitchId u = queue[head];
      for (SwitchId v : t.neighbors(u)) {
        if (h(s, v) == kUnreachable) {
          h.at(s, v) = h(s, u) + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return h;
}

/// Neighbor of `from` one hop closer to `to`; lowest id on ties.
inline SwitchId next_hop(const Topology& t, const HopMatrix& h, SwitchId from, SwitchId to) {
  const auto d = h(from, to);
  if (from == to || d == kUnreachable) return kNoSwitch;
  for (SwitchId n : t.neighbors(from)) {
    if (h(n, to) + 1 == d) return n;
  }
  return kNoSwitch;
}

inline std::vector<SwitchId> shortest_path(const Topology& t, const HopMatrix& h, SwitchId from,
                                           SwitchId to) {
  std::vector<SwitchId> path{from};
  while (path.back() != to) {
    const SwitchId n = next_hop(t, h, path.back(), to);
    if (n == kNoSwitch) return {};
    path.push_back(n);
  }
  return path;
}

}  // namespace p4bft

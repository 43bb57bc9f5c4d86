#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "p4bft/error.hpp"
#include "p4bft/min_cost_flow.hpp"
#include "p4bft/random.hpp"
#include "p4bft/topology.hpp"

namespace p4bft {

struct Weights {
  double footprint = 1.0;  // w1
  double delay = 1.0;      // w2
};

/// Processing-node placement instance.
///
/// Every active controller serves every request, so each target costs |C|
/// units of processing capacity wherever it is placed.
struct PlacementProblem {
  HopMatrix hops;
  std::vector<std::uint32_t> cluster_size;  // |C^j| indexed by switch
  std::uint32_t controller_count = 0;       // |C|
  std::vector<bool> candidate;              // P4-capable switches
  std::vector<SwitchId> targets;            // ascending
  std::vector<std::optional<std::uint64_t>> capacity;  // q_i, nullopt = unbounded
  Weights weights;
  std::optional<std::uint32_t> delay_bound;  // T, nullopt = unbounded

  [[nodiscard]] std::size_t switch_count() const noexcept { return hops.size(); }

  [[nodiscard]] std::vector<SwitchId> attachment_switches() const {
    std::vector<SwitchId> m;
    for (SwitchId j = 0; j < cluster_size.size(); ++j) {
      if (cluster_size[j] > 0) m.push_back(j);
    }
    return m;
  }

  void validate() const {
    const auto n = switch_count();
    if (cluster_size.size() != n || candidate.size() != n || capacity.size() != n) {
      throw Error(Errc::InvalidProblem, "per-switch vectors do not match the hop matrix");
    }
    if (controller_count == 0) throw Error(Errc::InvalidProblem, "no active controllers");
    if (std::none_of(candidate.begin(), candidate.end(), [](bool b) { return b; })) {
      throw Error(Errc::InvalidProblem, "empty candidate set");
    }
    if (targets.empty()) throw Error(Errc::InvalidProblem, "no targets");
    for (SwitchId k : targets) {
      if (k >= n) throw Error(Errc::InvalidProblem, "target out of range");
    }
    if (!(weights.footprint >= 0.0) || !(weights.delay >= 0.0) ||
        (weights.footprint == 0.0 && weights.delay == 0.0)) {
      throw Error(Errc::InvalidProblem, "weights must be non-negative and not both zero");
    }
  }
};

/// Problem over the given active controllers, with candidates and targets
/// set to every up switch and defaults q = T = unbounded, (w1, w2) = (1, 1).
inline PlacementProblem make_problem(const Topology& t, const HopMatrix& hops,
                                     std::span<const ControllerId> active) {
  PlacementProblem p;
  const auto n = t.switch_count();
  p.hops = hops;
  p.cluster_size.assign(n, 0);
  for (ControllerId c : active) {
    if (t.is_up(t.attachment(c))) {
      ++p.cluster_size[t.attachment(c)];
      ++p.controller_count;
    }
  }
  p.candidate.assign(n, false);
  for (SwitchId s : t.up_switches()) {
    p.candidate[s] = true;
    p.targets.push_back(s);
  }
  p.capacity.assign(n, std::nullopt);
  return p;
}

inline PlacementProblem make_problem(const Topology& t) {
  std::vector<ControllerId> all(t.controller_count());
  for (ControllerId c = 0; c < all.size(); ++c) all[c] = c;
  return make_problem(t, all_pairs_hops(t), all);
}

/// `count` distinct random candidates among the up switches.
inline std::vector<bool> sample_candidates(const Topology& t, std::size_t count, Rng& rng) {
  auto pool = t.up_switches();
  count = std::clamp<std::size_t>(count, 1, pool.size());
  for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  std::vector<bool> mask(t.switch_count(), false);
  for (std::size_t i = 0; i < count; ++i) mask[pool[i]] = true;
  return mask;
}

// Coverage fraction to candidate count; at least one node.
inline std::size_t coverage_count(std::size_t switches, double fraction) {
  const auto c = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(switches)));
  return std::clamp<std::size_t>(c, 1, switches);
}

// ---------------------------------------------------------------------------
// Per-(i, k) terms.

inline constexpr std::uint64_t kInfiniteFootprint = std::numeric_limits<std::uint64_t>::max();

/// Packet-hops for target k when processed at i: one deduced packet i -> k
/// plus |C^j| packets from every controller-hosting switch j to i.
inline std::uint64_t footprint_term(const PlacementProblem& p, SwitchId i, SwitchId k) {
  if (p.hops(i, k) == kUnreachable) return kInfiniteFootprint;
  std::uint64_t f = p.hops(i, k);
  for (SwitchId j = 0; j < p.cluster_size.size(); ++j) {
    if (p.cluster_size[j] == 0) continue;
    if (p.hops(j, i) == kUnreachable) return kInfiniteFootprint;
    f += std::uint64_t{p.cluster_size[j]} * p.hops(j, i);
  }
  return f;
}

/// Worst-case hops from any controller-hosting switch via i to k.
inline std::uint32_t delay_term(const PlacementProblem& p, SwitchId i, SwitchId k) {
  if (p.hops(i, k) == kUnreachable) return kUnreachable;
  std::uint32_t d = 0;
  for (SwitchId j = 0; j < p.cluster_size.size(); ++j) {
    if (p.cluster_size[j] == 0) continue;
    if (p.hops(j, i) == kUnreachable) return kUnreachable;
    d = std::max(d, p.hops(j, i) + p.hops(i, k));
  }
  return d;
}

inline bool pair_feasible(const PlacementProblem& p, SwitchId i, SwitchId k) {
  if (!p.candidate[i]) return false;
  const auto d = delay_term(p, i, k);
  if (d == kUnreachable) return false;
  return !p.delay_bound || d <= *p.delay_bound;
}

inline double pair_cost(const PlacementProblem& p, SwitchId i, SwitchId k) {
  return p.weights.footprint * static_cast<double>(footprint_term(p, i, k)) +
         p.weights.delay * static_cast<double>(delay_term(p, i, k));
}

/// Tie preference: the destination itself first, then lowest id.
inline std::int64_t tie_rank(SwitchId i, SwitchId k) { return i == k ? 0 : std::int64_t{i} + 1; }

/// Objective with the tie rank as an exact secondary key.
struct LexCost {
  double primary = 0.0;
  std::int64_t secondary = 0;

  friend LexCost operator+(LexCost a, LexCost b) {
    return {a.primary + b.primary, a.secondary + b.secondary};
  }
  friend LexCost operator-(LexCost a, LexCost b) {
    return {a.primary - b.primary, a.secondary - b.secondary};
  }
  friend LexCost operator*(LexCost a, std::int64_t m) {
    return {a.primary * static_cast<double>(m), a.secondary * m};
  }
  friend bool operator<(LexCost a, LexCost b) {
    if (a.primary != b.primary) return a.primary < b.primary;
    return a.secondary < b.secondary;
  }
  friend bool operator==(LexCost, LexCost) = default;
};

// ---------------------------------------------------------------------------
// Solutions.

struct TargetTerms {
  SwitchId target = 0;
  SwitchId node = 0;
  std::uint64_t footprint = 0;
  std::uint32_t delay = 0;
};

struct PlacementSolution {
  std::vector<TargetTerms> terms;  // ascending by target
  std::uint64_t footprint = 0;     // M_F
  std::uint32_t delay = 0;         // M_D: max delay term across targets
  std::uint64_t delay_sum = 0;     // sum of delay terms
  double objective = 0.0;          // w1 * M_F + w2 * delay_sum

  [[nodiscard]] SwitchId node_for(SwitchId target) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), target,
                               [](const TargetTerms& t, SwitchId k) { return t.target < k; });
    return it != terms.end() && it->target == target ? it->node : kNoSwitch;
  }
};

/// Evaluates an assignment given as node-per-target (parallel to p.targets).
inline PlacementSolution evaluate(const PlacementProblem& p, std::span<const SwitchId> nodes) {
  PlacementSolution s;
  for (std::size_t t = 0; t < p.targets.size(); ++t) {
    const SwitchId k = p.targets[t];
    const SwitchId i = nodes[t];
    TargetTerms term{k, i, footprint_term(p, i, k), delay_term(p, i, k)};
    s.footprint += term.footprint;
    s.delay = std::max(s.delay, term.delay);
    s.delay_sum += term.delay;
    s.terms.push_back(term);
  }
  s.objective = p.weights.footprint * static_cast<double>(s.footprint) +
                p.weights.delay * static_cast<double>(s.delay_sum);
  std::sort(s.terms.begin(), s.terms.end(),
            [](const TargetTerms& a, const TargetTerms& b) { return a.target < b.target; });
  return s;
}

/// Checks single assignment, candidate membership, capacity and delay bound.
inline bool is_feasible(const PlacementProblem& p, const PlacementSolution& s) {
  if (s.terms.size() != p.targets.size()) return false;
  std::vector<std::uint64_t> load(p.switch_count(), 0);
  for (const auto& term : s.terms) {
    if (!pair_feasible(p, term.node, term.target)) return false;
    load[term.node] += p.controller_count;
  }
  for (SwitchId i = 0; i < load.size(); ++i) {
    if (p.capacity[i] && load[i] > *p.capacity[i]) return false;
  }
  return true;
}

// Targets each node can take: floor(q_i / |C|).
inline std::size_t slots_for(const PlacementProblem& p, SwitchId i) {
  if (!p.capacity[i]) return p.targets.size();
  return static_cast<std::size_t>(
      std::min<std::uint64_t>(*p.capacity[i] / p.controller_count, p.targets.size()));
}

/// Exact optimum of w1 * M_F + w2 * delay_sum under capacity, delay bound and
/// single assignment, via min-cost flow on the target/candidate bipartite graph.
inline PlacementSolution solve(const PlacementProblem& p) {
  p.validate();
  const auto n = p.switch_count();
  const auto nt = p.targets.size();
  std::vector<SwitchId> cands;
  for (SwitchId i = 0; i < n; ++i) {
    if (p.candidate[i] && slots_for(p, i) > 0) cands.push_back(i);
  }
  const int source = 0;
  const int sink = static_cast<int>(1 + nt + cands.size());
  MinCostFlow<LexCost> flow(static_cast<std::size_t>(sink) + 1);
  struct Arc {
    int id;
    std::size_t target;
    SwitchId node;
  };
  std::vector<Arc> arcs;
  for (std::size_t t = 0; t < nt; ++t) {
    flow.add_edge(source, static_cast<int>(1 + t), 1, {});
    const SwitchId k = p.targets[t];
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const SwitchId i = cands[c];
      if (!pair_feasible(p, i, k)) continue;
      const int id = flow.add_edge(static_cast<int>(1 + t), static_cast<int>(1 + nt + c), 1,
                                   LexCost{pair_cost(p, i, k), tie_rank(i, k)});
      arcs.push_back({id, t, i});
    }
  }
  for (std::size_t c = 0; c < cands.size(); ++c) {
    flow.add_edge(static_cast<int>(1 + nt + c), sink,
                  static_cast<std::int64_t>(slots_for(p, cands[c])), {});
  }
  const auto res = flow.solve(source, sink);
  if (res.flow < static_cast<std::int64_t>(nt)) {
    throw Error(Errc::Infeasible, "no assignment satisfies capacity and delay bound");
  }
  std::vector<SwitchId> nodes(nt, kNoSwitch);
  for (const Arc& a : arcs) {
    if (flow.flow_on(a.id) > 0) nodes[a.target] = a.node;
  }
  return evaluate(p, nodes);
}

/// Exhaustive search oracle for small instances (at most 10 switches).
/// Explores candidates per target in tie-rank order and keeps the first
/// strict improvement, pruning with the sum of per-target minima.
inline PlacementSolution brute_force(const PlacementProblem& p) {
  p.validate();
  const auto n = p.switch_count();
  if (n > 10) throw Error(Errc::TooLarge, "brute force is limited to 10 switches");
  const auto nt = p.targets.size();

  std::vector<std::vector<std::pair<SwitchId, LexCost>>> options(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const SwitchId k = p.targets[t];
    for (SwitchId i = 0; i < n; ++i) {
      if (pair_feasible(p, i, k) && slots_for(p, i) > 0) {
        options[t].push_back({i, LexCost{pair_cost(p, i, k), tie_rank(i, k)}});
      }
    }
    std::sort(options[t].begin(), options[t].end(), [k](const auto& a, const auto& b) {
      return tie_rank(a.first, k) < tie_rank(b.first, k);
    });
    if (options[t].empty()) throw Error(Errc::Infeasible, "target has no feasible node");
  }
  std::vector<LexCost> suffix_min(nt + 1);
  for (std::size_t t = nt; t-- > 0;) {
    LexCost best = options[t].front().second;
    for (const auto& o : options[t]) best = std::min(best, o.second);
    suffix_min[t] = suffix_min[t + 1] + best;
  }

  std::vector<std::size_t> used(n, 0);
  std::vector<SwitchId> current(nt), best_nodes;
  std::optional<LexCost> best;
  auto dfs = [&](auto&& self, std::size_t t, LexCost partial) -> void {
    if (best && !(partial + suffix_min[t] < *best)) return;
    if (t == nt) {
      best = partial;
      best_nodes = current;
      return;
    }
    for (const auto& [i, cost] : options[t]) {
      if (used[i] >= slots_for(p, i)) continue;
      ++used[i];
      current[t] = i;
      self(self, t + 1, partial + cost);
      --used[i];
    }
  };
  dfs(dfs, 0, LexCost{});
  if (!best) throw Error(Errc::Infeasible, "no assignment satisfies capacity and delay bound");
  return evaluate(p, best_nodes);
}

/// Destination processing (x(k) = k), the baseline. Ignores candidates,
/// capacity and delay bound.
inline PlacementSolution soa_solution(const PlacementProblem& p) { return evaluate(p, p.targets); }

struct ParetoPoint {
  std::uint64_t footprint = 0;  // M_F
  std::uint32_t delay = 0;      // M_D
  PlacementSolution witness;
};

/// Non-dominated (M_F, M_D) pairs, ascending in M_F. Each achievable delay
/// level is imposed as a bound and M_F is minimized under it.
inline std::vector<ParetoPoint> pareto(const PlacementProblem& p) {
  p.validate();
  std::vector<std::uint32_t> levels;
  for (SwitchId k : p.targets) {
    for (SwitchId i = 0; i < p.switch_count(); ++i) {
      if (pair_feasible(p, i, k)) levels.push_back(delay_term(p, i, k));
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<ParetoPoint> found;
  PlacementProblem q = p;
  q.weights = {1.0, 0.0};
  for (std::uint32_t level : levels) {
    q.delay_bound = level;
    try {
      auto s = solve(q);
      // Report under the caller's weights so the witness objective is meaningful.
      s.objective = p.weights.footprint * static_cast<double>(s.footprint) +
                    p.weights.delay * static_cast<double>(s.delay_sum);
      found.push_back({s.footprint, s.delay, std::move(s)});
    } catch (const Error& e) {
      if (e.code() != Errc::Infeasible) throw;
    }
  }
  if (found.empty()) throw Error(Errc::Infeasible, "no feasible assignment");
  std::sort(found.begin(), found.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.footprint != b.footprint ? a.footprint < b.footprint : a.delay < b.delay;
  });
  std::vector<ParetoPoint> front;
  for (auto& pt : found) {
    if (front.empty() || pt.delay < front.back().delay) front.push_back(std::move(pt));
  }
  return front;
}

/// Reported convention: adds the controller -> attachment switch hop,
/// i.e. |C| packets to the footprint and one hop to the delay.
struct ReportedMetrics {
  SwitchId target = 0;
  SwitchId node = 0;
  std::uint64_t footprint = 0;  // F_C
  std::uint32_t delay = 0;      // F_D
};

inline std::vector<ReportedMetrics> reported_metrics(const PlacementProblem& p,
                                                     const PlacementSolution& s) {
  std::vector<ReportedMetrics> out;
  out.reserve(s.terms.size());
  for (const auto& t : s.terms) {
    out.push_back({t.target, t.node, t.footprint + p.controller_count, t.delay + 1});
  }
  return out;
}

}  // namespace p4bft

#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "p4bft/optimizer.hpp"
#include "p4bft/packet.hpp"
#include "p4bft/pipeline.hpp"
#include "p4bft/topology.hpp"

namespace p4bft {

enum class Behavior { Correct, Byzantine, Crashed };

constexpr std::string_view to_string(Behavior b) noexcept {
  switch (b) {
    case Behavior::Correct: return "correct";
    case Behavior::Byzantine: return "byzantine";
    case Behavior::Crashed: return "crashed";
  }
  return "unknown";
}

using CorruptionRule = std::function<Bytes(const Bytes& correct, ControllerId id)>;

// XORs every byte with an id-derived nonzero mask and appends the id, so
// each faulty replica's payload differs from the correct one and from every
// other faulty replica's.
inline Bytes xor_corruption(const Bytes& correct, ControllerId id) {
  const auto mask = static_cast<std::uint8_t>(1 + (id * 37u + 11u) % 255u);
  Bytes out = correct;
  for (auto& b : out) b ^= mask;
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(id >> shift));
  return out;
}

struct ControllerReplica {
  ControllerId id = 0;
  SwitchId attachment = 0;
  Behavior behavior = Behavior::Correct;
  CorruptionRule corruption;  // empty = xor_corruption
};

inline std::optional<ControlPacket> replica_respond(const ControllerReplica& r,
                                                    std::uint32_t request_id, SwitchId destination,
                                                    const Bytes& correct_payload) {
  ControlPacket p;
  p.request_id = request_id;
  p.controller_id = static_cast<std::uint16_t>(r.id);
  p.destination = static_cast<std::uint16_t>(destination);
  switch (r.behavior) {
    case Behavior::Crashed:
      return std::nullopt;
    case Behavior::Correct:
      p.payload = correct_payload;
      break;
    case Behavior::Byzantine:
      p.payload = r.corruption ? r.corruption(correct_payload, r.id)
                               : xor_corruption(correct_payload, r.id);
      break;
  }
  return p;
}

constexpr std::size_t required_matching(std::size_t fm) noexcept { return fm + 1; }

constexpr std::size_t min_replicas(std::size_t fm, std::size_t fa) noexcept {
  return 2 * fm + fa + 1;
}

/// Processing and forwarding tables for every switch, along shortest-hop
/// paths with the lowest-id tie-break.
inline std::vector<SwitchTables> derive_tables(const PlacementSolution& s, const Topology& t,
                                               const HopMatrix& h) {
  const auto n = t.switch_count();
  std::vector<SwitchTables> tables(n);
  for (auto& tb : tables) {
    tb.process_forwarding = ExactMatchTable(n);
    tb.l2_forwarding = ExactMatchTable(n);
  }
  for (const auto& term : s.terms) {
    const SwitchId k = term.target;
    const SwitchId x = term.node;
    tables[x].processing.push_back(k);
    tables[k].trusted_signer = x;
    for (SwitchId sw = 0; sw < n; ++sw) {
      if (!t.is_up(sw)) continue;
      if (sw != x) {
        const SwitchId nh = next_hop(t, h, sw, x);
        if (nh != kNoSwitch) tables[sw].process_forwarding.insert(k, nh);
      }
      if (sw != k) {
        const SwitchId nh = next_hop(t, h, sw, k);
        if (nh != kNoSwitch) tables[sw].l2_forwarding.insert(k, nh);
      }
    }
  }
  for (auto& tb : tables) std::sort(tb.processing.begin(), tb.processing.end());
  return tables;
}

// ---------------------------------------------------------------------------
// Reassigner.

/// How the Reassigner places processing nodes.
struct PlacementPolicy {
  Weights weights;
  std::optional<std::uint32_t> delay_bound;
  std::vector<std::optional<std::uint64_t>> capacity;  // per switch; empty = unbounded
  std::vector<bool> candidate;                         // per switch; empty = every switch
  bool destination_processing = false;                 // baseline: x(k) = k
};

struct FaultEvent {
  enum class Kind { MaliciousDetected, ReplicaFailed, LinkFailed, SwitchFailed };

  Kind kind = Kind::MaliciousDetected;
  std::vector<ControllerId> controllers;  // MaliciousDetected, ReplicaFailed
  SwitchId reporter = kNoSwitch;          // MaliciousDetected
  Edge link;                              // LinkFailed
  SwitchId sw = kNoSwitch;                // SwitchFailed

  static FaultEvent malicious(std::vector<ControllerId> ids, SwitchId reporter) {
    FaultEvent e;
    e.kind = Kind::MaliciousDetected;
    e.controllers = std::move(ids);
    e.reporter = reporter;
    return e;
  }
  static FaultEvent replica_failed(ControllerId id) {
    FaultEvent e;
    e.kind = Kind::ReplicaFailed;
    e.controllers = {id};
    return e;
  }
  static FaultEvent link_failed(Edge link) {
    FaultEvent e;
    e.kind = Kind::LinkFailed;
    e.link = link;
    return e;
  }
  static FaultEvent switch_failed(SwitchId s) {
    FaultEvent e;
    e.kind = Kind::SwitchFailed;
    e.sw = s;
    return e;
  }
};

constexpr std::string_view to_string(FaultEvent::Kind k) noexcept {
  switch (k) {
    case FaultEvent::Kind::MaliciousDetected: return "malicious-detected";
    case FaultEvent::Kind::ReplicaFailed: return "replica-failed";
    case FaultEvent::Kind::LinkFailed: return "link-failed";
    case FaultEvent::Kind::SwitchFailed: return "switch-failed";
  }
  return "unknown";
}

struct ReassignerState {
  Topology topology;
  HopMatrix hops;
  std::size_t fm = 0;
  std::size_t fa = 0;
  PlacementPolicy policy;
  std::vector<ControllerId> active;       // ascending
  std::vector<ControllerId> excluded;     // detected faulty or failed
  std::vector<ControllerId> unreachable;  // attached to a down switch
  PlacementProblem problem;
  PlacementSolution placement;
  std::size_t required = 1;
  std::vector<SwitchTables> tables;
  bool degraded = false;          // |active| < 2 F_M + F_A + 1
  bool placement_fallback = false;  // re-solve was infeasible; using destination processing
};

namespace detail {

inline void replace_placement(ReassignerState& s) {
  s.hops = all_pairs_hops(s.topology);
  std::vector<ControllerId> reachable, unreachable;
  for (ControllerId c : s.active) {
    (s.topology.is_up(s.topology.attachment(c)) ? reachable : unreachable).push_back(c);
  }
  s.active = std::move(reachable);
  s.unreachable.insert(s.unreachable.end(), unreachable.begin(), unreachable.end());
  std::sort(s.unreachable.begin(), s.unreachable.end());

  s.degraded = s.active.size() < min_replicas(s.fm, s.fa);
  s.required = required_matching(s.fm);
  s.placement_fallback = false;
  s.problem = make_problem(s.topology, s.hops, s.active);
  s.problem.weights = s.policy.weights;
  s.problem.delay_bound = s.policy.delay_bound;
  if (!s.policy.capacity.empty()) s.problem.capacity = s.policy.capacity;
  if (!s.policy.candidate.empty()) {
    for (SwitchId i = 0; i < s.problem.candidate.size(); ++i) {
      s.problem.candidate[i] = s.problem.candidate[i] && s.policy.candidate[i];
    }
  }
  if (s.active.empty()) {
    s.placement = {};
    s.tables.assign(s.topology.switch_count(), {});
    return;
  }
  if (s.policy.destination_processing) {
    s.placement = soa_solution(s.problem);
  } else {
    try {
      s.placement = solve(s.problem);
    } catch (const Error& e) {
      if (e.code() != Errc::Infeasible && e.code() != Errc::InvalidProblem) throw;
      s.placement = soa_solution(s.problem);
      s.placement_fallback = true;
      s.degraded = true;
    }
  }
  s.tables = derive_tables(s.placement, s.topology, s.hops);
}

}  // namespace detail

/// Initial placement with every controller active.
inline ReassignerState bootstrap(Topology topology, std::size_t fm, std::size_t fa,
                                 PlacementPolicy policy) {
  ReassignerState s;
  s.topology = std::move(topology);
  s.fm = fm;
  s.fa = fa;
  s.policy = std::move(policy);
  for (ControllerId c = 0; c < s.topology.controller_count(); ++c) s.active.push_back(c);
  detail::replace_placement(s);
  return s;
}

/// Applies one fault event and recomputes placement, tables and quorum.
inline ReassignerState handle_event(const ReassignerState& state, const FaultEvent& e) {
  ReassignerState s = state;
  switch (e.kind) {
    case FaultEvent::Kind::MaliciousDetected:
    case FaultEvent::Kind::ReplicaFailed:
      for (ControllerId c : e.controllers) {
        auto it = std::find(s.active.begin(), s.active.end(), c);
        if (it == s.active.end()) continue;
        s.active.erase(it);
        s.excluded.push_back(c);
      }
      std::sort(s.excluded.begin(), s.excluded.end());
      break;
    case FaultEvent::Kind::LinkFailed:
      if (s.topology.has_edge(e.link.a, e.link.b)) s.topology = s.topology.with_link_removed(e.link);
      break;
    case FaultEvent::Kind::SwitchFailed:
      if (e.sw < s.topology.switch_count() && s.topology.is_up(e.sw)) {
        s.topology = s.topology.with_switch_removed(e.sw);
      }
      break;
  }
  detail::replace_placement(s);
  return s;
}

}  // namespace p4bft

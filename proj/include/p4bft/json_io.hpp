#pragma once

#include <nlohmann/json.hpp>

#include "p4bft/control.hpp"
#include "p4bft/optimizer.hpp"
#include "p4bft/sim.hpp"
#include "p4bft/sweep.hpp"
#include "p4bft/topology.hpp"

namespace p4bft {

// Insertion-ordered so output reads top-down.
using json = nlohmann::ordered_json;

inline json solution_json(const PlacementSolution& s, const Topology& t) {
  json terms = json::array();
  for (const auto& term : s.terms) {
    terms.push_back({{"target", t.switch_name(term.target)},
                     {"node", t.switch_name(term.node)},
                     {"footprint", term.footprint},
                     {"delay", term.delay}});
  }
  return {{"footprint", s.footprint},
          {"delay", s.delay},
          {"delay_sum", s.delay_sum},
          {"objective", s.objective},
          {"assignment", terms}};
}

inline json reported_json(const std::vector<ReportedMetrics>& r, const Topology& t) {
  json out = json::array();
  for (const auto& m : r) {
    out.push_back({{"target", t.switch_name(m.target)},
                   {"node", t.switch_name(m.node)},
                   {"footprint", m.footprint},
                   {"delay", m.delay}});
  }
  return out;
}

inline json controller_names_json(const std::vector<ControllerId>& ids, const Topology& t) {
  json out = json::array();
  for (ControllerId c : ids) out.push_back(t.controller_name(c));
  return out;
}

inline json report_json(const MetricsReport& r, const Topology& t) {
  json reqs = json::array();
  for (const auto& m : r.requests) {
    json j = {{"id", m.id},
              {"target", t.switch_name(m.target)},
              {"processing_node",
               m.processing_node == kNoSwitch ? json(nullptr) : json(t.switch_name(m.processing_node))},
              {"footprint", m.footprint},
              {"in_network_footprint", m.in_network_footprint},
              {"delay", m.delay ? json(*m.delay) : json(nullptr)},
              {"applies", m.applies},
              {"correct", m.correct},
              {"reported_faulty", controller_names_json(m.reported_faulty, t)}};
    reqs.push_back(std::move(j));
  }
  return {{"mode", to_string(r.mode)},
          {"hop_delay", r.hop_delay},
          {"total_footprint", r.total_footprint},
          {"total_in_network_footprint", r.total_in_network_footprint},
          {"delivered", r.delivered},
          {"mean_delay", r.mean_delay},
          {"p50_delay", r.p50_delay},
          {"p95_delay", r.p95_delay},
          {"max_delay", r.max_delay},
          {"degraded", r.degraded},
          {"excluded", controller_names_json(r.excluded, t)},
          {"reassignments", r.reassignments},
          {"requests", reqs}};
}

inline json tables_json(const SwitchTables& tb, const Topology& t) {
  auto table = [&](const ExactMatchTable& m) {
    json o = json::object();
    for (SwitchId k : m.keys()) o[t.switch_name(k)] = t.switch_name(*m.lookup(k));
    return o;
  };
  json processing = json::array();
  for (SwitchId k : tb.processing) processing.push_back(t.switch_name(k));
  return {{"processing", processing},
          {"process_forwarding", table(tb.process_forwarding)},
          {"l2_forwarding", table(tb.l2_forwarding)},
          {"trusted_signer",
           tb.trusted_signer ? json(t.switch_name(*tb.trusted_signer)) : json(nullptr)}};
}

inline json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

}  // namespace p4bft

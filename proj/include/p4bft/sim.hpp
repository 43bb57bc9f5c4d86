#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "p4bft/control.hpp"
#include "p4bft/optimizer.hpp"
#include "p4bft/packet.hpp"
#include "p4bft/pipeline.hpp"
#include "p4bft/random.hpp"
#include "p4bft/topology.hpp"

namespace p4bft {

using Tick = std::int64_t;

enum class Mode { P4bft, Soa };

constexpr std::string_view to_string(Mode m) noexcept {
  return m == Mode::P4bft ? "p4bft" : "soa";
}

/// Link and comparison latencies in ticks. Comparison cost applies to every
/// unprocessed packet a processing node (or, in the baseline, a destination)
/// runs through its hash registers.
struct DelayProfile {
  Tick hop_delay = 1;
  Tick processing_delay = 0;

  // Data-plane comparison: negligible next to a link hop.
  static constexpr DelayProfile hardware_like() { return {100, 1}; }
  // Software comparison: on the order of a link hop.
  static constexpr DelayProfile software_like() { return {100, 100}; }
};

struct Request {
  std::uint32_t id = 0;
  SwitchId target = 0;
  Bytes payload;
};

struct SimConfig {
  Topology topology;
  std::size_t fm = 0;
  std::size_t fa = 0;
  std::vector<ControllerId> byzantine;
  std::vector<ControllerId> crashed;
  CorruptionRule corruption;  // empty = xor_corruption
  PlacementPolicy policy;
  std::optional<double> coverage;  // P4-capable fraction when policy.candidate is empty
  std::vector<Request> requests;   // explicit schedule; empty = generated
  std::size_t request_count = 0;   // generated: 0 = one request per up switch, else random targets
  DelayProfile profile;
  Tick send_jitter = 0;       // each replica sends at issue + U[0, send_jitter]
  Tick request_interval = 0;  // 0 = long enough that requests never overlap
  std::uint64_t seed = 1;
  Mode mode = Mode::P4bft;
  bool reassign_on_detection = true;
  std::size_t register_slots = 64;
  std::function<void(const nlohmann::json&)> trace;
};

struct RequestMetrics {
  std::uint32_t id = 0;
  SwitchId target = 0;
  SwitchId processing_node = kNoSwitch;
  Tick issued = 0;
  std::uint64_t footprint = 0;             // packet-hops incl. controller -> attachment hop
  std::uint64_t in_network_footprint = 0;  // switch-to-switch packet-hops only
  std::optional<Tick> delay;               // issue -> apply-config
  std::size_t applies = 0;
  bool correct = false;  // exactly one apply-config, carrying the correct payload
  std::vector<ControllerId> reported_faulty;
};

struct MetricsReport {
  Mode mode = Mode::P4bft;
  Tick hop_delay = 1;
  std::vector<RequestMetrics> requests;
  std::uint64_t total_footprint = 0;
  std::uint64_t total_in_network_footprint = 0;
  std::size_t delivered = 0;
  double mean_delay = 0.0;  // over delivered requests, ticks
  Tick p50_delay = 0;
  Tick p95_delay = 0;
  Tick max_delay = 0;
  bool degraded = false;  // guarantees void at some point in the run
  std::vector<ControllerId> excluded;
  std::size_t reassignments = 0;
};

enum class FootprintConvention {
  Reported,   // counts the controller -> attachment hop
  InNetwork,  // switch-to-switch hops only
};

/// 1 - F_C(p4bft) / F_C(soa).
inline double improvement(const MetricsReport& p4bft, const MetricsReport& soa,
                          FootprintConvention conv = FootprintConvention::Reported) {
  const auto a = conv == FootprintConvention::Reported ? p4bft.total_footprint
                                                       : p4bft.total_in_network_footprint;
  const auto b = conv == FootprintConvention::Reported ? soa.total_footprint
                                                       : soa.total_in_network_footprint;
  if (b == 0) throw Error(Errc::DivisionByZero, "baseline footprint is zero");
  return 1.0 - static_cast<double>(a) / static_cast<double>(b);
}

inline Bytes default_payload(std::uint32_t request_id, SwitchId target, Rng& rng) {
  std::string s = "cfg:req=" + std::to_string(request_id) + ":dst=" + std::to_string(target) + ":";
  Bytes b = to_bytes(s);
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(rng.below(256)));
  return b;
}

inline std::vector<Request> make_schedule(const Topology& t, std::size_t count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x5C4E));
  const auto up = t.up_switches();
  std::vector<Request> out;
  const std::size_t n = count == 0 ? up.size() : count;
  for (std::size_t r = 0; r < n; ++r) {
    const SwitchId k = count == 0 ? up[r] : up[rng.below(up.size())];
    const auto id = static_cast<std::uint32_t>(r + 1);
    out.push_back({id, k, default_payload(id, k, rng)});
  }
  return out;
}

namespace detail {

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

class Simulation {
 public:
  explicit Simulation(const SimConfig& c) : cfg_(c) {}

  MetricsReport run() {
    validate();
    setup();
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      push(static_cast<Tick>(r) * interval_, Issue{r});
    }
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      std::visit([this](auto& e) { handle(e); }, ev.body);
    }
    apply_pending_events();
    return assemble();
  }

 private:
  struct Issue {
    std::size_t request;
  };
  struct Arrive {
    SwitchId at;
    SwitchId from;  // kNoSwitch: straight from a controller
    ControlPacket packet;
  };
  struct Clear {
    SwitchId at;
    std::uint32_t request_id;
  };
  struct Event {
    Tick time;
    std::uint64_t seq;
    std::variant<Issue, Arrive, Clear> body;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  void validate() const {
    const auto nc = cfg_.topology.controller_count();
    for (ControllerId c : cfg_.byzantine) {
      if (c >= nc) throw Error(Errc::InvalidConfig, "byzantine controller out of range");
    }
    for (ControllerId c : cfg_.crashed) {
      if (c >= nc) throw Error(Errc::InvalidConfig, "crashed controller out of range");
    }
    if (nc == 0) throw Error(Errc::InvalidConfig, "topology has no controllers");
    if (nc > 0xFFFF || cfg_.topology.switch_count() > 0xFFFF) {
      throw Error(Errc::InvalidConfig, "ids must fit the 16-bit header fields");
    }
    if (cfg_.profile.hop_delay <= 0 || cfg_.profile.processing_delay < 0 || cfg_.send_jitter < 0) {
      throw Error(Errc::InvalidConfig, "delays must be non-negative, hop delay positive");
    }
  }

  void setup() {
    const auto& topo = cfg_.topology;
    const auto n = topo.switch_count();
    rng_ = std::make_unique<Rng>(derive_seed(cfg_.seed, 0x7177));

    replicas_.resize(topo.controller_count());
    for (ControllerId c = 0; c < replicas_.size(); ++c) {
      replicas_[c] = {c, topo.attachment(c), Behavior::Correct, cfg_.corruption};
    }
    for (ControllerId c : cfg_.byzantine) replicas_[c].behavior = Behavior::Byzantine;
    for (ControllerId c : cfg_.crashed) replicas_[c].behavior = Behavior::Crashed;

    PlacementPolicy policy = cfg_.policy;
    policy.destination_processing = cfg_.mode == Mode::Soa;
    if (policy.candidate.empty() && cfg_.coverage) {
      Rng crng(derive_seed(cfg_.seed, 0xC0FE));
      policy.candidate = sample_candidates(topo, coverage_count(n, *cfg_.coverage), crng);
    }
    state_ = bootstrap(topo, cfg_.fm, cfg_.fa, std::move(policy));
    degraded_ = state_.degraded;

    auto keys = std::make_shared<KeyRing>();
    for (SwitchId s = 0; s < n; ++s) keys->push_back(derive_switch_key(cfg_.seed, s));
    keys_ = keys;
    pipelines_.clear();
    for (SwitchId s = 0; s < n; ++s) {
      pipelines_.emplace_back(s, keys_, topo.controller_count(), cfg_.fm, state_.required,
                              cfg_.register_slots);
    }
    install_tables();

    requests_ = cfg_.requests.empty() ? make_schedule(topo, cfg_.request_count, cfg_.seed)
                                      : cfg_.requests;
    metrics_.assign(requests_.size(), {});
    for (std::size_t r = 0; r < requests_.size(); ++r) {
      if (!index_.emplace(requests_[r].id, r).second) {
        throw Error(Errc::InvalidConfig, "duplicate request id");
      }
      if (requests_[r].target >= n) throw Error(Errc::InvalidConfig, "request target out of range");
      metrics_[r].id = requests_[r].id;
      metrics_[r].target = requests_[r].target;
    }

    const Tick hop = cfg_.profile.hop_delay;
    const Tick diam = static_cast<Tick>(state_.hops.diameter());
    // Every packet of a request reaches its processing node within this
    // window after the quorum can first form.
    clear_window_ = cfg_.send_jitter + (diam + 2) * hop + cfg_.profile.processing_delay;
    timeout_ = 2 * clear_window_ + (diam + 1) * hop + cfg_.profile.processing_delay;
    interval_ = cfg_.request_interval > 0 ? cfg_.request_interval : timeout_ + hop;
  }

  void install_tables() {
    for (auto& p : pipelines_) {
      p.install(state_.tables.at(p.id()));
      p.set_required(state_.required);
    }
  }

  void push(Tick t, std::variant<Issue, Arrive, Clear> body) {
    queue_.push(Event{t, seq_++, std::move(body)});
  }

  void trace(nlohmann::json j) const {
    if (!cfg_.trace) return;
    j["t"] = now_;
    cfg_.trace(j);
  }

  void apply_pending_events() {
    for (const auto& e : pending_) {
      state_ = handle_event(state_, e);
      degraded_ = degraded_ || state_.degraded;
      ++reassignments_;
      trace({{"event", "reassign"},
             {"kind", to_string(e.kind)},
             {"controllers", e.controllers},
             {"active", state_.active},
             {"required", state_.required},
             {"degraded", state_.degraded}});
    }
    if (!pending_.empty()) install_tables();
    pending_.clear();
  }

  void handle(const Issue& is) {
    apply_pending_events();
    const Request& req = requests_[is.request];
    RequestMetrics& m = metrics_[is.request];
    m.issued = now_;
    m.processing_node = state_.placement.node_for(req.target);
    trace({{"event", "issue"}, {"req", req.id}, {"target", req.target}, {"node", m.processing_node}});
    if (m.processing_node == kNoSwitch) return;
    for (ControllerId c : state_.active) {
      const auto pkt = replica_respond(replicas_[c], req.id, req.target, req.payload);
      if (!pkt) continue;
      const Tick jitter = cfg_.send_jitter > 0 ? rng_->between(0, cfg_.send_jitter) : 0;
      ++m.footprint;
      push(now_ + jitter + cfg_.profile.hop_delay, Arrive{replicas_[c].attachment, kNoSwitch, *pkt});
    }
    push(now_ + timeout_, Clear{m.processing_node, req.id});
  }

  void handle(const Arrive& a) {
    auto it = index_.find(a.packet.request_id);
    if (it == index_.end()) return;
    const std::size_t r = it->second;
    RequestMetrics& m = metrics_[r];
    SwitchPipeline& pipe = pipelines_[a.at];
    const bool comparing = !a.packet.processed() && pipe.tables().processes(a.packet.destination);
    const Tick done = now_ + (comparing ? cfg_.profile.processing_delay : 0);
    for (auto& action : pipe.ingress(a.packet, a.from)) {
      if (auto* f = std::get_if<Forward>(&action)) {
        ++m.footprint;
        ++m.in_network_footprint;
        trace({{"event", "hop"},
               {"req", f->packet.request_id},
               {"ctrl", f->packet.controller_id},
               {"from", a.at},
               {"to", f->egress},
               {"processed", f->packet.processed()}});
        push(done + cfg_.profile.hop_delay, Arrive{f->egress, a.at, std::move(f->packet)});
      } else if (auto* d = std::get_if<DeliverToControlPlane>(&action)) {
        on_quorum(a.at, r, d->packet.request_id);
        push(done + clear_window_, Clear{a.at, d->packet.request_id});
      } else if (auto* ap = std::get_if<ApplyConfig>(&action)) {
        ++m.applies;
        const bool ok = ap->payload == requests_[r].payload;
        if (m.applies == 1) {
          m.delay = done - m.issued;
          m.correct = ok;
        } else {
          m.correct = false;
        }
        trace({{"event", "apply"}, {"req", ap->request_id}, {"switch", a.at}, {"correct", ok}});
      } else if (auto* dr = std::get_if<Drop>(&action)) {
        if (dr->reason != DropReason::AwaitingQuorum && dr->reason != DropReason::AfterQuorum) {
          trace({{"event", "drop"},
                 {"req", dr->packet.request_id},
                 {"switch", a.at},
                 {"reason", to_string(dr->reason)}});
        }
      }
    }
  }

  void on_quorum(SwitchId at, std::size_t r, std::uint32_t request_id) {
    const auto res = pipelines_[at].finalize(request_id);
    trace({{"event", "quorum"}, {"req", request_id}, {"switch", at}, {"divergent", res.divergent}});
    report(at, r, res.divergent);
  }

  void report(SwitchId at, std::size_t r, const std::vector<ControllerId>& divergent) {
    RequestMetrics& m = metrics_[r];
    std::vector<ControllerId> fresh;
    for (ControllerId c : divergent) {
      if (std::find(m.reported_faulty.begin(), m.reported_faulty.end(), c) ==
          m.reported_faulty.end()) {
        m.reported_faulty.push_back(c);
        fresh.push_back(c);
      }
    }
    std::sort(m.reported_faulty.begin(), m.reported_faulty.end());
    if (!fresh.empty() && cfg_.reassign_on_detection) {
      pending_.push_back(FaultEvent::malicious(std::move(fresh), at));
    }
  }

  void handle(const Clear& c) {
    auto it = index_.find(c.request_id);
    SwitchPipeline& pipe = pipelines_[c.at];
    if (it != index_.end() && pipe.has_quorum(c.request_id)) {
      report(c.at, it->second, pipe.finalize(c.request_id).divergent);
    }
    pipe.clear_request(c.request_id);
  }

  MetricsReport assemble() const {
    MetricsReport rep;
    rep.mode = cfg_.mode;
    rep.hop_delay = cfg_.profile.hop_delay;
    rep.requests = metrics_;
    std::vector<Tick> delays;
    for (const auto& m : metrics_) {
      rep.total_footprint += m.footprint;
      rep.total_in_network_footprint += m.in_network_footprint;
      if (m.delay) {
        ++rep.delivered;
        delays.push_back(*m.delay);
      }
    }
    if (!delays.empty()) {
      std::sort(delays.begin(), delays.end());
      double sum = 0.0;
      for (Tick d : delays) sum += static_cast<double>(d);
      rep.mean_delay = sum / static_cast<double>(delays.size());
      auto pct = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(delays.size() - 1) + 0.5);
        return delays[std::min(idx, delays.size() - 1)];
      };
      rep.p50_delay = pct(0.50);
      rep.p95_delay = pct(0.95);
      rep.max_delay = delays.back();
    }
    rep.degraded = degraded_;
    rep.excluded = state_.excluded;
    rep.reassignments = reassignments_;
    return rep;
  }

  const SimConfig& cfg_;
  ReassignerState state_;
  std::shared_ptr<const KeyRing> keys_;
  std::vector<SwitchPipeline> pipelines_;
  std::vector<ControllerReplica> replicas_;
  std::vector<Request> requests_;
  std::vector<RequestMetrics> metrics_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
  std::vector<FaultEvent> pending_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::unique_ptr<Rng> rng_;
  std::uint64_t seq_ = 0;
  Tick now_ = 0;
  Tick clear_window_ = 0;
  Tick timeout_ = 0;
  Tick interval_ = 1;
  bool degraded_ = false;
  std::size_t reassignments_ = 0;
};

}  // namespace detail

/// Runs one deterministic simulation. A degraded guarantee is reported in
/// MetricsReport::degraded, not thrown.
inline MetricsReport run(const SimConfig& config) { return detail::Simulation(config).run(); }

}  // namespace p4bft

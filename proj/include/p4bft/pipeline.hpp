#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "p4bft/packet.hpp"
#include "p4bft/register_bank.hpp"
#include "p4bft/topology.hpp"

namespace p4bft {

// Exact-match table keyed by destination switch id.
class ExactMatchTable {
 public:
  ExactMatchTable() = default;
  explicit ExactMatchTable(std::size_t keys) : entries_(keys, kNoSwitch) {}

  void insert(SwitchId key, SwitchId value) {
    if (key >= entries_.size()) entries_.resize(key + 1, kNoSwitch);
    entries_[key] = value;
  }
  void erase(SwitchId key) {
    if (key < entries_.size()) entries_[key] = kNoSwitch;
  }
  [[nodiscard]] std::optional<SwitchId> lookup(SwitchId key) const {
    if (key >= entries_.size() || entries_[key] == kNoSwitch) return std::nullopt;
    return entries_[key];
  }
  [[nodiscard]] bool contains(SwitchId key) const { return lookup(key).has_value(); }
  [[nodiscard]] std::vector<SwitchId> keys() const {
    std::vector<SwitchId> out;
    for (SwitchId k = 0; k < entries_.size(); ++k) {
      if (entries_[k] != kNoSwitch) out.push_back(k);
    }
    return out;
  }
  [[nodiscard]] std::size_t size() const { return keys().size(); }

  friend bool operator==(const ExactMatchTable& a, const ExactMatchTable& b) {
    const auto keys = a.keys();
    if (keys != b.keys()) return false;
    for (SwitchId k : keys) {
      if (a.lookup(k) != b.lookup(k)) return false;
    }
    return true;
  }

 private:
  std::vector<SwitchId> entries_;
};

/// Tables the Reassigner installs on one switch.
struct SwitchTables {
  std::vector<SwitchId> processing;    // destinations this switch processes for, ascending
  ExactMatchTable process_forwarding;  // destination -> egress toward its processing node
  ExactMatchTable l2_forwarding;       // destination -> egress toward the destination
  std::optional<SwitchId> trusted_signer;  // processing node whose signature this switch accepts

  [[nodiscard]] bool processes(SwitchId dst) const {
    return std::binary_search(processing.begin(), processing.end(), dst);
  }

  friend bool operator==(const SwitchTables&, const SwitchTables&) = default;
};

using KeyRing = std::vector<SwitchKey>;

struct Forward {
  ControlPacket packet;
  SwitchId egress = kNoSwitch;
};

struct DeliverToControlPlane {
  ControlPacket packet;
};

struct ApplyConfig {
  std::uint32_t request_id = 0;
  Bytes payload;
};

enum class DropReason {
  AwaitingQuorum,  // absorbed; quorum not reached yet
  AfterQuorum,     // absorbed; request already decided
  Straggler,       // request already cleared
  BadSignature,
  NoRoute,
  RowsExhausted,
  SlotCollision,
};

constexpr std::string_view to_string(DropReason r) noexcept {
  switch (r) {
    case DropReason::AwaitingQuorum: return "awaiting-quorum";
    case DropReason::AfterQuorum: return "after-quorum";
    case DropReason::Straggler: return "straggler";
    case DropReason::BadSignature: return "bad-signature";
    case DropReason::NoRoute: return "no-route";
    case DropReason::RowsExhausted: return "rows-exhausted";
    case DropReason::SlotCollision: return "slot-collision";
  }
  return "unknown";
}

struct Drop {
  ControlPacket packet;
  DropReason reason = DropReason::NoRoute;
};

using PipelineAction = std::variant<Forward, DeliverToControlPlane, ApplyConfig, Drop>;

/// Data plane of one switch: table matching, hash registers, signing.
/// Packets are processed serially.
class SwitchPipeline {
 public:
  SwitchPipeline(SwitchId id, std::shared_ptr<const KeyRing> keys, std::size_t controllers,
                 std::size_t fm, std::size_t required, std::size_t slots = 64)
      : id_(id), keys_(std::move(keys)), bank_(slots, controllers, fm + 1, required) {}

  [[nodiscard]] SwitchId id() const noexcept { return id_; }
  [[nodiscard]] const SwitchTables& tables() const noexcept { return tables_; }
  [[nodiscard]] const HashRegisterBank& bank() const noexcept { return bank_; }

  void install(SwitchTables t) { tables_ = std::move(t); }
  void set_required(std::size_t r) { bank_.set_required(r); }

  std::vector<PipelineAction> ingress(const ControlPacket& p, SwitchId /*from*/) {
    std::vector<PipelineAction> out;
    if (p.processed()) {
      handle_processed(p, out);
    } else if (tables_.processes(p.destination)) {
      handle_processing(p, out);
    } else if (auto egress = tables_.process_forwarding.lookup(p.destination)) {
      out.push_back(Forward{p, *egress});
    } else {
      out.push_back(Drop{p, DropReason::NoRoute});
    }
    return out;
  }

  [[nodiscard]] FinalizeResult finalize(std::uint32_t request_id) const {
    return bank_.finalize(request_id);
  }

  [[nodiscard]] bool has_quorum(std::uint32_t request_id) const {
    return bank_.quorum_row(request_id) >= 0;
  }

  void clear_request(std::uint32_t request_id) {
    if (bank_.live(request_id) || decided_.contains(request_id)) completed_.insert(request_id);
    bank_.clear_request(request_id);
    decided_.erase(request_id);
  }

 private:
  void handle_processing(const ControlPacket& p, std::vector<PipelineAction>& out) {
    if (completed_.contains(p.request_id)) {
      out.push_back(Drop{p, DropReason::Straggler});
      return;
    }
    std::size_t count = 0;
    try {
      count = bank_.record_hash(p.request_id, p.controller_id, payload_hash(p.payload));
    } catch (const Error& e) {
      if (e.code() == Errc::RowsExhausted) {
        out.push_back(Drop{p, DropReason::RowsExhausted});
        return;
      }
      if (e.code() == Errc::SlotCollision) {
        out.push_back(Drop{p, DropReason::SlotCollision});
        return;
      }
      throw;
    }
    if (decided_.contains(p.request_id)) {
      out.push_back(Drop{p, DropReason::AfterQuorum});
      return;
    }
    if (count < bank_.required()) {
      out.push_back(Drop{p, DropReason::AwaitingQuorum});
      return;
    }
    decided_.insert(p.request_id);
    out.push_back(DeliverToControlPlane{p});
    if (p.destination == id_) {
      out.push_back(ApplyConfig{p.request_id, p.payload});
      return;
    }
    if (auto egress = tables_.l2_forwarding.lookup(p.destination)) {
      out.push_back(Forward{sign(p, (*keys_)[id_]), *egress});
    } else {
      out.push_back(Drop{p, DropReason::NoRoute});
    }
  }

  void handle_processed(const ControlPacket& p, std::vector<PipelineAction>& out) const {
    if (p.destination != id_) {
      if (auto egress = tables_.l2_forwarding.lookup(p.destination)) {
        out.push_back(Forward{p, *egress});
      } else {
        out.push_back(Drop{p, DropReason::NoRoute});
      }
      return;
    }
    if (tables_.trusted_signer && verify(p, (*keys_)[*tables_.trusted_signer])) {
      out.push_back(ApplyConfig{p.request_id, p.payload});
    } else {
      out.push_back(Drop{p, DropReason::BadSignature});
    }
  }

  SwitchId id_;
  std::shared_ptr<const KeyRing> keys_;
  HashRegisterBank bank_;
  SwitchTables tables_;
  std::unordered_set<std::uint32_t> decided_;
  std::unordered_set<std::uint32_t> completed_;
};

}  // namespace p4bft

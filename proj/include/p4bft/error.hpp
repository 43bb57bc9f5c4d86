#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace p4bft {

enum class Errc {
  EmptyTopology,
  Disconnected,
  DanglingAttachment,
  SelfLoop,
  DuplicateEdge,
  UnknownSwitch,
  InfeasibleDegree,
  OddK,
  ParseError,
  InvalidProblem,
  Infeasible,
  TooLarge,
  BadMagic,
  Truncated,
  LengthMismatch,
  BadFlags,
  PayloadTooLarge,
  AlreadySigned,
  InvalidController,
  RowsExhausted,
  SlotCollision,
  NoQuorum,
  DivisionByZero,
  InvalidConfig,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::EmptyTopology: return "EmptyTopology";
    case Errc::Disconnected: return "Disconnected";
    case Errc::DanglingAttachment: return "DanglingAttachment";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::UnknownSwitch: return "UnknownSwitch";
    case Errc::InfeasibleDegree: return "InfeasibleDegree";
    case Errc::OddK: return "OddK";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidProblem: return "InvalidProblem";
    case Errc::Infeasible: return "Infeasible";
    case Errc::TooLarge: return "TooLarge";
    case Errc::BadMagic: return "BadMagic";
    case Errc::Truncated: return "Truncated";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::BadFlags: return "BadFlags";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::AlreadySigned: return "AlreadySigned";
    case Errc::InvalidController: return "InvalidController";
    case Errc::RowsExhausted: return "RowsExhausted";
    case Errc::SlotCollision: return "SlotCollision";
    case Errc::NoQuorum: return "NoQuorum";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace p4bft

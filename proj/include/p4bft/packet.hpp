#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <zlib.h>

#include "p4bft/error.hpp"
#include "p4bft/random.hpp"

namespace p4bft {

using Bytes = std::vector<std::uint8_t>;
using Signature = std::array<std::uint8_t, 32>;
using SwitchKey = std::array<std::uint8_t, 32>;

inline Bytes to_bytes(std::string_view s) { return {s.begin(), s.end()}; }

/// Controller reconfiguration message.
struct ControlPacket {
  std::uint32_t request_id = 0;
  std::uint16_t controller_id = 0;
  std::uint16_t destination = 0;
  Bytes payload;
  std::optional<Signature> signature;  // present iff processed

  [[nodiscard]] bool processed() const noexcept { return signature.has_value(); }

  friend bool operator==(const ControlPacket&, const ControlPacket&) = default;
};

// Frame layout, big-endian:
//   magic u16 = 0xB4BF | request_id u32 | controller_id u16 | destination u16 |
//   flags u8 (bit0 = processed) | payload_len u16 | payload | signature[32] iff processed
inline constexpr std::uint16_t kPacketMagic = 0xB4BF;
inline constexpr std::size_t kHeaderSize = 13;
inline constexpr std::size_t kSignatureSize = 32;
inline constexpr std::uint8_t kFlagProcessed = 0x01;

namespace detail {

inline void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put32(Bytes& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v >> 16));
  put16(out, static_cast<std::uint16_t>(v));
}

inline std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

inline std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{get16(b, at)} << 16) | get16(b, at + 2);
}

// Header and payload; this is also what the signature covers.
inline Bytes encode_body(const ControlPacket& p, bool processed) {
  if (p.payload.size() > 0xFFFF) {
    throw Error(Errc::PayloadTooLarge, std::to_string(p.payload.size()) + " byte payload");
  }
  Bytes out;
  out.reserve(kHeaderSize + p.payload.size() + (processed ? kSignatureSize : 0));
  put16(out, kPacketMagic);
  put32(out, p.request_id);
  put16(out, p.controller_id);
  put16(out, p.destination);
  out.push_back(processed ? kFlagProcessed : 0);
  put16(out, static_cast<std::uint16_t>(p.payload.size()));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

}  // namespace detail

inline Bytes encode(const ControlPacket& p) {
  Bytes out = detail::encode_body(p, p.processed());
  if (p.signature) out.insert(out.end(), p.signature->begin(), p.signature->end());
  return out;
}

inline ControlPacket decode(std::span<const std::uint8_t> b) {
  if (b.size() < kHeaderSize) throw Error(Errc::Truncated, "frame shorter than header");
  if (detail::get16(b, 0) != kPacketMagic) throw Error(Errc::BadMagic, "bad frame magic");
  ControlPacket p;
  p.request_id = detail::get32(b, 2);
  p.controller_id = detail::get16(b, 6);
  p.destination = detail::get16(b, 8);
  const std::uint8_t flags = b[10];
  if (flags & ~kFlagProcessed) throw Error(Errc::BadFlags, "reserved flag bits set");
  const std::size_t len = detail::get16(b, 11);
  const bool processed = flags & kFlagProcessed;
  const std::size_t expected = kHeaderSize + len + (processed ? kSignatureSize : 0);
  if (b.size() < expected) throw Error(Errc::Truncated, "frame shorter than declared length");
  if (b.size() > expected) throw Error(Errc::LengthMismatch, "trailing bytes after frame");
  p.payload.assign(b.begin() + kHeaderSize, b.begin() + kHeaderSize + len);
  if (processed) {
    Signature sig{};
    std::copy(b.begin() + kHeaderSize + len, b.end(), sig.begin());
    p.signature = sig;
  }
  return p;
}

/// CRC-32 (IEEE 802.3, reflected) of the payload bytes.
inline std::uint32_t payload_hash(std::span<const std::uint8_t> payload) {
  return static_cast<std::uint32_t>(
      crc32(0L, payload.data(), static_cast<uInt>(payload.size())));
}

namespace detail {

inline Signature hmac_sha256(const SwitchKey& key, std::span<const std::uint8_t> data) {
  Signature out{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
       out.data(), &len);
  return out;
}

}  // namespace detail

/// Marks the packet processed and attaches an HMAC-SHA256 tag over the
/// processed header and payload.
inline ControlPacket sign(ControlPacket p, const SwitchKey& key) {
  if (p.processed()) throw Error(Errc::AlreadySigned, "packet is already processed");
  p.signature = detail::hmac_sha256(key, detail::encode_body(p, true));
  return p;
}

inline bool verify(const ControlPacket& p, const SwitchKey& key) {
  if (!p.signature) return false;
  const Signature expected = detail::hmac_sha256(key, detail::encode_body(p, true));
  return CRYPTO_memcmp(expected.data(), p.signature->data(), kSignatureSize) == 0;
}

/// Per-switch pre-shared key, derived from a deployment seed.
inline SwitchKey derive_switch_key(std::uint64_t seed, std::uint32_t switch_id) {
  SwitchKey key{};
  std::uint64_t state = derive_seed(seed, switch_id);
  for (std::size_t i = 0; i < key.size(); i += 8) {
    state = splitmix64(state);
    for (std::size_t b = 0; b < 8; ++b) key[i + b] = static_cast<std::uint8_t>(state >> (8 * b));
  }
  return key;
}

inline std::string to_hex(std::span<const std::uint8_t> b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (auto v : b) {
    s.push_back(kDigits[v >> 4]);
    s.push_back(kDigits[v & 0xF]);
  }
  return s;
}

inline Bytes from_hex(std::string_view s) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  int hi = -1;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    const int v = nibble(c);
    if (v < 0) throw Error(Errc::ParseError, "invalid hex digit");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>((hi << 4) | v));
      hi = -1;
    }
  }
  if (hi >= 0) throw Error(Errc::ParseError, "odd number of hex digits");
  return out;
}

}  // namespace p4bft

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "p4bft/error.hpp"

namespace p4bft {

struct FinalizeResult {
  std::uint32_t correct_hash = 0;
  std::vector<std::uint32_t> divergent;  // controller ids, ascending
};

/// Hash registers of a processing node.
///
/// F_M + 1 rows; each row holds one hash per request slot and a bit vector
/// with N = |C| bits per slot, so controller c of slot s lives at column
/// s * N + c. slot = request_id mod K.
class HashRegisterBank {
 public:
  HashRegisterBank(std::size_t slots, std::size_t controllers, std::size_t rows,
                   std::size_t required)
      : slots_(slots), controllers_(controllers), rows_(rows), required_(required) {
    if (slots == 0 || controllers == 0 || rows == 0) {
      throw Error(Errc::InvalidConfig, "register bank dimensions must be positive");
    }
    hashes_.assign(rows_ * slots_, 0);
    bits_.assign(rows_, std::vector<std::uint64_t>((slots_ * controllers_ + 63) / 64, 0));
    meta_.assign(slots_, {});
  }

  [[nodiscard]] std::size_t slots() const noexcept { return slots_; }
  [[nodiscard]] std::size_t controllers() const noexcept { return controllers_; }
  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t required() const noexcept { return required_; }
  void set_required(std::size_t r) noexcept { required_ = r; }

  [[nodiscard]] std::size_t slot_of(std::uint32_t request_id) const noexcept {
    return request_id % slots_;
  }

  /// Sets the controller's bit in the row holding `hash` (claiming the next
  /// free row if the hash is new) and returns that row's popcount.
  std::size_t record_hash(std::uint32_t request_id, std::uint32_t controller, std::uint32_t hash) {
    if (controller >= controllers_) {
      throw Error(Errc::InvalidController, "controller " + std::to_string(controller));
    }
    const std::size_t s = slot_of(request_id);
    Meta& m = meta_[s];
    if (m.live && m.request_id != request_id) {
      throw Error(Errc::SlotCollision, "slot " + std::to_string(s) + " held by request " +
                                           std::to_string(m.request_id));
    }
    std::size_t row = 0;
    while (row < m.rows_used && hashes_[row * slots_ + s] != hash) ++row;
    if (row == m.rows_used) {
      if (m.rows_used == rows_) {
        throw Error(Errc::RowsExhausted, "more than " + std::to_string(rows_) +
                                             " distinct hashes for request " +
                                             std::to_string(request_id));
      }
      hashes_[row * slots_ + s] = hash;
      ++m.rows_used;
    }
    m.live = true;
    m.request_id = request_id;
    set_bit(row, s * controllers_ + controller);
    return popcount(row, s);
  }

  // Row index whose count reached `required`, or -1.
  [[nodiscard]] int quorum_row(std::uint32_t request_id) const {
    const std::size_t s = slot_of(request_id);
    const Meta& m = meta_[s];
    if (!m.live || m.request_id != request_id) return -1;
    for (std::size_t r = 0; r < m.rows_used; ++r) {
      if (popcount(r, s) >= required_) return static_cast<int>(r);
    }
    return -1;
  }

  /// Correct hash and the controllers whose bits are set in any other row.
  [[nodiscard]] FinalizeResult finalize(std::uint32_t request_id) const {
    const int q = quorum_row(request_id);
    if (q < 0) throw Error(Errc::NoQuorum, "request " + std::to_string(request_id));
    const std::size_t s = slot_of(request_id);
    FinalizeResult res;
    res.correct_hash = hashes_[static_cast<std::size_t>(q) * slots_ + s];
    for (std::uint32_t c = 0; c < controllers_; ++c) {
      for (std::size_t r = 0; r < meta_[s].rows_used; ++r) {
        if (static_cast<int>(r) != q && test_bit(r, s * controllers_ + c)) {
          res.divergent.push_back(c);
          break;
        }
      }
    }
    return res;
  }

  /// Zeroes the request's slot. A slot held by a different live request is
  /// left untouched.
  void clear_request(std::uint32_t request_id) {
    const std::size_t s = slot_of(request_id);
    Meta& m = meta_[s];
    if (m.live && m.request_id != request_id) return;
    for (std::size_t r = 0; r < rows_; ++r) {
      hashes_[r * slots_ + s] = 0;
      for (std::size_t c = 0; c < controllers_; ++c) clear_bit(r, s * controllers_ + c);
    }
    m = {};
  }

  [[nodiscard]] bool live(std::uint32_t request_id) const {
    const Meta& m = meta_[slot_of(request_id)];
    return m.live && m.request_id == request_id;
  }

  [[nodiscard]] std::size_t rows_used(std::uint32_t request_id) const {
    return live(request_id) ? meta_[slot_of(request_id)].rows_used : 0;
  }

  [[nodiscard]] std::uint32_t row_hash(std::size_t row, std::size_t slot) const {
    return hashes_[row * slots_ + slot];
  }

  [[nodiscard]] bool bit(std::size_t row, std::size_t slot, std::uint32_t controller) const {
    return test_bit(row, slot * controllers_ + controller);
  }

  [[nodiscard]] std::size_t popcount(std::size_t row, std::size_t slot) const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < controllers_; ++c) n += test_bit(row, slot * controllers_ + c);
    return n;
  }

 private:
  struct Meta {
    bool live = false;
    std::uint32_t request_id = 0;
    std::size_t rows_used = 0;
  };

  void set_bit(std::size_t row, std::size_t col) { bits_[row][col / 64] |= 1ULL << (col % 64); }
  void clear_bit(std::size_t row, std::size_t col) {
    bits_[row][col / 64] &= ~(1ULL << (col % 64));
  }
  [[nodiscard]] bool test_bit(std::size_t row, std::size_t col) const {
    return (bits_[row][col / 64] >> (col % 64)) & 1ULL;
  }

  std::size_t slots_;
  std::size_t controllers_;
  std::size_t rows_;
  std::size_t required_;
  std::vector<std::uint32_t> hashes_;             // row-major: rows x slots
  std::vector<std::vector<std::uint64_t>> bits_;  // per row: slots * controllers bits
  std::vector<Meta> meta_;
};

}  // namespace p4bft

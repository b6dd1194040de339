#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cramsnn {

/// Fixed-length packed bit vector. Used both for row contents and column masks.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false);

  /// Bits [first, first + count) set, all others clear.
  static BitVector range(std::size_t size, std::size_t first, std::size_t count);
  static BitVector single(std::size_t size, std::size_t index) { return range(size, index, 1); }
  static BitVector from_bools(std::span<const bool> bits);
  static BitVector from_bytes(std::span<const std::uint8_t> bits);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const;
  void set(std::size_t i, bool value = true);

  std::size_t count() const noexcept;
  bool any() const noexcept;
  bool none() const noexcept { return !any(); }
  bool is_subset_of(const BitVector& other) const;
  std::vector<std::size_t> indices() const;

  std::span<std::uint64_t> words() noexcept { return words_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  BitVector& operator&=(const BitVector& o);
  BitVector& operator|=(const BitVector& o);
  BitVector& operator^=(const BitVector& o);
  BitVector operator~() const;
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
  friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend bool operator==(const BitVector& a, const BitVector& b) = default;

  /// Bits moved toward lower indices by `by` positions; vacated high bits clear.
  BitVector shifted_down(std::size_t by) const;
  std::string to_string() const;

 private:
  void check_same_size(const BitVector& o) const;
  void trim() noexcept;

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

using ColumnMask = BitVector;

}  // namespace cramsnn

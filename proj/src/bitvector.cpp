#include "cramsnn/bitvector.hpp"

#include <bit>

#include "cramsnn/error.hpp"

namespace cramsnn {

namespace {
constexpr std::size_t kWordBits = 64;
std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }
}  // namespace

BitVector::BitVector(std::size_t size, bool value)
    : size_(size), words_(word_count(size), value ? ~std::uint64_t{0} : 0) {
  trim();
}

BitVector BitVector::range(std::size_t size, std::size_t first, std::size_t count) {
  require(first + count <= size, ErrorKind::OutOfRange, "bit range exceeds vector size");
  BitVector v(size);
  for (std::size_t i = first; i < first + count; ++i) v.set(i);
  return v;
}

BitVector BitVector::from_bools(std::span<const bool> bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) v.set(i);
  return v;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i] != 0) v.set(i);
  return v;
}

bool BitVector::test(std::size_t i) const {
  require(i < size_, ErrorKind::OutOfRange, "bit index out of range");
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
}

void BitVector::set(std::size_t i, bool value) {
  require(i < size_, ErrorKind::OutOfRange, "bit index out of range");
  const std::uint64_t bit = std::uint64_t{1} << (i % kWordBits);
  if (value)
    words_[i / kWordBits] |= bit;
  else
    words_[i / kWordBits] &= ~bit;
}

std::size_t BitVector::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool BitVector::any() const noexcept {
  for (auto w : words_)
    if (w != 0) return true;
  return false;
}

bool BitVector::is_subset_of(const BitVector& other) const {
  check_same_size(other);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  return true;
}

std::vector<std::size_t> BitVector::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto bits = words_[w];
    while (bits != 0) {
      const int b = std::countr_zero(bits);
      out.push_back(w * kWordBits + static_cast<std::size_t>(b));
      bits &= bits - 1;
    }
  }
  return out;
}

BitVector& BitVector::operator&=(const BitVector& o) {
  check_same_size(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

BitVector& BitVector::operator|=(const BitVector& o) {
  check_same_size(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

BitVector& BitVector::operator^=(const BitVector& o) {
  check_same_size(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
  return *this;
}

BitVector BitVector::operator~() const {
  BitVector v = *this;
  for (auto& w : v.words_) w = ~w;
  v.trim();
  return v;
}

BitVector BitVector::shifted_down(std::size_t by) const {
  BitVector v(size_);
  for (std::size_t i = by; i < size_; ++i)
    if (test(i)) v.set(i - by);
  return v;
}

std::string BitVector::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if (test(i)) s[i] = '1';
  return s;
}

void BitVector::check_same_size(const BitVector& o) const {
  require(size_ == o.size_, ErrorKind::InvalidArgument, "bit vector length mismatch");
}

void BitVector::trim() noexcept {
  const std::size_t tail = size_ % kWordBits;
  if (tail != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << tail) - 1;
}

}  // namespace cramsnn

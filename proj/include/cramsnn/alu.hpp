#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cramsnn/device.hpp"

namespace cramsnn {

/// Bit rows of an unsigned word, least significant first.
using Word = std::vector<RowIndex>;

/// Scratch-row allocator over the free region of an array.
class RowPool {
 public:
  RowPool() = default;
  RowPool(RowIndex first, RowIndex end);

  RowIndex acquire();
  Word acquire(std::size_t n);
  void release(RowIndex row);
  void release(const Word& rows);
  std::size_t available() const noexcept { return free_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool owns(RowIndex row) const noexcept { return row >= first_ && row < end_; }

 private:
  RowIndex first_ = 0;
  RowIndex end_ = 0;
  std::size_t capacity_ = 0;
  std::vector<RowIndex> free_;
  std::vector<bool> in_use_;
};

/// Word whose rows are owned by a RowPool and returned on destruction.
class Scratch {
 public:
  Scratch() = default;
  Scratch(RowPool& pool, Word rows) : pool_(&pool), rows_(std::move(rows)) {}
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
  Scratch(Scratch&& o) noexcept : pool_(o.pool_), rows_(std::move(o.rows_)) { o.rows_.clear(); }
  Scratch& operator=(Scratch&& o) noexcept;
  ~Scratch() { reset(); }

  const Word& rows() const noexcept { return rows_; }
  operator const Word&() const noexcept { return rows_; }
  std::size_t width() const noexcept { return rows_.size(); }
  RowIndex operator[](std::size_t k) const { return rows_.at(k); }

  /// Returns the `low` least significant rows to the pool and keeps the rest.
  void drop_low(std::size_t low);
  /// Gives up ownership without releasing.
  Word detach();
  void reset();

 private:
  RowPool* pool_ = nullptr;
  Word rows_;
};

enum class CopyMode { ReadWrite, Gate };

/// Rounding factor added before dropping `dropped` low bits: the all-ones
/// (dropped - 1)-bit word. For a 2S -> S product this is the (S - 1)-bit factor.
inline std::uint64_t rounding_factor(unsigned dropped) {
  return dropped == 0 ? 0 : (std::uint64_t{1} << (dropped - 1)) - 1;
}

/// Compiles fixed-point macro operations into column-parallel gate sequences.
/// Every operation works on the columns selected by `mask`; all operands are
/// unsigned.
class Alu {
 public:
  Alu(CramArray& array, RowPool& pool, CopyMode copy_mode = CopyMode::ReadWrite);

  CramArray& array() noexcept { return array_; }
  RowPool& pool() noexcept { return pool_; }
  RowIndex zero_row(std::size_t k = 0) const { return zero_.at(k); }
  RowIndex one_row() const noexcept { return one_; }
  CopyMode copy_mode() const noexcept { return copy_mode_; }

  Scratch scratch(std::size_t width) { return {pool_, pool_.acquire(width)}; }

  /// (sum, cout) = a + b + cin in three gate steps: MAJ3, INV1-2, MAJ5.
  void full_add(RowIndex a, RowIndex b, RowIndex cin, RowIndex sum, RowIndex cout, const ColumnMask& mask);

  /// Ripple-carry a + b (+ carry_in). Narrower operands are zero extended.
  /// Result is max(|a|,|b|) + 1 bits with keep_carry, else the carry is dropped.
  Scratch add(const Word& a, const Word& b, const ColumnMask& mask, bool keep_carry = true,
              std::optional<RowIndex> carry_in = std::nullopt);
  /// Adds into caller-provided rows; `out` must have |a| + 1 rows.
  void add_words(const Word& a, const Word& b, const Word& out, const ColumnMask& mask);

  /// Shift-and-add array multiplier: S^2 AND partial products, S^2 full adds.
  Scratch multiply(const Word& a, const Word& b, const ColumnMask& mask);
  void multiply_words(const Word& a, const Word& b, const Word& out, const ColumnMask& mask);

  /// out = spike ? value : 0, one AND per bit.
  Scratch and_scale(RowIndex spike, const Word& value, const ColumnMask& mask);
  void and_scale_into(RowIndex spike, const Word& value, const Word& out, const ColumnMask& mask);

  /// out = (a >= b), a cascade of 6N - 3 NAND gates.
  void compare_ge(const Word& a, const Word& b, RowIndex out, const ColumnMask& mask);
  Scratch compare_ge(const Word& a, const Word& b, const ColumnMask& mask);

  /// min((value + rounding_factor(W - bits)) >> (W - bits), 2^bits - 1).
  /// Consumes `value`.
  Scratch round_to(Scratch value, unsigned bits, const ColumnMask& mask);

  /// min(a + b, 2^|a| - 1) for equal widths.
  Scratch saturating_add(const Word& a, const Word& b, const ColumnMask& mask);
  /// max(a - b, 0) via two's complement addition of the inverted operand.
  Scratch subtract_clamped(const Word& a, const Word& b, const ColumnMask& mask);
  /// min(ctr + 1, limit) for ctr <= limit. Result has |ctr| bits.
  Scratch increment_saturating(const Word& ctr, const Word& limit, const ColumnMask& mask);
  /// (ctr + 1) mod 2^|ctr|.
  Scratch increment(const Word& ctr, const ColumnMask& mask);

  /// Single-output gate into a freshly preset scratch row.
  RowIndex gate(GateKind kind, std::initializer_list<RowIndex> inputs, const ColumnMask& mask);
  void gate_into(GateKind kind, std::initializer_list<RowIndex> inputs, RowIndex out, const ColumnMask& mask);

  /// dst = src row by row, via memory reads/writes or COPY gates per copy_mode.
  void copy_region(const Word& src, const Word& dst, const ColumnMask& mask);
  /// Moves `count` columns starting at src_col of `src` rows to dst_col of
  /// `dst` rows through the controller (one read and one write per row).
  void transfer_columns(const Word& src, std::size_t src_col, const Word& dst, std::size_t dst_col,
                        std::size_t count);
  /// Writes an unsigned constant into `rows` over `mask`.
  void write_constant(const Word& rows, std::uint64_t value, const ColumnMask& mask);
  /// Writes per-column values into `rows`; values[c] lands in column c.
  void write_values(const Word& rows, const std::vector<std::uint64_t>& values, const ColumnMask& mask);
  /// Uncharged decode of a word in one column.
  std::uint64_t peek_value(const Word& rows, std::size_t col) const;

  /// Zero-extended or constant-filled word of the given width.
  Word constant_word(std::uint64_t value, std::size_t width) const;

 private:
  RowIndex zero_other_than(std::initializer_list<RowIndex> taken) const;

  CramArray& array_;
  RowPool& pool_;
  CopyMode copy_mode_;
  std::vector<RowIndex> zero_;
  RowIndex one_ = 0;
};

}  // namespace cramsnn

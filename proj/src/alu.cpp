#include "cramsnn/alu.hpp"

#include <algorithm>

#include "cramsnn/error.hpp"

namespace cramsnn {

// ---------------------------------------------------------------------------
// RowPool / Scratch

RowPool::RowPool(RowIndex first, RowIndex end)
    : first_(first), end_(end), capacity_(end > first ? end - first : 0), in_use_(capacity_, false) {
  free_.reserve(capacity_);
  // Lowest row on top of the stack.
  for (RowIndex r = end; r > first; --r) free_.push_back(r - 1);
}

RowIndex RowPool::acquire() {
  require(!free_.empty(), ErrorKind::Device, "scratch region exhausted");
  const RowIndex r = free_.back();
  free_.pop_back();
  in_use_[r - first_] = true;
  return r;
}

Word RowPool::acquire(std::size_t n) {
  Word rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(acquire());
  return rows;
}

void RowPool::release(RowIndex row) {
  require(owns(row) && in_use_[row - first_], ErrorKind::Invariant, "releasing a row not held from the pool");
  in_use_[row - first_] = false;
  free_.push_back(row);
}

void RowPool::release(const Word& rows) {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) release(*it);
}

Scratch& Scratch::operator=(Scratch&& o) noexcept {
  if (this != &o) {
    reset();
    pool_ = o.pool_;
    rows_ = std::move(o.rows_);
    o.rows_.clear();
  }
  return *this;
}

void Scratch::drop_low(std::size_t low) {
  require(low <= rows_.size(), ErrorKind::InvalidArgument, "dropping more rows than held");
  for (std::size_t k = 0; k < low; ++k) pool_->release(rows_[k]);
  rows_.erase(rows_.begin(), rows_.begin() + static_cast<std::ptrdiff_t>(low));
}

Word Scratch::detach() {
  Word w = std::move(rows_);
  rows_.clear();
  return w;
}

void Scratch::reset() {
  if (pool_ != nullptr && !rows_.empty()) pool_->release(rows_);
  rows_.clear();
}

// ---------------------------------------------------------------------------
// Alu

Alu::Alu(CramArray& array, RowPool& pool, CopyMode copy_mode)
    : array_(array), pool_(pool), copy_mode_(copy_mode) {
  const auto all = array_.all_columns();
  for (int k = 0; k < 3; ++k) {
    zero_.push_back(pool_.acquire());
    array_.write_row(zero_.back(), all, BitVector(array_.cols(), false));
  }
  one_ = pool_.acquire();
  array_.write_row(one_, all, BitVector(array_.cols(), true));
}

RowIndex Alu::zero_other_than(std::initializer_list<RowIndex> taken) const {
  for (auto z : zero_)
    if (std::find(taken.begin(), taken.end(), z) == taken.end()) return z;
  fail(ErrorKind::Invariant, "no free constant-zero row");
}

Word Alu::constant_word(std::uint64_t value, std::size_t width) const {
  Word w(width);
  for (std::size_t k = 0; k < width; ++k) w[k] = ((value >> k) & 1u) != 0 ? one_ : zero_[0];
  return w;
}

void Alu::full_add(RowIndex a, RowIndex b, RowIndex cin, RowIndex sum, RowIndex cout, const ColumnMask& mask) {
  const RowIndex rows[5] = {a, b, cin, sum, cout};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < i; ++j)
      require(rows[i] != rows[j], ErrorKind::Device, "full adder rows must be distinct");

  array_.preset(cout, mask, gate_info(GateKind::Maj3).preset);
  array_.apply_gate(GateKind::Maj3, {a, b, cin}, cout, mask);

  const RowIndex inv[2] = {pool_.acquire(), pool_.acquire()};
  array_.preset(inv[0], mask, gate_info(GateKind::Inv12).preset);
  array_.preset(inv[1], mask, gate_info(GateKind::Inv12).preset);
  const RowIndex src[1] = {cout};
  array_.apply_gate(GateKind::Inv12, src, inv, mask);

  array_.preset(sum, mask, gate_info(GateKind::Maj5).preset);
  const RowIndex maj_in[5] = {a, b, cin, inv[0], inv[1]};
  const RowIndex maj_out[1] = {sum};
  array_.apply_gate(GateKind::Maj5, maj_in, maj_out, mask);
  pool_.release(inv[1]);
  pool_.release(inv[0]);
}

Scratch Alu::add(const Word& a, const Word& b, const ColumnMask& mask, bool keep_carry,
                 std::optional<RowIndex> carry_in) {
  const std::size_t width = std::max(a.size(), b.size());
  require(width > 0, ErrorKind::InvalidArgument, "empty operands");
  Scratch out = scratch(width + (keep_carry ? 1 : 0));
  std::optional<Scratch> carry;
  RowIndex cin_row = 0;
  for (std::size_t k = 0; k < width; ++k) {
    const RowIndex ak = k < a.size() ? a[k] : zero_other_than({});
    const RowIndex bk = k < b.size() ? b[k] : zero_other_than({ak});
    if (k == 0) cin_row = carry_in ? *carry_in : zero_other_than({ak, bk});
    const bool last = k + 1 == width;
    if (last && keep_carry) {
      full_add(ak, bk, cin_row, out[k], out[width], mask);
    } else {
      Scratch cout = scratch(1);
      full_add(ak, bk, cin_row, out[k], cout[0], mask);
      carry = std::move(cout);
      cin_row = (*carry)[0];
    }
  }
  return out;
}

void Alu::add_words(const Word& a, const Word& b, const Word& out, const ColumnMask& mask) {
  require(a.size() == b.size(), ErrorKind::InvalidArgument, "add_words width mismatch");
  require(out.size() == a.size() + 1, ErrorKind::InvalidArgument, "add_words output must be one bit wider");
  Scratch sum = add(a, b, mask);
  copy_region(sum, out, mask);
}

Scratch Alu::multiply(const Word& a, const Word& b, const ColumnMask& mask) {
  const std::size_t s = a.size();
  require(s > 0 && b.size() == s, ErrorKind::InvalidArgument, "multiply width mismatch");
  Scratch out = scratch(2 * s);
  // acc[pos]: current partial sum row for bit pos; zero rows until first written.
  std::vector<RowIndex> acc(2 * s, zero_[0]);
  std::vector<bool> acc_owned(2 * s, false);

  for (std::size_t i = 0; i < s; ++i) {
    Scratch pp = and_scale(b[i], a, mask);
    RowIndex carry = zero_other_than({acc[i], pp[0]});
    bool carry_owned = false;
    for (std::size_t k = 0; k < s; ++k) {
      const std::size_t pos = i + k;
      const bool final_bit = (k == 0) || (i + 1 == s);
      const RowIndex sum_row = final_bit ? out[pos] : pool_.acquire();
      if (carry == acc[pos] || carry == pp[k]) carry = zero_other_than({acc[pos], pp[k]});
      const bool last_k = k + 1 == s;
      const RowIndex cout_row = (last_k && i + 1 == s) ? out[pos + 1] : pool_.acquire();
      full_add(acc[pos], pp[k], carry, sum_row, cout_row, mask);
      if (acc_owned[pos]) pool_.release(acc[pos]);
      acc[pos] = sum_row;
      acc_owned[pos] = !final_bit;
      if (carry_owned) pool_.release(carry);
      if (last_k) {
        if (i + 1 < s) {
          acc[pos + 1] = cout_row;
          acc_owned[pos + 1] = true;
        }
        carry_owned = false;
      } else {
        carry = cout_row;
        carry_owned = true;
      }
    }
  }
  return out;
}

void Alu::multiply_words(const Word& a, const Word& b, const Word& out, const ColumnMask& mask) {
  require(out.size() == 2 * a.size(), ErrorKind::InvalidArgument, "product word must be 2S bits");
  Scratch p = multiply(a, b, mask);
  copy_region(p, out, mask);
}

Scratch Alu::and_scale(RowIndex spike, const Word& value, const ColumnMask& mask) {
  Scratch out = scratch(value.size());
  and_scale_into(spike, value, out, mask);
  return out;
}

void Alu::and_scale_into(RowIndex spike, const Word& value, const Word& out, const ColumnMask& mask) {
  require(out.size() == value.size(), ErrorKind::InvalidArgument, "and_scale width mismatch");
  for (std::size_t k = 0; k < value.size(); ++k) gate_into(GateKind::And, {spike, value[k]}, out[k], mask);
}

RowIndex Alu::gate(GateKind kind, std::initializer_list<RowIndex> inputs, const ColumnMask& mask) {
  const RowIndex out = pool_.acquire();
  gate_into(kind, inputs, out, mask);
  return out;
}

void Alu::gate_into(GateKind kind, std::initializer_list<RowIndex> inputs, RowIndex out, const ColumnMask& mask) {
  array_.preset(out, mask, gate_info(kind).preset);
  array_.apply_gate(kind, inputs, out, mask);
}

void Alu::compare_ge(const Word& a, const Word& b, RowIndex out, const ColumnMask& mask) {
  const std::size_t n = a.size();
  require(n > 0 && b.size() == n, ErrorKind::InvalidArgument, "compare width mismatch");
  using enum GateKind;
  // The cascade seeds its own constant-one operand: NAND(0, a0) = 1.
  const RowIndex one = gate(Nand, {zero_other_than({a[0]}), a[0]}, mask);
  // g0 = a0 | !b0
  const RowIndex na0 = gate(Nand, {a[0], one}, mask);
  RowIndex g = n == 1 ? out : pool_.acquire();
  gate_into(Nand, {na0, b[0]}, g, mask);
  pool_.release(na0);
  for (std::size_t k = 1; k < n; ++k) {
    // g = MAJ(a_k, !b_k, g): generate (a & !b) or propagate (a | !b) & g.
    const RowIndex nb = gate(Nand, {b[k], one}, mask);
    const RowIndex na = gate(Nand, {a[k], one}, mask);
    const RowIndex p = gate(Nand, {a[k], nb}, mask);
    const RowIndex q = gate(Nand, {na, b[k]}, mask);
    const RowIndex r = gate(Nand, {q, g}, mask);
    const RowIndex g_next = k + 1 == n ? out : pool_.acquire();
    gate_into(Nand, {p, r}, g_next, mask);
    for (RowIndex t : {r, q, p, na, nb}) pool_.release(t);
    pool_.release(g);
    g = g_next;
  }
  pool_.release(one);
}

Scratch Alu::compare_ge(const Word& a, const Word& b, const ColumnMask& mask) {
  Scratch out = scratch(1);
  compare_ge(a, b, out[0], mask);
  return out;
}

Scratch Alu::round_to(Scratch value, unsigned bits, const ColumnMask& mask) {
  const std::size_t w = value.width();
  require(bits >= 1 && w > bits, ErrorKind::InvalidArgument, "round_to requires a wider input word");
  const std::uint64_t factor = rounding_factor(static_cast<unsigned>(w - bits));
  if (factor == 0) {
    value.drop_low(w - bits);
    return value;
  }
  Scratch sum = add(value, constant_word(factor, w - bits - 1), mask, true);
  value.reset();
  const RowIndex carry = sum[w];
  Scratch out = scratch(bits);
  for (std::size_t k = 0; k < bits; ++k) gate_into(GateKind::Maj3, {sum[w - bits + k], carry, one_}, out[k], mask);
  return out;
}

Scratch Alu::saturating_add(const Word& a, const Word& b, const ColumnMask& mask) {
  require(a.size() == b.size(), ErrorKind::InvalidArgument, "saturating_add width mismatch");
  const std::size_t w = a.size();
  Scratch sum = add(a, b, mask, true);
  Scratch out = scratch(w);
  for (std::size_t k = 0; k < w; ++k) gate_into(GateKind::Maj3, {sum[k], sum[w], one_}, out[k], mask);
  return out;
}

Scratch Alu::subtract_clamped(const Word& a, const Word& b, const ColumnMask& mask) {
  require(a.size() == b.size(), ErrorKind::InvalidArgument, "subtract width mismatch");
  const std::size_t w = a.size();
  Scratch nb = scratch(w);
  for (std::size_t k = 0; k < w; ++k) gate_into(GateKind::Not, {b[k]}, nb[k], mask);
  Scratch diff = add(a, nb, mask, true, one_);
  nb.reset();
  Scratch out = scratch(w);
  for (std::size_t k = 0; k < w; ++k) gate_into(GateKind::And, {diff[k], diff[w]}, out[k], mask);
  return out;
}

Scratch Alu::increment_saturating(const Word& ctr, const Word& limit, const ColumnMask& mask) {
  require(ctr.size() == limit.size(), ErrorKind::InvalidArgument, "increment limit width mismatch");
  Scratch at_limit = compare_ge(ctr, limit, mask);
  Scratch step = scratch(1);
  gate_into(GateKind::Not, {at_limit[0]}, step[0], mask);
  at_limit.reset();
  return add(ctr, {}, mask, false, step[0]);
}

Scratch Alu::increment(const Word& ctr, const ColumnMask& mask) { return add(ctr, {}, mask, false, one_); }

void Alu::copy_region(const Word& src, const Word& dst, const ColumnMask& mask) {
  require(src.size() == dst.size(), ErrorKind::InvalidArgument, "copy width mismatch");
  for (auto s : src)
    require(std::find(dst.begin(), dst.end(), s) == dst.end(), ErrorKind::InvalidArgument,
            "copy source and destination rows overlap");
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (copy_mode_ == CopyMode::ReadWrite) {
      const BitVector bits = array_.read_row(src[k], mask);
      array_.write_row(dst[k], mask, bits);
    } else {
      gate_into(GateKind::Copy, {src[k]}, dst[k], mask);
    }
  }
}

void Alu::transfer_columns(const Word& src, std::size_t src_col, const Word& dst, std::size_t dst_col,
                           std::size_t count) {
  require(src.size() == dst.size(), ErrorKind::InvalidArgument, "transfer width mismatch");
  require(dst_col <= src_col, ErrorKind::InvalidArgument, "columns can only move toward column 0");
  const auto src_mask = array_.columns(src_col, count);
  const auto dst_mask = array_.columns(dst_col, count);
  for (std::size_t k = 0; k < src.size(); ++k) {
    const BitVector bits = array_.read_row(src[k], src_mask).shifted_down(src_col - dst_col);
    array_.write_row(dst[k], dst_mask, bits);
  }
}

void Alu::write_constant(const Word& rows, std::uint64_t value, const ColumnMask& mask) {
  for (std::size_t k = 0; k < rows.size(); ++k)
    array_.write_row(rows[k], mask, BitVector(array_.cols(), ((value >> k) & 1u) != 0));
}

void Alu::write_values(const Word& rows, const std::vector<std::uint64_t>& values, const ColumnMask& mask) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    BitVector bits(array_.cols());
    for (std::size_t c = 0; c < values.size() && c < bits.size(); ++c)
      if (((values[c] >> k) & 1u) != 0) bits.set(c);
    array_.write_row(rows[k], mask, bits);
  }
}

std::uint64_t Alu::peek_value(const Word& rows, std::size_t col) const {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (array_.peek(rows[k], col)) v |= std::uint64_t{1} << k;
  return v;
}

}  // namespace cramsnn

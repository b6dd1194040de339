#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cramsnn/alu.hpp"

using namespace cramsnn;

namespace {

struct Bench {
  CramArray array;
  RowPool pool;
  Alu alu;
  explicit Bench(std::size_t cols = 256, CopyMode mode = CopyMode::ReadWrite)
      : array(128, cols, DeviceProfile::builtin("SHE-F")), pool(40, 128), alu(array, pool, mode) {}
  ColumnMask all() const { return array.all_columns(); }
  Word rows(RowIndex first, std::size_t n) const {
    Word w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = first + static_cast<RowIndex>(k);
    return w;
  }
};

std::vector<std::uint64_t> low_nibbles(std::size_t n) {
  std::vector<std::uint64_t> v(n);
  for (std::size_t c = 0; c < n; ++c) v[c] = c & 15u;
  return v;
}

std::vector<std::uint64_t> high_nibbles(std::size_t n) {
  std::vector<std::uint64_t> v(n);
  for (std::size_t c = 0; c < n; ++c) v[c] = (c >> 4) & 15u;
  return v;
}

}  // namespace

TEST_CASE("full adder, all eight input combinations") {
  Bench b(8);
  const Word in = b.rows(8, 3);
  std::vector<std::uint64_t> a(8), x(8), c(8);
  for (std::size_t col = 0; col < 8; ++col) {
    a[col] = col & 1u;
    x[col] = (col >> 1) & 1u;
    c[col] = (col >> 2) & 1u;
  }
  b.alu.write_values({in[0]}, a, b.all());
  b.alu.write_values({in[1]}, x, b.all());
  b.alu.write_values({in[2]}, c, b.all());
  b.alu.full_add(in[0], in[1], in[2], 20, 21, b.all());
  for (std::size_t col = 0; col < 8; ++col) {
    const std::uint64_t total = a[col] + x[col] + c[col];
    CHECK(b.array.peek(20, col) == bool(total & 1u));
    CHECK(b.array.peek(21, col) == bool(total >> 1));
  }
  CHECK(b.array.ledger().gate_events(GateKind::Maj3) == 1);
  CHECK(b.array.ledger().gate_events(GateKind::Inv12) == 1);
  CHECK(b.array.ledger().gate_events(GateKind::Maj5) == 1);
}

TEST_CASE("ripple add") {
  Bench b(256);
  const Word a = b.rows(8, 4), x = b.rows(12, 4);
  const auto av = low_nibbles(256), xv = high_nibbles(256);
  b.alu.write_values(a, av, b.all());
  b.alu.write_values(x, xv, b.all());
  Scratch sum = b.alu.add(a, x, b.all());
  CHECK(sum.width() == 5);
  for (std::size_t c = 0; c < 256; ++c) CHECK(b.alu.peek_value(sum, c) == av[c] + xv[c]);
  // 0b0101 + 0b0011 lives in column 0x35.
  CHECK(b.alu.peek_value(sum, 0x35) == 0b01000);
}

TEST_CASE("multiply") {
  Bench b(256);
  const Word a = b.rows(8, 4), x = b.rows(12, 4);
  const auto av = low_nibbles(256), xv = high_nibbles(256);
  b.alu.write_values(a, av, b.all());
  b.alu.write_values(x, xv, b.all());
  const CostLedger before = b.array.ledger();
  Scratch prod = b.alu.multiply(a, x, b.all());
  const CostLedger d = b.array.ledger().since(before);
  CHECK(prod.width() == 8);
  for (std::size_t c = 0; c < 256; ++c) CHECK(b.alu.peek_value(prod, c) == av[c] * xv[c]);
  CHECK(b.alu.peek_value(prod, 0x35) == 15);
  CHECK(d.gate_events(GateKind::Maj5) == 16);
  CHECK(d.gate_events(GateKind::And) == 16);
}

TEST_CASE("and_scale") {
  Bench b(2);
  const Word v = b.rows(8, 4);
  b.alu.write_constant(v, 0b1011, b.all());
  b.alu.write_values({20}, {1, 0}, b.all());
  Scratch out = b.alu.and_scale(20, v, b.all());
  CHECK(b.alu.peek_value(out, 0) == 0b1011);
  CHECK(b.alu.peek_value(out, 1) == 0);
  CHECK(b.array.ledger().gate_events(GateKind::And) == 4);
}

TEST_CASE("comparator") {
  SUBCASE("exhaustive 4-bit") {
    Bench b(256);
    const Word a = b.rows(8, 4), x = b.rows(12, 4);
    const auto av = low_nibbles(256), xv = high_nibbles(256);
    b.alu.write_values(a, av, b.all());
    b.alu.write_values(x, xv, b.all());
    const CostLedger before = b.array.ledger();
    Scratch ge = b.alu.compare_ge(a, x, b.all());
    CHECK(b.array.ledger().since(before).gate_events(GateKind::Nand) == 6 * 4 - 3);
    for (std::size_t c = 0; c < 256; ++c) CHECK(b.alu.peek_value(ge, c) == (av[c] >= xv[c] ? 1u : 0u));
  }
  SUBCASE("8-bit NAND count and reflexivity") {
    Bench b(4);
    const Word a = b.rows(8, 8), x = b.rows(16, 8);
    b.alu.write_values(a, {0, 200, 17, 255}, b.all());
    b.alu.write_values(x, {0, 200, 18, 254}, b.all());
    const CostLedger before = b.array.ledger();
    Scratch ge = b.alu.compare_ge(a, x, b.all());
    CHECK(b.array.ledger().since(before).gate_events(GateKind::Nand) == 45);
    CHECK(b.alu.peek_value(ge, 0) == 1);
    CHECK(b.alu.peek_value(ge, 1) == 1);
    CHECK(b.alu.peek_value(ge, 2) == 0);
    CHECK(b.alu.peek_value(ge, 3) == 1);
  }
}

TEST_CASE("rounding factor") {
  CHECK(rounding_factor(0) == 0);
  CHECK(rounding_factor(1) == 0);
  CHECK(rounding_factor(4) == 0b0111);
  CHECK(rounding_factor(5) == 0b1111);
}

TEST_CASE("round_to, W=8 to S=4") {
  Bench b(256);
  std::vector<std::uint64_t> vals(256);
  for (std::size_t c = 0; c < 256; ++c) vals[c] = c;
  Scratch v = b.alu.scratch(8);
  b.alu.write_values(v, vals, b.all());
  Scratch r = b.alu.round_to(std::move(v), 4, b.all());
  CHECK(r.width() == 4);
  CHECK(b.alu.peek_value(r, 0b00010111) == 0b0001);
  CHECK(b.alu.peek_value(r, 0) == 0);
  std::uint64_t prev = 0;
  for (std::size_t c = 0; c < 256; ++c) {
    const std::uint64_t got = b.alu.peek_value(r, c);
    CHECK(got == std::min<std::uint64_t>((c + 7) >> 4, 15));
    CHECK(got >= prev);
    prev = got;
  }
}

TEST_CASE("saturating add and clamped subtract") {
  Bench b(256);
  const Word a = b.rows(8, 4), x = b.rows(12, 4);
  const auto av = low_nibbles(256), xv = high_nibbles(256);
  b.alu.write_values(a, av, b.all());
  b.alu.write_values(x, xv, b.all());
  Scratch sum = b.alu.saturating_add(a, x, b.all());
  Scratch diff = b.alu.subtract_clamped(a, x, b.all());
  for (std::size_t c = 0; c < 256; ++c) {
    CHECK(b.alu.peek_value(sum, c) == std::min<std::uint64_t>(av[c] + xv[c], 15));
    CHECK(b.alu.peek_value(diff, c) == (av[c] >= xv[c] ? av[c] - xv[c] : 0));
  }
}

TEST_CASE("increment_saturating sweep") {
  Bench b(32);
  const Word ctr = b.rows(8, 5);
  std::vector<std::uint64_t> vals(32);
  for (std::size_t c = 0; c < 32; ++c) vals[c] = c;
  b.alu.write_values(ctr, vals, b.all());
  const Word limit = b.alu.constant_word(31, 5);
  Scratch next = b.alu.increment_saturating(ctr, limit, b.all());
  for (std::size_t c = 0; c < 32; ++c) CHECK(b.alu.peek_value(next, c) == std::min<std::uint64_t>(c + 1, 31));
  CHECK(b.alu.peek_value(next, 5) == 6);
  Scratch wrap = b.alu.increment(ctr, b.all());
  CHECK(b.alu.peek_value(wrap, 31) == 0);
}

TEST_CASE("copy_region") {
  for (CopyMode mode : {CopyMode::ReadWrite, CopyMode::Gate}) {
    Bench b(64, mode);
    const Word src = b.rows(8, 6), dst = b.rows(16, 6);
    std::vector<std::uint64_t> vals(64);
    for (std::size_t c = 0; c < 64; ++c) vals[c] = (c * 37) & 63u;
    b.alu.write_values(src, vals, b.all());
    const CostLedger before = b.array.ledger();
    b.alu.copy_region(src, dst, b.all());
    const CostLedger d = b.array.ledger().since(before);
    for (std::size_t c = 0; c < 64; ++c) CHECK(b.alu.peek_value(dst, c) == vals[c]);
    if (mode == CopyMode::ReadWrite) {
      CHECK(d.entry(CostClass::Read).events == 6);
      CHECK(d.entry(CostClass::Write).events == 6);
    } else {
      CHECK(d.gate_events(GateKind::Copy) == 6);
    }
  }
}

TEST_CASE("history shift moves each row down by one") {
  Bench b(4);
  const Word h = b.rows(8, 8);
  for (std::size_t s = 0; s < 8; ++s) b.alu.write_values({h[s]}, {s & 1u, (s >> 1) & 1u, (s >> 2) & 1u, 1}, b.all());
  std::vector<std::vector<bool>> before(8, std::vector<bool>(4));
  for (std::size_t s = 0; s < 8; ++s)
    for (std::size_t c = 0; c < 4; ++c) before[s][c] = b.array.peek(h[s], c);
  for (std::size_t s = 7; s > 0; --s) b.alu.copy_region({h[s - 1]}, {h[s]}, b.all());
  for (std::size_t s = 1; s < 8; ++s)
    for (std::size_t c = 0; c < 4; ++c) CHECK(b.array.peek(h[s], c) == before[s - 1][c]);
}

TEST_CASE("row pool") {
  RowPool pool(10, 14);
  CHECK(pool.available() == 4);
  const Word w = pool.acquire(3);
  CHECK(pool.available() == 1);
  pool.release(w);
  CHECK(pool.available() == 4);
  CHECK_THROWS(pool.acquire(5));
}

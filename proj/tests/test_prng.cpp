#include <doctest.h>

#include <cstdint>
#include <set>

#include "cramsnn/prng.hpp"

using namespace cramsnn;

namespace {

// Independent shift register: bit 0 takes x9 ^ x5.
std::uint32_t step_9_5(std::uint32_t s) { return ((s << 1) | (((s >> 8) ^ (s >> 4)) & 1u)) & 0x1FFu; }

struct Bench {
  CramArray array{64, 4, DeviceProfile::builtin("SHE-F")};
  RowPool pool{8, 64};
  Alu alu{array, pool};
};

}  // namespace

TEST_CASE("software LFSR has period 511 for any nonzero seed") {
  LfsrConfig cfg;
  for (std::uint32_t seed : {1u, 2u, 77u, 300u, 511u}) {
    std::uint32_t s = seed;
    std::set<std::uint32_t> seen;
    std::size_t period = 0;
    do {
      CHECK(lfsr_next(s, cfg) == step_9_5(s));
      seen.insert(s);
      s = lfsr_next(s, cfg);
      ++period;
    } while (s != seed && period < 1000);
    CHECK(period == 511);
    CHECK(seen.size() == 511);
  }
}

TEST_CASE("in-array LFSR follows the software register") {
  Bench b;
  LfsrConfig cfg;
  cfg.seed = 0b000000001;
  Lfsr lfsr(b.alu, cfg, b.array.columns(0, 1));
  CHECK(lfsr.state() == 1);
  std::uint32_t s = cfg.seed;
  for (int t = 0; t < 600; ++t) {
    s = step_9_5(s);
    CHECK(lfsr.step() == s);
  }
  CHECK(lfsr.state() == s);
}

TEST_CASE("13 gate cycles per shift of the 9-bit register") {
  Bench b;
  Lfsr lfsr(b.alu, LfsrConfig{}, b.array.columns(1, 1));
  const CostLedger before = b.array.ledger();
  lfsr.step();
  const CostLedger d = b.array.ledger().since(before);
  CHECK(d.gate_events(GateKind::Nand) + d.gate_events(GateKind::Copy) == 13);
}

TEST_CASE("noise words") {
  Bench b;
  LfsrConfig cfg;
  cfg.seed = 5;
  Lfsr lfsr(b.alu, cfg, b.array.columns(0, 1));
  const std::uint32_t first = lfsr.noise_value(4);
  const std::uint32_t second = lfsr.noise_value(4);
  CHECK(first == 5);
  CHECK(first != second);
  for (int t = 0; t < 50; ++t) CHECK(lfsr.noise_value(1) <= 1);

  Lfsr again(b.alu, cfg, b.array.columns(1, 1));
  const std::uint32_t start = again.noise_value(9);
  for (int t = 1; t < 511; ++t) again.noise_value(9);
  CHECK(again.noise_value(9) == start);
}

TEST_CASE("invalid LFSR configuration") {
  LfsrConfig zero;
  zero.seed = 0;
  CHECK_THROWS(zero.validate());
  LfsrConfig tap;
  tap.taps = {10, 5};
  CHECK_THROWS(tap.validate());
  Bench b;
  CHECK_THROWS(Lfsr(b.alu, LfsrConfig{}, b.array.columns(0, 2)));
}

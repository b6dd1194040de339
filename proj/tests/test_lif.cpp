#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cramsnn/lif.hpp"
#include "cramsnn/oracle.hpp"

using namespace cramsnn;

namespace {

const DeviceProfile& shef() {
  static const DeviceProfile p = DeviceProfile::builtin("SHE-F");
  return p;
}

NeuronParams basic(std::size_t j, unsigned S, std::size_t L_f) {
  NeuronParams p;
  p.j = j;
  p.S = S;
  p.L_f = L_f;
  p.weights.assign(j, 1);
  p.delays.assign(j, 1);
  p.theta = p.max_value();
  return p;
}

std::vector<std::uint8_t> ones(std::size_t j) { return std::vector<std::uint8_t>(j, 1); }
std::vector<std::uint8_t> zeros(std::size_t j) { return std::vector<std::uint8_t>(j, 0); }

}  // namespace

TEST_CASE("layout plan rows of the array size table") {
  const LayoutPlan a = plan_layout(4, 32);
  CHECK(a.array_size == 256);
  CHECK(a.utilization == doctest::Approx(56.25).epsilon(1e-9));
  const LayoutPlan b = plan_layout(5, 32);
  CHECK(b.array_size == 512);
  CHECK(std::abs(b.utilization - 35.15) <= 0.01);
  const LayoutPlan c = plan_layout(9, 64);
  CHECK(c.array_size == 2048);
  CHECK(std::abs(c.utilization - 29.88) <= 0.01);
  CHECK_THROWS(plan_layout(16, 4096));
}

TEST_CASE("alpha LUT quantization") {
  const auto lut = quantize_alpha_lut(4.0, 32, 8);
  REQUIRE(lut.size() == 32);
  for (std::size_t s = 0; s < lut.size(); ++s) {
    CHECK(lut[s] == static_cast<std::uint32_t>(std::lround(255.0 * std::exp(-static_cast<double>(s) / 4.0))));
    CHECK(lut[s] <= 255);
    CHECK(lut[s] <= lut[0]);
  }
  CHECK(lut[4] == 94);
}

TEST_CASE("initialization round trip") {
  NeuronParams p = basic(4, 6, 16);
  p.weights = {3, 0, 63, 17};
  p.delays = {1, 2, 5, 63};
  Neuron n(p, shef());
  const auto lut = quantize_alpha_lut(p.tau_u, p.L_f, p.S);
  for (std::size_t k = 0; k < p.j; ++k) {
    CHECK(n.weight(k) == p.weights[k]);
    CHECK(n.delay(k) == p.delays[k]);
    CHECK(n.counter(k) == 0);
  }
  for (std::size_t s = 0; s < p.L_f; ++s) CHECK(n.lut_entry(s) == lut[s]);
  CHECK(n.membrane() == 0);
  CHECK_FALSE(n.init_ledger().empty());
  CHECK(n.array().ledger().empty());
}

TEST_CASE("delay gate") {
  NeuronParams p = basic(2, 4, 4);
  p.delays = {1, 3};
  Neuron n(p, shef());
  for (int t = 1; t <= 9; ++t) {
    const ColumnMask en = n.delay_gate();
    CHECK(en.test(0));
    CHECK(en.test(1) == (t % 3 == 0));
    n.write_spikes(zeros(2));
    n.step_threshold_spike();
  }
}

TEST_CASE("disabled columns skip the filter and multiply") {
  NeuronParams p = basic(4, 4, 8);
  NeuronParams q = p;
  q.delays = {1, 1, 3, 3};
  Neuron all(p, shef()), half(q, shef());
  all.timestep(ones(4));
  half.timestep(ones(4));
  const auto& la = all.array().ledger();
  const auto& lh = half.array().ledger();
  // Two of four columns are gated off: S*L_f filter ANDs plus S*S multiplier ANDs each.
  CHECK(la.entry(CostClass::And).cells - lh.entry(CostClass::And).cells == 2 * (4 * 8 + 4 * 4));
  CHECK(la.entry(CostClass::Maj5).cells > lh.entry(CostClass::Maj5).cells);
}

TEST_CASE("filter") {
  SUBCASE("S x L_f AND events") {
    NeuronParams p = basic(1, 8, 64);
    Neuron n(p, shef());
    const ColumnMask en = n.delay_gate();
    n.write_spikes(ones(1));
    const CostLedger before = n.array().ledger();
    Scratch f = n.step_filter(en);
    CHECK(n.array().ledger().since(before).gate_events(GateKind::And) == 512);
  }
  SUBCASE("zero history") {
    Neuron n(basic(1, 8, 16), shef());
    const ColumnMask en = n.delay_gate();
    n.write_spikes(zeros(1));
    Scratch f = n.step_filter(en);
    CHECK(n.alu().peek_value(f, 0) == 0);
  }
  SUBCASE("one and two spikes") {
    const NeuronParams p = basic(1, 8, 16);
    const auto lut = quantize_alpha_lut(p.tau_u, p.L_f, p.S);
    // 4 extra bits of filter width, rounded back with factor 0b111.
    auto expect = [](std::uint64_t sum) { return std::min<std::uint64_t>((sum + 7) >> 4, 255); };
    Neuron n(p, shef());
    ColumnMask en = n.delay_gate();
    n.write_spikes(ones(1));
    {
      Scratch f = n.step_filter(en);
      CHECK(n.alu().peek_value(f, 0) == expect(lut[0]));
    }
    n.step_threshold_spike();
    en = n.delay_gate();
    n.write_spikes(ones(1));
    Scratch f = n.step_filter(en);
    CHECK(n.alu().peek_value(f, 0) == expect(lut[0] + lut[1]));
  }
}

TEST_CASE("weight multiply and rounding") {
  NeuronParams p = basic(1, 4, 4);
  p.weights = {0b0011};
  Neuron n(p, shef());
  const ColumnMask en = n.delay_gate();
  Scratch f = n.alu().scratch(4);
  n.alu().write_constant(f, 0b0101, en);
  const CostLedger before = n.array().ledger();
  Scratch prod = n.step_weight_mul(std::move(f), en);
  CHECK(n.alu().peek_value(prod, 0) == 0b0001);
  CHECK(n.array().ledger().since(before).gate_events(GateKind::Maj5) >= 16);
}

TEST_CASE("zero weight product") {
  NeuronParams p = basic(1, 4, 4);
  p.weights = {0};
  Neuron n(p, shef());
  const ColumnMask en = n.delay_gate();
  Scratch f = n.alu().scratch(4);
  n.alu().write_constant(f, 15, en);
  Scratch prod = n.step_weight_mul(std::move(f), en);
  CHECK(n.alu().peek_value(prod, 0) == 0);
}

TEST_CASE("synapse reduction halves per stage") {
  NeuronParams p = basic(4, 4, 4);
  Neuron n(p, shef());
  Scratch v = n.alu().scratch(4);
  n.alu().write_values(v, {1, 2, 3, 4}, n.synapse_mask());
  Scratch r = n.step_reduce(std::move(v));
  // (1+3)/2 = 2, (2+4)/2 = 3, (2+3)/2 truncates to 2.
  CHECK(n.alu().peek_value(r, 0) == 2);
  Scratch z = n.alu().scratch(4);
  n.alu().write_constant(z, 0, n.synapse_mask());
  Scratch rz = n.step_reduce(std::move(z));
  CHECK(n.alu().peek_value(rz, 0) == 0);
}

TEST_CASE("bias addition") {
  NeuronParams p = basic(1, 6, 4);
  p.bias = 3;
  Neuron n(p, shef());
  Scratch v = n.alu().scratch(6);
  n.alu().write_constant(v, 10, n.neuron_mask());
  Scratch u = n.step_bias_noise(std::move(v));
  CHECK(n.alu().peek_value(u, 0) == 13);
  p.bias = 0;
  Neuron m(p, shef());
  Scratch w = m.alu().scratch(6);
  m.alu().write_constant(w, 10, m.neuron_mask());
  Scratch u0 = m.step_bias_noise(std::move(w));
  CHECK(m.alu().peek_value(u0, 0) == 10);
}

TEST_CASE("membrane leak, tau_v = 2 halves v") {
  NeuronParams p = basic(1, 8, 4);
  p.weights = {0};
  p.tau_v = 2.0;
  p.bias = 8;
  p.theta = 200;
  Neuron n(p, shef());
  n.timestep(zeros(1));
  REQUIRE(n.membrane() == 8);
  Scratch zero = n.alu().scratch(8);
  n.alu().write_constant(zero, 0, n.neuron_mask());
  n.step_membrane(std::move(zero));
  CHECK(n.membrane() == 4);
}

TEST_CASE("threshold and reset") {
  SUBCASE("theta = 1, v = 1 spikes and resets") {
    NeuronParams p = basic(1, 4, 4);
    p.weights = {0};
    p.theta = 1;
    p.bias = 1;
    Neuron n(p, shef());
    CHECK(n.timestep(zeros(1)));
    CHECK(n.membrane() == 0);
  }
  SUBCASE("sub-threshold keeps v") {
    NeuronParams p = basic(1, 4, 4);
    p.weights = {0};
    p.theta = 9;
    p.bias = 5;
    Neuron n(p, shef());
    CHECK_FALSE(n.timestep(zeros(1)));
    CHECK(n.membrane() == 5);
  }
  SUBCASE("quiescent neuron") {
    NeuronParams p = basic(2, 4, 4);
    p.weights = {0, 0};
    p.theta = 1;
    Neuron n(p, shef());
    for (int t = 0; t < 20; ++t) CHECK_FALSE(n.timestep(ones(2)));
    CHECK(n.membrane() == 0);
  }
}

TEST_CASE("constant drive") {
  // After a spike v is reset, and the next update subtracts theta once more,
  // so a bias of 2 theta fires every step and a bias of theta every other step.
  NeuronParams p = basic(1, 6, 4);
  p.weights = {0};
  p.theta = 5;
  p.bias = 10;
  Neuron every(p, shef());
  for (int t = 0; t < 10; ++t) CHECK(every.timestep(zeros(1)));
  p.bias = 5;
  Neuron alternate(p, shef());
  for (int t = 0; t < 10; ++t) CHECK(alternate.timestep(zeros(1)) == (t % 2 == 0));
}

TEST_CASE("noise is reproducible") {
  NeuronParams p = basic(2, 4, 4);
  p.noise_current = true;
  p.noise_membrane = true;
  p.lfsr.seed = 77;
  p.theta = 12;
  Neuron a(p, shef()), b(p, shef());
  for (int t = 0; t < 30; ++t) {
    const auto in = (t % 3) ? ones(2) : zeros(2);
    CHECK(a.timestep(in) == b.timestep(in));
    CHECK(a.membrane() == b.membrane());
  }
}

TEST_CASE("gate level equals the fixed-point model, S=4, L_f=8, j=4") {
  std::mt19937_64 rng(4242);
  std::size_t mismatched = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    NeuronParams p = basic(4, 4, 8);
    p.tau_u = 1.0 + static_cast<double>(rng() % 60) / 10.0;
    p.tau_v = 1.0 + static_cast<double>(rng() % 60) / 10.0;
    p.theta = static_cast<std::uint32_t>(rng() % 16);
    p.bias = static_cast<std::uint32_t>(rng() % 16);
    for (std::size_t k = 0; k < 4; ++k) {
      p.weights[k] = static_cast<std::uint32_t>(rng() % 16);
      p.delays[k] = static_cast<std::uint32_t>(1 + rng() % 15);
    }
    p.decay = rng() % 2 ? DecayMode::Leaky : DecayMode::Literal;
    Neuron gate(p, shef());
    FixedPointNeuron fixed(p);
    for (int t = 0; t < 16; ++t) {
      std::vector<std::uint8_t> in(4);
      for (auto& b : in) b = static_cast<std::uint8_t>(rng() & 1u);
      const bool g = gate.timestep(in);
      const bool f = fixed.step(in);
      if (g != f || gate.membrane() != fixed.membrane || gate.last_current() != fixed.current) {
        ++mismatched;
        break;
      }
    }
  }
  CHECK(mismatched == 0);
}

TEST_CASE("invalid parameters") {
  NeuronParams p = basic(3, 4, 4);
  p.weights.assign(3, 1);
  p.delays.assign(3, 1);
  CHECK_THROWS(p.validate());
  NeuronParams q = basic(2, 4, 4);
  q.delays = {0, 1};
  CHECK_THROWS(q.validate());
  NeuronParams r = basic(1, 4, 4);
  r.weights = {16};
  CHECK_THROWS(r.validate());
}

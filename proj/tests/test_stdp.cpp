#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cramsnn/lif.hpp"
#include "cramsnn/oracle.hpp"
#include "cramsnn/stdp.hpp"

using namespace cramsnn;

namespace {

const DeviceProfile& shef() {
  static const DeviceProfile p = DeviceProfile::builtin("SHE-F");
  return p;
}

NeuronParams learner(std::size_t j, unsigned S, std::size_t L_f) {
  NeuronParams p;
  p.j = j;
  p.S = S;
  p.L_f = L_f;
  p.weights.assign(j, 0);
  p.delays.assign(j, 1);
  p.theta = p.max_value();
  p.stdp.enabled = true;
  return p;
}

}  // namespace

TEST_CASE("dt counters reset on a spike and saturate at t_max") {
  NeuronParams p = learner(4, 4, 8);
  p.stdp.t_max = 7;
  Neuron n(p, shef());
  StdpEngine e(n);
  std::vector<std::uint32_t> expect(4, 7);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) {
    std::vector<std::uint8_t> in(4, 0);
    if (t < 20)
      for (auto& b : in) b = static_cast<std::uint8_t>(rng() % 3 == 0);
    n.timestep(in);
    e.update();
    for (std::size_t k = 0; k < 4; ++k) {
      expect[k] = in[k] ? 0 : std::min<std::uint32_t>(expect[k] + 1, 7);
      CHECK(e.dt_pre(k) == expect[k]);
    }
  }
  for (std::size_t k = 0; k < 4; ++k) CHECK(e.dt_pre(k) == 7);
  CHECK(e.dt_post() == 7);
}

TEST_CASE("trace values") {
  NeuronParams p = learner(1, 8, 32);
  p.tau_u = 4.0;
  const auto lut = quantize_alpha_lut(p.tau_u, p.L_f, p.S);
  const std::uint64_t f0 = stdp_trace(lut, 0, p);
  for (std::uint32_t dt = 1; dt < 31; ++dt) CHECK(stdp_trace(lut, dt, p) <= f0);
  CHECK(f0 == std::uint64_t{255} << 2);
  // Ten-bit trace against the unquantized exponential, within one LUT step.
  CHECK(std::abs(static_cast<double>(stdp_trace(lut, 4, p)) - 1023.0 * std::exp(-1.0)) <= 4.0);
  CHECK(stdp_trace(lut, 32, p) == 0);
  p.L_f = 8;
  const auto short_lut = quantize_alpha_lut(p.tau_u, p.L_f, p.S);
  CHECK(stdp_trace(short_lut, 8, p) == 0);
  CHECK(stdp_trace(short_lut, 7, p) > 0);
}

TEST_CASE("no spikes leave the weights alone") {
  NeuronParams p = learner(4, 8, 8);
  p.weights = {10, 20, 30, 40};
  Neuron n(p, shef());
  StdpEngine e(n);
  for (int t = 0; t < 20; ++t) {
    n.timestep(std::vector<std::uint8_t>(4, 0));
    e.update();
  }
  for (std::size_t k = 0; k < 4; ++k) CHECK(n.weight(k) == p.weights[k]);
}

TEST_CASE("postsynaptic spike right after a presynaptic one potentiates by A+ F(0)") {
  NeuronParams p = learner(2, 8, 8);
  p.weights = {100, 100};
  p.bias = 1;
  p.theta = 1;
  p.stdp.a_minus = 0;
  Neuron n(p, shef());
  StdpEngine e(n);
  REQUIRE(n.timestep({1, 0}));
  e.update();
  CHECK(e.dt_pre(0) == 0);
  const std::uint64_t f0 = std::uint64_t{255} << 2;
  const std::uint64_t delta = (256 * f0 + 511) >> 10;
  CHECK(e.accumulator(0) == std::min<std::uint64_t>((100u << 2) + delta, 1023));
  CHECK(e.accumulator(1) == 100u << 2);
  CHECK(n.weight(0) == e.accumulator(0) >> 2);
}

TEST_CASE("spikes more than a window apart do not change the weight") {
  NeuronParams p = learner(2, 8, 4);
  p.weights = {0, 255};
  p.theta = 20;
  p.stdp.t_max = 31;
  Neuron n(p, shef());
  StdpEngine e(n);
  bool fired = false;
  for (int t = 0; t < 16; ++t) {
    std::vector<std::uint8_t> in{static_cast<std::uint8_t>(t == 0), static_cast<std::uint8_t>(t == 10)};
    const bool post = n.timestep(in);
    CHECK_FALSE((post && t < 10));
    fired = fired || post;
    e.update();
  }
  REQUIRE(fired);
  CHECK(n.weight(0) == 0);
  CHECK(e.accumulator(0) == 0);
}

TEST_CASE("gate-level STDP equals the fixed-point model, S=8") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    NeuronParams p = learner(4, 8, 8);
    p.theta = static_cast<std::uint32_t>(10 + rng() % 60);
    p.bias = static_cast<std::uint32_t>(rng() % 8);
    for (auto& w : p.weights) w = static_cast<std::uint32_t>(rng() % 256);
    p.stdp.a_plus = static_cast<std::int32_t>(rng() % 600) - 50;
    p.stdp.a_minus = -static_cast<std::int32_t>(rng() % 600);
    p.stdp.t_max = static_cast<std::uint32_t>(1 + rng() % 12);
    p.stdp.f_scale = trial % 2 ? FScale::InverseTau : FScale::Tau;
    Neuron gate(p, shef());
    StdpEngine ge(gate);
    FixedPointNeuron fixed(p);
    FixedPointStdp fe(p, fixed.lut());
    for (int t = 0; t < 10; ++t) {
      std::vector<std::uint8_t> in(4);
      for (auto& b : in) b = static_cast<std::uint8_t>(rng() & 1u);
      const bool gs = gate.timestep(in);
      const bool fs = fixed.step(in);
      REQUIRE(gs == fs);
      ge.update();
      fe.update(in, fs);
      fixed.weights = fe.weights();
      for (std::size_t k = 0; k < 4; ++k) {
        CHECK(gate.weight(k) == fe.weights()[k]);
        CHECK(ge.accumulator(k) == fe.accumulator[k]);
        CHECK(gate.weight(k) <= 255);
      }
    }
  }
}

TEST_CASE("weights stay in range under long random schedules") {
  std::mt19937_64 rng(7);
  NeuronParams p = learner(4, 4, 8);
  p.weights = {15, 0, 8, 3};
  p.bias = 2;
  p.theta = 3;
  p.stdp.a_plus = 700;
  p.stdp.a_minus = -700;
  Neuron n(p, shef());
  StdpEngine e(n);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint8_t> in(4);
    for (auto& b : in) b = static_cast<std::uint8_t>(rng() & 1u);
    n.timestep(in);
    e.update();
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(n.weight(k) <= 15);
      CHECK(e.accumulator(k) <= 1023);
    }
  }
}

TEST_CASE("update uses only the neuron's own array") {
  NeuronParams p = learner(2, 4, 4);
  p.bias = 1;
  p.theta = 1;
  Neuron n(p, shef());
  StdpEngine e(n);
  n.timestep({1, 1});
  const CostLedger before = n.array().ledger();
  e.update();
  const CostLedger d = n.array().ledger().since(before);
  CHECK(d.entry(CostClass::Routing).events == 0);
  CHECK(d.entry(CostClass::Controller).events == 1);
}

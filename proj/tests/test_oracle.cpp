#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cramsnn/oracle.hpp"

using namespace cramsnn;

namespace {

NeuronParams single(unsigned S, std::size_t L_f) {
  NeuronParams p;
  p.j = 1;
  p.S = S;
  p.L_f = L_f;
  p.weights = {p.max_value()};
  p.delays = {1};
  p.theta = p.max_value();
  return p;
}

}  // namespace

TEST_CASE("fixed_round") {
  CHECK(fixed_round(0b00010111, 8, 4) == 0b0001);
  CHECK(fixed_round(0, 8, 4) == 0);
  CHECK(fixed_round(255, 8, 4) == 15);
  CHECK(fixed_round(9, 4, 4) == 9);
  CHECK(fixed_round(5, 5, 4) == 2);
  CHECK(fixed_round(33, 6, 1) == 1);
  CHECK(fixed_round(16, 6, 1) == 0);
  CHECK(fixed_round(17, 6, 1) == 1);
}

TEST_CASE("fixed-point neuron, worked example") {
  NeuronParams p = single(4, 1);
  FixedPointNeuron n(p);
  CHECK_FALSE(n.step({1}));
  // LUT[0] = 15, 15 * 15 = 225, (225 + 7) >> 4 = 14.
  CHECK(n.current == 14);
  CHECK(n.membrane == 14);
  CHECK_FALSE(n.step({0}));
  CHECK(n.current == 0);
  // decay 0.5 -> 8/16, 14 * 8 = 112, (112 + 7) >> 4 = 7.
  CHECK(n.membrane == 7);
  CHECK(n.step({1}));
  CHECK(n.membrane == 0);
}

TEST_CASE("identical quantized pipelines agree") {
  NeuronParams p = single(6, 8);
  p.theta = 30;
  FixedPointNeuron a(p), b(p);
  for (int t = 0; t < 50; ++t) {
    const std::vector<std::uint8_t> in{static_cast<std::uint8_t>(t % 3 == 0)};
    CHECK(a.step(in) == b.step(in));
    CHECK(a.membrane == b.membrane);
  }
}

TEST_CASE("reference neuron") {
  SUBCASE("quiescence") {
    NeuronParams p = single(8, 8);
    p.weights = {0};
    ReferenceNeuron n(p);
    for (int t = 0; t < 20; ++t) {
      const auto s = reference_lif_step(n, {1});
      CHECK(s.v == 0.0);
      CHECK_FALSE(s.spike);
    }
  }
  SUBCASE("unit impulse injects the weight times the kernel peak") {
    NeuronParams p = single(8, 8);
    p.weights = {64};
    ReferenceNeuron n(p);
    n.filter_gain = 1.0;
    n.reduce_gain = 1.0;
    const auto s = n.step({1});
    CHECK(s.u == doctest::Approx(64.0 / 256.0));
    const auto s2 = n.step({0});
    CHECK(s2.u == doctest::Approx(64.0 / 256.0 * std::exp(-1.0 / p.tau_u)));
  }
  SUBCASE("constant drive of twice theta fires every step") {
    NeuronParams p = single(8, 8);
    p.weights = {0};
    p.theta = 40;
    p.bias = 80;
    ReferenceNeuron n(p);
    for (int t = 0; t < 10; ++t) CHECK(n.step({0}).spike);
  }
}

TEST_CASE("reference STDP") {
  ReferenceStdpState st;
  st.dt_pre = {0.0, 4.0};
  st.dt_post = 4.0;
  st.tau = 4.0;
  st.a_plus = 1.0;
  st.a_minus = -0.5;
  const auto none = reference_stdp_update(st, {0, 0}, false);
  CHECK(none[0] == 0.0);
  CHECK(none[1] == 0.0);
  const auto post = reference_stdp_update(st, {0, 0}, true);
  CHECK(post[0] == doctest::Approx(1.0));
  CHECK(post[1] == doctest::Approx(std::exp(-1.0)));
  const auto pre = reference_stdp_update(st, {1, 0}, false);
  CHECK(pre[0] == doctest::Approx(-0.5 * std::exp(-1.0)));
  CHECK(pre[1] == 0.0);
}

TEST_CASE("fixed-point STDP worked example") {
  NeuronParams p = single(8, 8);
  p.weights = {100};
  p.stdp.enabled = true;
  p.stdp.a_plus = 256;
  p.stdp.a_minus = -128;
  const auto lut = quantize_alpha_lut(p.tau_u, p.L_f, p.S);
  FixedPointStdp s(p, lut);
  CHECK(s.accumulator[0] == 400);
  s.update({1}, false);
  CHECK(s.dt_pre[0] == 0);
  CHECK(s.accumulator[0] == 400);
  s.update({0}, true);
  // dt_pre = 1: F = LUT[1] << 2, delta = (256 F + 511) >> 10.
  const std::uint64_t f = std::uint64_t{lut[1]} << 2;
  CHECK(s.accumulator[0] == 400 + ((256 * f + 511) >> 10));
  CHECK(s.weights()[0] == s.accumulator[0] >> 2);
}

TEST_CASE("aligned LUT") {
  const auto four = aligned_lut(4.0, 16, 4, 9);
  const auto base = quantize_alpha_lut(4.0, 16, 4);
  for (std::size_t s = 0; s < 16; ++s) CHECK(four[s] == base[s] << 5);
  const auto wide = aligned_lut(4.0, 16, 12, 9);
  for (auto e : wide) CHECK(e <= 511);
  CHECK(aligned_lut(4.0, 16, 9, 9) == quantize_alpha_lut(4.0, 16, 9));
}

TEST_CASE("LUT width study trend") {
  const auto curve = rmse_analysis(RmseStudy{});
  REQUIRE(curve.size() == 16);
  auto at = [&](unsigned b) { return curve[b - 1].rmse; };
  CHECK(curve[0].bits == 1);
  CHECK(at(12) <= at(4));
  const double asymptote = at(16);
  for (unsigned b = 9; b <= 16; ++b) CHECK(at(b) <= 2.0 * asymptote);
  for (unsigned b = 2; b <= 16; ++b) CHECK(at(b) <= at(b - 1) * 1.05);
  CHECK(rmse_network(RmseStudy{}).size() == 10);
}

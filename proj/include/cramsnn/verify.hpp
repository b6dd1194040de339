#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cramsnn/lif.hpp"

namespace cramsnn {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

SuiteResult verify_alu_exhaustive();
/// Gate-level neuron (and STDP when drawn) against the fixed-point oracles
/// over `configs` random small configurations.
SuiteResult verify_lif_stdp(std::uint64_t seed, std::size_t configs);
SuiteResult verify_lfsr();
SuiteResult verify_routing(std::uint64_t seed);
SuiteResult verify_resistive();

std::vector<SuiteResult> run_verification(std::uint64_t seed, std::size_t configs = 1000);

/// Random small neuron: S <= 4, L_f <= 8, j <= 4, random noise and STDP settings.
template <class Rng>
NeuronParams random_small_neuron(Rng& rng);

template <class Rng>
NeuronParams random_small_neuron(Rng& rng) {
  NeuronParams p;
  p.S = 1 + static_cast<unsigned>(rng() % 4);
  p.L_f = 1 + rng() % 8;
  p.j = std::size_t{1} << (rng() % 3);
  p.tau_u = 1.0 + static_cast<double>(rng() % 60) / 10.0;
  p.tau_v = 1.0 + static_cast<double>(rng() % 60) / 10.0;
  const std::uint64_t top = p.max_value();
  p.theta = static_cast<std::uint32_t>(rng() % (top + 1));
  p.bias = static_cast<std::uint32_t>(rng() % (top + 1));
  for (std::size_t k = 0; k < p.j; ++k) {
    p.weights.push_back(static_cast<std::uint32_t>(rng() % (top + 1)));
    p.delays.push_back(static_cast<std::uint32_t>(1 + rng() % top));
  }
  p.decay = rng() % 2 ? DecayMode::Leaky : DecayMode::Literal;
  p.noise_current = rng() % 3 == 0;
  p.noise_membrane = rng() % 3 == 0;
  p.lfsr.seed = static_cast<std::uint32_t>(1 + rng() % 511);
  p.lfsr.shift = static_cast<unsigned>(rng() % (10 - p.S));
  p.stdp.enabled = rng() % 2 == 0;
  p.stdp.t_max = static_cast<std::uint32_t>(1 + rng() % 20);
  p.stdp.a_plus = static_cast<std::int32_t>(rng() % 700) - 100;
  p.stdp.a_minus = -static_cast<std::int32_t>(rng() % 700);
  p.stdp.f_scale = rng() % 2 ? FScale::Tau : FScale::InverseTau;
  p.copy_mode = rng() % 2 ? CopyMode::Gate : CopyMode::ReadWrite;
  return p;
}

}  // namespace cramsnn

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cramsnn/lif.hpp"

namespace cramsnn {

/// min((x + rounding_factor(width - bits)) >> (width - bits), 2^bits - 1);
/// identity when width == bits.
std::uint64_t fixed_round(std::uint64_t x, unsigned width, unsigned bits);

/// Integer model of the gate-level neuron with identical quantization.
class FixedPointNeuron {
 public:
  explicit FixedPointNeuron(NeuronParams params, std::optional<std::vector<std::uint32_t>> lut = {});

  bool step(const std::vector<std::uint8_t>& spikes);

  const NeuronParams& params() const noexcept { return p_; }
  const std::vector<std::uint32_t>& lut() const noexcept { return lut_; }
  std::uint32_t membrane = 0;
  bool spike = false;
  std::uint32_t current = 0;
  std::uint32_t lfsr_state = 0;
  std::vector<std::uint32_t> weights;
  std::vector<std::uint32_t> counters;
  std::vector<std::vector<std::uint8_t>> history;  // [s][k]

 private:
  std::uint32_t noise();

  NeuronParams p_;
  std::vector<std::uint32_t> lut_;
};

/// Integer model of the in-array STDP engine.
class FixedPointStdp {
 public:
  FixedPointStdp(const NeuronParams& params, std::vector<std::uint32_t> lut);

  void update(const std::vector<std::uint8_t>& pre, bool post);
  std::vector<std::uint32_t> weights() const;

  std::vector<std::uint32_t> dt_pre;
  std::uint32_t dt_post = 0;
  std::vector<std::uint64_t> accumulator;

 private:
  std::uint64_t trace(std::uint32_t dt) const;
  void apply(std::int32_t a, std::uint32_t dt, std::size_t k);

  NeuronParams p_;
  std::vector<std::uint32_t> lut_;
  unsigned precision_;
};

/// Double-precision neuron on the unit interval: an S-bit value x stands
/// for x / 2^S. The filter kernel has unit peak, e^(-s/tau_u).
class ReferenceNeuron {
 public:
  struct State {
    double u = 0.0;
    double v = 0.0;
    bool spike = false;
  };

  explicit ReferenceNeuron(const NeuronParams& params);

  State step(const std::vector<std::uint8_t>& spikes);
  const State& state() const noexcept { return state_; }

  /// Applied to the kernel sum; defaults to the gate pipeline's truncation
  /// 2^-(ceil(log2 L_f)), so both models share the same operating range.
  double filter_gain;
  /// Applied to the synapse sum; defaults to 1/j (each halving stage).
  double reduce_gain;

 private:
  double bias_;
  double theta_;
  double decay_;
  std::vector<double> weights_;
  std::vector<std::size_t> delays_;
  std::vector<std::size_t> counters_;
  std::vector<std::vector<std::uint8_t>> history_;
  double tau_u_;
  State state_;
};

using ReferenceLifState = ReferenceNeuron::State;
ReferenceLifState reference_lif_step(ReferenceNeuron& neuron, const std::vector<std::uint8_t>& spikes);

struct ReferenceStdpState {
  std::vector<double> dt_pre;  // steps since each presynaptic spike
  double dt_post = 0.0;        // steps since the postsynaptic spike
  double tau = 4.0;
  double a_plus = 1.0;
  double a_minus = -1.0;
};

/// Exact pairwise update: A- e^(-dt_post/tau) on a presynaptic spike plus
/// A+ e^(-dt_pre/tau) on a postsynaptic spike.
std::vector<double> reference_stdp_update(const ReferenceStdpState& state, const std::vector<std::uint8_t>& pre,
                                          bool post);

// ---------------------------------------------------------------------------
// Quantization study

/// b-bit alpha_u table aligned to a datapath of `datapath_bits`.
std::vector<std::uint32_t> aligned_lut(double tau_u, std::size_t L_f, unsigned entry_bits, unsigned datapath_bits);

struct RmseStudy {
  std::size_t neurons = 10;
  std::size_t j = 8;
  unsigned datapath_bits = 9;
  std::size_t L_f = 32;
  double tau_u = 4.0;
  double tau_v = 8.0;
  std::size_t steps = 400;
  double input_rate = 0.3;
  std::uint64_t seed = 20230611;
  std::vector<unsigned> entry_bits{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
};

struct RmsePoint {
  unsigned bits = 0;
  double rmse = 0.0;
};

/// Membrane RMSE of the quantized pipeline against the double reference,
/// one point per LUT entry width, on a seeded random network.
std::vector<RmsePoint> rmse_analysis(const RmseStudy& study);
/// The seeded test network used by rmse_analysis.
std::vector<NeuronParams> rmse_network(const RmseStudy& study);

}  // namespace cramsnn

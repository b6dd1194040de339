#pragma once

#include <cstdint>
#include <vector>

#include "cramsnn/lif.hpp"

namespace cramsnn {

/// Quantized STDP trace F(dt) at precision P from the shared alpha_u table.
/// Zero outside the window dt < min(L_f, t_max).
std::uint64_t stdp_trace(const std::vector<std::uint32_t>& lut, std::uint32_t dt, const NeuronParams& p);
/// Scale constant applied in-array when FScale::InverseTau is selected.
std::uint64_t stdp_inverse_tau_constant(const NeuronParams& p);

/// Pairwise STDP engine sharing a neuron's array. Weights are held in a
/// P-bit accumulator per synapse; the S-bit weight rows mirror its top bits.
class StdpEngine {
 public:
  explicit StdpEngine(Neuron& neuron);

  /// Runs after spike distribution: updates the dt counters from the spikes
  /// in history row 0 and the output spike row, then applies Delta-omega.
  void update();

  // Individual stages, exposed for testing.
  void reset_or_increment_dt();
  Scratch lookup_F(const Word& dt, const ColumnMask& mask);
  void apply_weight_update();

  std::uint32_t dt_pre(std::size_t k) const;
  std::uint32_t dt_post() const;
  std::uint32_t accumulator(std::size_t k) const;
  unsigned precision() const noexcept { return precision_; }
  const CostLedger& init_ledger() const noexcept { return init_ledger_; }

 private:
  void apply(std::int32_t a, const Word& magnitude, const Word& dt, const ColumnMask& mask);
  std::vector<std::uint64_t> read_values(const Word& rows, const ColumnMask& mask);

  Neuron& neuron_;
  Alu& alu_;
  unsigned precision_;
  unsigned counter_bits_;
  Word dt_pre_;
  Word dt_post_;
  Word dt_post_all_;
  Word limit_;
  Word accumulator_;
  Word a_plus_;
  Word a_minus_;
  Word scale_;
  CostLedger init_ledger_;
};

}  // namespace cramsnn

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cramsnn/alu.hpp"
#include "cramsnn/device.hpp"
#include "cramsnn/prng.hpp"

namespace cramsnn {

inline constexpr std::size_t kMinArraySize = 256;
inline constexpr std::size_t kMaxArraySize = 2048;

/// Leak convention of the membrane update v' = decay * v + u - theta * sigma.
enum class DecayMode {
  Leaky,    // decay = 1 - 1/tau_v
  Literal,  // decay = 1/tau_v
};

/// How STDP scales values fetched from the shared alpha_u lookup table.
enum class FScale {
  Tau,         // F = tau_u * alpha_u; the normalized table already holds F
  InverseTau,  // fetched value multiplied by 1/tau_u in the array
};

struct StdpParams {
  bool enabled = false;
  std::int32_t a_plus = 256;
  std::int32_t a_minus = -128;
  std::uint32_t t_max = 31;
  unsigned precision = 10;
  FScale f_scale = FScale::Tau;

  /// Internal width: at least the weight width S.
  unsigned width(unsigned weight_bits) const { return precision < weight_bits ? weight_bits : precision; }
  /// Bits needed to hold t_max.
  unsigned counter_bits() const;
  void validate(unsigned weight_bits) const;
};

/// Parameters of one neuron and its j presynaptic connections. All
/// quantities are unsigned S-bit fixed-point integers unless noted.
struct NeuronParams {
  std::size_t j = 1;
  unsigned S = 4;
  std::size_t L_f = 32;
  double tau_u = 4.0;
  double tau_v = 2.0;
  std::uint32_t theta = 1;
  std::uint32_t bias = 0;
  std::vector<std::uint32_t> weights;  // size j
  std::vector<std::uint32_t> delays;   // size j, each in [1, 2^S - 1]
  DecayMode decay = DecayMode::Leaky;
  bool noise_current = false;
  bool noise_membrane = false;
  LfsrConfig lfsr;
  StdpParams stdp;
  CopyMode copy_mode = CopyMode::ReadWrite;

  void validate() const;
  std::uint32_t max_value() const { return (std::uint32_t{1} << S) - 1; }
  /// Decay constant quantized to S bits.
  std::uint32_t decay_constant() const;
};

/// Network-wide hyperparameters plus per-neuron tables.
struct SnnConfig {
  std::size_t N = 1;
  std::size_t j = 1;
  unsigned S = 4;
  std::size_t L_f = 32;
  double tau_u = 4.0;
  double tau_v = 2.0;
  std::vector<std::uint32_t> theta;               // size N
  std::vector<std::uint32_t> bias;                // size N
  std::vector<std::vector<std::uint32_t>> weights;  // N x j
  std::vector<std::vector<std::uint32_t>> delays;   // N x j
  std::vector<std::vector<std::size_t>> presynaptic;  // N x j source ids; empty = default lists
  DecayMode decay = DecayMode::Leaky;
  bool noise_current = false;
  bool noise_membrane = false;
  LfsrConfig lfsr;
  StdpParams stdp;
  CopyMode copy_mode = CopyMode::ReadWrite;

  void validate() const;
  NeuronParams neuron(std::size_t i) const;
};

// ---------------------------------------------------------------------------
// Layout

struct LayoutPlan {
  std::size_t array_size = 0;   // D for a D x D array
  std::size_t static_rows = 0;  // S * (L_f + 4)
  double utilization = 0.0;     // percent
};

/// Smallest power-of-two array (at least 256) whose static footprint stays
/// within 9/16 of the rows.
LayoutPlan plan_layout(unsigned S, std::size_t L_f);

/// Region map binding model quantities to rows. Static regions: alpha_u LUT,
/// weights, delays, delay counters, packed constants (theta in column 0,
/// bias in column 1, decay in column 2).
struct NeuronLayout {
  std::vector<Word> lut;  // L_f entries, S rows each
  Word weights;
  Word delays;
  Word counters;
  Word constants;
  // Dynamic state
  Word history;  // L_f rows; row s holds spikes from s steps ago
  Word membrane;
  RowIndex spike = 0;

  std::size_t static_rows() const;
};

/// alpha_u LUT scaled so entry[0] = 2^S - 1: round((2^S - 1) e^(-s/tau_u)).
std::vector<std::uint32_t> quantize_alpha_lut(double tau_u, std::size_t L_f, unsigned S);

/// ceil(log2(n)) for n >= 1.
unsigned ceil_log2(std::uint64_t n);
std::uint64_t next_power_of_two(std::uint64_t n);

// ---------------------------------------------------------------------------
// Neuron engine

/// One neuron mapped onto one CRAM array; synapse k lives in column k and the
/// neuron-level datapath in column 0.
class Neuron {
 public:
  Neuron(NeuronParams params, const DeviceProfile& profile, std::optional<std::vector<std::uint32_t>> lut = {});
  Neuron(const Neuron&) = delete;
  Neuron& operator=(const Neuron&) = delete;

  /// Full feedforward step: delay gate, spike write, Steps 1-7. Returns the new spike.
  bool timestep(const std::vector<std::uint8_t>& spikes);

  // Individual stages, exposed for testing.
  ColumnMask delay_gate();
  void write_spikes(const std::vector<std::uint8_t>& spikes);
  Scratch step_filter(const ColumnMask& enabled);
  Scratch step_weight_mul(Scratch filtered, const ColumnMask& enabled);
  Scratch step_reduce(Scratch products);
  Scratch step_bias_noise(Scratch reduced);
  void step_membrane(Scratch current);
  bool step_threshold_spike();

  // Uncharged state inspection.
  std::uint32_t membrane() const;
  bool spike() const;
  std::uint32_t weight(std::size_t k) const;
  std::uint32_t delay(std::size_t k) const;
  std::uint32_t counter(std::size_t k) const;
  std::uint32_t lut_entry(std::size_t s) const;
  bool history_bit(std::size_t k, std::size_t s) const;
  std::uint32_t last_current() const noexcept { return last_current_; }

  void set_weight_rows(const Word& src, const ColumnMask& mask);

  const NeuronParams& params() const noexcept { return params_; }
  const NeuronLayout& layout() const noexcept { return layout_; }
  const LayoutPlan& plan() const noexcept { return plan_; }
  CramArray& array() noexcept { return array_; }
  const CramArray& array() const noexcept { return array_; }
  Alu& alu() noexcept { return *alu_; }
  Lfsr* lfsr() noexcept { return lfsr_.get(); }
  const CostLedger& init_ledger() const noexcept { return init_ledger_; }
  ColumnMask synapse_mask() const { return array_.columns(0, params_.j); }
  ColumnMask neuron_mask() const { return array_.columns(0, 1); }

 private:
  Scratch fetch_constant(std::size_t column);

  NeuronParams params_;
  LayoutPlan plan_;
  CramArray array_;
  RowPool pool_;
  std::unique_ptr<Alu> alu_;
  std::unique_ptr<Lfsr> lfsr_;
  NeuronLayout layout_;
  CostLedger init_ledger_;
  std::uint32_t last_current_ = 0;
};

}  // namespace cramsnn

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cramsnn/bitvector.hpp"

namespace cramsnn {

using RowIndex = std::size_t;

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

enum class GateKind : std::uint8_t { Nand, And, Not, Inv12, Maj3, Maj5, Copy };
inline constexpr std::size_t kGateKindCount = 7;
inline constexpr std::array<GateKind, kGateKindCount> kAllGateKinds = {
    GateKind::Nand, GateKind::And, GateKind::Not, GateKind::Inv12,
    GateKind::Maj3, GateKind::Maj5, GateKind::Copy};

/// Static description of a gate. Every CRAM gate follows the same switching
/// rule: the output cell(s) start at `preset` and flip iff the number of
/// logic-1 (high resistance) inputs is at most `flip_max_ones`.
struct GateInfo {
  std::string_view name;
  std::size_t arity;
  std::size_t outputs;
  bool preset;
  std::size_t flip_max_ones;
};

const GateInfo& gate_info(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);

/// Declared truth table. `inputs` holds one bit per input (0 or 1).
bool truth_table(GateKind kind, std::span<const std::uint8_t> inputs);

// ---------------------------------------------------------------------------
// Device profile
// ---------------------------------------------------------------------------

struct EnergyTime {
  double energy = 0.0;  // J
  double time = 0.0;    // s
};

struct DeviceProfile {
  std::string name;
  double r_parallel = 0.0;      // ohm, logic 0
  double r_antiparallel = 0.0;  // ohm, logic 1
  double t_switch = 0.0;        // s
  double i_switch = 0.0;        // A
  double i_preset_limit = 0.0;  // A, bulk preset budget
  std::array<double, kGateKindCount> gate_voltage{};  // V, indexed by GateKind
  double preset_voltage = 0.0;                       // V
  EnergyTime read_cost;   // energy per cell, time per row event
  EnergyTime write_cost;  // energy per cell, time per row event
  double calibration_energy_scale = 1.0;
  double calibration_time_scale = 1.0;
  /// Array-controller line driving, charged once per neuron timestep or STDP update.
  EnergyTime controller_overhead;

  double voltage(GateKind kind) const { return gate_voltage[static_cast<std::size_t>(kind)]; }
  /// Columns a single preset slot can drive: floor(i_preset_limit / i_switch).
  std::uint64_t preset_batch() const;
  void validate() const;

  static DeviceProfile builtin(std::string_view name);
  static std::vector<std::string> builtin_names();
};

/// Series resistance of the gate's current path for `ones` logic-1 inputs.
double gate_path_resistance(GateKind kind, std::size_t ones, const DeviceProfile& profile);

/// Per-gate voltage placing the switching threshold midway between the last
/// flipping and the first non-flipping input population.
double default_gate_voltage(GateKind kind, const DeviceProfile& profile);
void assign_default_voltages(DeviceProfile& profile);

/// Physical validation path: evaluates the equivalent resistive network for
/// `inputs` and returns the post-gate output state.
bool resistive_switch_decision(GateKind kind, std::span<const std::uint8_t> inputs,
                               const DeviceProfile& profile);

// ---------------------------------------------------------------------------
// Cost ledger
// ---------------------------------------------------------------------------

enum class CostClass : std::uint8_t {
  Preset,
  Nand,
  And,
  Not,
  Inv12,
  Maj3,
  Maj5,
  Copy,
  Read,
  Write,
  Routing,
  Controller,
};
inline constexpr std::size_t kCostClassCount = 12;

std::string_view cost_class_name(CostClass cls);
CostClass cost_class_for(GateKind kind);

struct CostEntry {
  std::uint64_t events = 0;
  std::uint64_t cells = 0;
  double energy = 0.0;
  double time = 0.0;

  CostEntry& operator+=(const CostEntry& o) {
    events += o.events;
    cells += o.cells;
    energy += o.energy;
    time += o.time;
    return *this;
  }
  friend bool operator==(const CostEntry&, const CostEntry&) = default;
};

class CostLedger {
 public:
  void charge(CostClass cls, std::uint64_t events, std::uint64_t cells, double energy, double time);
  const CostEntry& entry(CostClass cls) const { return entries_[static_cast<std::size_t>(cls)]; }
  std::uint64_t gate_events(GateKind kind) const { return entry(cost_class_for(kind)).events; }
  std::uint64_t total_gate_events() const;

  double total_energy() const;
  double total_time() const;
  bool empty() const;

  CostLedger& merge(const CostLedger& other);
  friend CostLedger operator+(CostLedger a, const CostLedger& b) { return a.merge(b); }
  friend bool operator==(const CostLedger&, const CostLedger&) = default;

  /// Difference against an earlier snapshot of the same ledger.
  CostLedger since(const CostLedger& earlier) const;
  void reset() { entries_ = {}; }

 private:
  std::array<CostEntry, kCostClassCount> entries_{};
};

// ---------------------------------------------------------------------------
// CRAM array
// ---------------------------------------------------------------------------

/// Binary MTJ cell grid with memory-mode access and column-parallel logic.
/// Row indices are logical; the even/odd bitline interleaving is not modeled.
class CramArray {
 public:
  CramArray(std::size_t rows, std::size_t cols, DeviceProfile profile);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const DeviceProfile& profile() const noexcept { return profile_; }
  CostLedger& ledger() noexcept { return ledger_; }
  const CostLedger& ledger() const noexcept { return ledger_; }

  ColumnMask all_columns() const { return ColumnMask(cols_, true); }
  ColumnMask columns(std::size_t first, std::size_t count) const {
    return ColumnMask::range(cols_, first, count);
  }

  void preset(RowIndex row, const ColumnMask& mask, bool value);
  void apply_gate(GateKind kind, std::span<const RowIndex> inputs, std::span<const RowIndex> outputs,
                  const ColumnMask& mask);
  void apply_gate(GateKind kind, std::initializer_list<RowIndex> inputs, RowIndex output,
                  const ColumnMask& mask);

  /// Memory-mode read; returns a full-width vector with unmasked bits clear.
  BitVector read_row(RowIndex row, const ColumnMask& mask);
  /// Memory-mode write of the masked bits of `bits`.
  void write_row(RowIndex row, const ColumnMask& mask, const BitVector& bits);
  /// Fixed controller overhead of one array-level operation.
  void charge_controller();

  /// Uncharged inspection for tests and debugging.
  bool peek(RowIndex row, std::size_t col) const { return cells_.at(row).test(col); }
  const BitVector& peek_row(RowIndex row) const { return cells_.at(row); }

 private:
  void check_row(RowIndex row) const;
  void check_mask(const ColumnMask& mask) const;
  double scaled_energy(double e) const { return e * profile_.calibration_energy_scale; }
  double scaled_time(double t) const { return t * profile_.calibration_time_scale; }

  std::size_t rows_;
  std::size_t cols_;
  DeviceProfile profile_;
  std::vector<BitVector> cells_;
  std::vector<BitVector> armed_;  // preset and not yet consumed by a gate
  CostLedger ledger_;
};

bool is_power_of_two(std::uint64_t v);

}  // namespace cramsnn

#include "cramsnn/device.hpp"

#include <algorithm>
#include <cmath>

#include "cramsnn/error.hpp"

namespace cramsnn {

void CramArray::charge_controller() {
  const auto& o = profile_.controller_overhead;
  ledger_.charge(CostClass::Controller, 1, 0, scaled_energy(o.energy), scaled_time(o.time));
}

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// ---------------------------------------------------------------------------
// Gates

namespace {

// name, arity, outputs, preset, flip_max_ones
constexpr std::array<GateInfo, kGateKindCount> kGateTable = {{
    {"NAND", 2, 1, false, 1},
    {"AND", 2, 1, true, 1},
    {"NOT", 1, 1, false, 0},
    {"INV1-2", 1, 2, false, 0},
    {"MAJ3", 3, 1, true, 1},
    {"MAJ5", 5, 1, true, 2},
    {"BUFFER-COPY", 1, 1, true, 0},
}};

std::uint64_t maj3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return (a & b) | (a & c) | (b & c);
}

std::uint64_t maj5(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d,
                   std::uint64_t e) {
  // Bit-sliced population count of five inputs, then test count >= 3.
  const std::uint64_t s1 = a ^ b ^ c;
  const std::uint64_t c1 = maj3(a, b, c);
  const std::uint64_t s2 = s1 ^ d ^ e;
  const std::uint64_t c2 = maj3(s1, d, e);
  // count = s2 + 2 * (c1 + c2)
  const std::uint64_t twos = c1 & c2;   // contributes 4
  const std::uint64_t one2 = c1 ^ c2;   // contributes 2
  return twos | (one2 & s2);
}

}  // namespace

const GateInfo& gate_info(GateKind kind) { return kGateTable[static_cast<std::size_t>(kind)]; }

GateKind gate_kind_from_name(std::string_view name) {
  for (auto kind : kAllGateKinds)
    if (gate_info(kind).name == name) return kind;
  if (name == "COPY") return GateKind::Copy;
  if (name == "INV12") return GateKind::Inv12;
  fail(ErrorKind::Config, "unknown gate kind: " + std::string(name));
}

bool truth_table(GateKind kind, std::span<const std::uint8_t> inputs) {
  const auto& info = gate_info(kind);
  require(inputs.size() == info.arity, ErrorKind::InvalidArgument, "wrong gate arity");
  std::size_t ones = 0;
  for (auto b : inputs) ones += b != 0 ? 1 : 0;
  switch (kind) {
    case GateKind::Nand: return ones != 2;
    case GateKind::And: return ones == 2;
    case GateKind::Not:
    case GateKind::Inv12: return ones == 0;
    case GateKind::Maj3: return ones >= 2;
    case GateKind::Maj5: return ones >= 3;
    case GateKind::Copy: return ones == 1;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Resistive network

double gate_path_resistance(GateKind kind, std::size_t ones, const DeviceProfile& p) {
  const auto& info = gate_info(kind);
  require(ones <= info.arity, ErrorKind::InvalidArgument, "more logic-1 inputs than gate arity");
  const double zeros = static_cast<double>(info.arity - ones);
  const double conductance = static_cast<double>(ones) / p.r_antiparallel + zeros / p.r_parallel;
  const double r_inputs = 1.0 / conductance;
  const double r_output = info.preset ? p.r_antiparallel : p.r_parallel;
  return r_inputs + static_cast<double>(info.outputs) * r_output;
}

double default_gate_voltage(GateKind kind, const DeviceProfile& p) {
  const auto& info = gate_info(kind);
  const double r_flip = gate_path_resistance(kind, info.flip_max_ones, p);
  const double r_hold = gate_path_resistance(kind, info.flip_max_ones + 1, p);
  return p.i_switch * 0.5 * (r_flip + r_hold);
}

void assign_default_voltages(DeviceProfile& p) {
  for (auto kind : kAllGateKinds) p.gate_voltage[static_cast<std::size_t>(kind)] = default_gate_voltage(kind, p);
  p.preset_voltage = p.i_switch * p.r_antiparallel;
}

bool resistive_switch_decision(GateKind kind, std::span<const std::uint8_t> inputs,
                               const DeviceProfile& p) {
  const auto& info = gate_info(kind);
  require(inputs.size() == info.arity, ErrorKind::InvalidArgument, "wrong gate arity");
  const double v = p.voltage(kind);
  require(v > 0.0, ErrorKind::Config, "profile lacks a voltage for this gate kind");
  std::size_t ones = 0;
  for (auto b : inputs) ones += b != 0 ? 1 : 0;
  const double current = v / gate_path_resistance(kind, ones, p);
  const bool flips = current >= p.i_switch;
  return flips ? !info.preset : info.preset;
}

// ---------------------------------------------------------------------------
// Device profile

std::uint64_t DeviceProfile::preset_batch() const {
  // Guard against 0.03 / 3e-6 landing a hair below an integer.
  const double ratio = i_preset_limit / i_switch;
  return static_cast<std::uint64_t>(std::floor(ratio * (1.0 + 1e-12)));
}

void DeviceProfile::validate() const {
  require(r_parallel > 0.0, ErrorKind::Config, "r_parallel must be positive");
  require(r_antiparallel > r_parallel, ErrorKind::Config, "r_antiparallel must exceed r_parallel");
  require(t_switch > 0.0 && i_switch > 0.0, ErrorKind::Config, "switching time and current must be positive");
  require(i_preset_limit >= i_switch, ErrorKind::Config, "preset current limit below switching current");
  require(preset_voltage > 0.0, ErrorKind::Config, "preset voltage must be positive");
  for (double v : gate_voltage) require(v > 0.0, ErrorKind::Config, "gate voltages must be positive");
  require(read_cost.energy >= 0.0 && read_cost.time > 0.0, ErrorKind::Config, "invalid read cost");
  require(write_cost.energy >= 0.0 && write_cost.time > 0.0, ErrorKind::Config, "invalid write cost");
  require(calibration_energy_scale > 0.0 && calibration_time_scale > 0.0, ErrorKind::Config,
          "calibration scales must be positive");
  require(controller_overhead.energy >= 0.0 && controller_overhead.time >= 0.0, ErrorKind::Config,
          "controller overhead must be non-negative");
}

namespace {

// Shipped calibration from calibrate("SHE-F") in costs.hpp: energy against the
// single-spike target (the STDP target needs no adder), time against the
// single-spike and network targets. Shared by all four technologies.
constexpr double kEnergyScale = 0.33883778290782157;
constexpr double kTimeScale = 0.4712173913043497;
constexpr double kControllerEnergy = 0.0;
constexpr double kControllerTime = 4.202842775419765e-07;

DeviceProfile make_profile(std::string name, double rp, double rap, double t, double i, bool she) {
  DeviceProfile p;
  p.name = std::move(name);
  p.r_parallel = rp;
  p.r_antiparallel = rap;
  p.t_switch = t;
  p.i_switch = i;
  p.i_preset_limit = 30e-3;
  assign_default_voltages(p);
  const double write_energy = i * i * rap * t;
  p.write_cost = {write_energy, t};
  // SHE separates the read path from the switching path.
  p.read_cost = she ? EnergyTime{0.02 * write_energy, 0.5 * t} : EnergyTime{0.1 * write_energy, t};
  p.calibration_energy_scale = kEnergyScale;
  p.calibration_time_scale = kTimeScale;
  p.controller_overhead = {kControllerEnergy, kControllerTime};
  return p;
}

}  // namespace

DeviceProfile DeviceProfile::builtin(std::string_view name) {
  if (name == "STT-M") return make_profile("STT-M", 3.15e3, 7.34e3, 3e-9, 40e-6, false);
  if (name == "SHE-M") return make_profile("SHE-M", 3.15e3, 7.34e3, 3e-9, 40e-6, true);
  if (name == "STT-F") return make_profile("STT-F", 7.34e3, 76.39e3, 1e-9, 3e-6, false);
  if (name == "SHE-F") return make_profile("SHE-F", 7.34e3, 76.39e3, 1e-9, 3e-6, true);
  fail(ErrorKind::Config, "unknown device profile: " + std::string(name));
}

std::vector<std::string> DeviceProfile::builtin_names() { return {"STT-M", "STT-F", "SHE-M", "SHE-F"}; }

// ---------------------------------------------------------------------------
// Cost ledger

namespace {
constexpr std::array<std::string_view, kCostClassCount> kCostClassNames = {
    "preset", "nand", "and", "not", "inv1-2", "maj3", "maj5", "copy", "read", "write", "routing", "controller"};
}

std::string_view cost_class_name(CostClass cls) { return kCostClassNames[static_cast<std::size_t>(cls)]; }

CostClass cost_class_for(GateKind kind) {
  switch (kind) {
    case GateKind::Nand: return CostClass::Nand;
    case GateKind::And: return CostClass::And;
    case GateKind::Not: return CostClass::Not;
    case GateKind::Inv12: return CostClass::Inv12;
    case GateKind::Maj3: return CostClass::Maj3;
    case GateKind::Maj5: return CostClass::Maj5;
    case GateKind::Copy: return CostClass::Copy;
  }
  return CostClass::Nand;
}

void CostLedger::charge(CostClass cls, std::uint64_t events, std::uint64_t cells, double energy,
                        double time) {
  require(energy >= 0.0 && time >= 0.0, ErrorKind::Invariant, "negative cost charged");
  entries_[static_cast<std::size_t>(cls)] += CostEntry{events, cells, energy, time};
}

std::uint64_t CostLedger::total_gate_events() const {
  std::uint64_t n = 0;
  for (auto kind : kAllGateKinds) n += gate_events(kind);
  return n;
}

double CostLedger::total_energy() const {
  double e = 0.0;
  for (const auto& entry : entries_) e += entry.energy;
  return e;
}

double CostLedger::total_time() const {
  double t = 0.0;
  for (const auto& entry : entries_) t += entry.time;
  return t;
}

bool CostLedger::empty() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const CostEntry& e) { return e.events == 0; });
}

CostLedger& CostLedger::merge(const CostLedger& other) {
  for (std::size_t i = 0; i < kCostClassCount; ++i) entries_[i] += other.entries_[i];
  return *this;
}

CostLedger CostLedger::since(const CostLedger& earlier) const {
  CostLedger d;
  for (std::size_t i = 0; i < kCostClassCount; ++i) {
    const auto& now = entries_[i];
    const auto& then = earlier.entries_[i];
    d.entries_[i] = {now.events - then.events, now.cells - then.cells,
                     std::max(0.0, now.energy - then.energy), std::max(0.0, now.time - then.time)};
  }
  return d;
}

// ---------------------------------------------------------------------------
// CRAM array

CramArray::CramArray(std::size_t rows, std::size_t cols, DeviceProfile profile)
    : rows_(rows), cols_(cols), profile_(std::move(profile)) {
  require(is_power_of_two(rows) && is_power_of_two(cols), ErrorKind::InvalidArgument,
          "CRAM array dimensions must be powers of two");
  profile_.validate();
  cells_.assign(rows, BitVector(cols));
  armed_.assign(rows, BitVector(cols));
}

void CramArray::check_row(RowIndex row) const {
  require(row < rows_, ErrorKind::OutOfRange, "row index out of range");
}

void CramArray::check_mask(const ColumnMask& mask) const {
  require(mask.size() == cols_, ErrorKind::InvalidArgument, "column mask width mismatch");
}

void CramArray::preset(RowIndex row, const ColumnMask& mask, bool value) {
  check_row(row);
  check_mask(mask);
  const std::uint64_t cells = mask.count();
  require(cells > 0, ErrorKind::InvalidArgument, "preset with empty column mask");
  auto& r = cells_[row];
  if (value)
    r |= mask;
  else
    r &= ~mask;
  armed_[row] |= mask;

  const std::uint64_t batch = profile_.preset_batch();
  const std::uint64_t slots = (cells + batch - 1) / batch;
  const auto& p = profile_;
  const double energy = p.preset_voltage * p.i_switch * p.t_switch * static_cast<double>(cells);
  const double time = p.t_switch * static_cast<double>(slots);
  ledger_.charge(CostClass::Preset, slots, cells, scaled_energy(energy), scaled_time(time));
}

void CramArray::apply_gate(GateKind kind, std::initializer_list<RowIndex> inputs, RowIndex output,
                           const ColumnMask& mask) {
  const RowIndex out[1] = {output};
  apply_gate(kind, std::span<const RowIndex>(inputs.begin(), inputs.size()), out, mask);
}

void CramArray::apply_gate(GateKind kind, std::span<const RowIndex> inputs,
                           std::span<const RowIndex> outputs, const ColumnMask& mask) {
  const auto& info = gate_info(kind);
  check_mask(mask);
  require(inputs.size() == info.arity, ErrorKind::Device, "wrong number of gate inputs");
  require(outputs.size() == info.outputs, ErrorKind::Device, "wrong number of gate outputs");
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    check_row(inputs[k]);
    for (std::size_t m = 0; m < k; ++m)
      require(inputs[m] != inputs[k], ErrorKind::Device, "gate input rows must be distinct");
  }
  for (auto o : outputs) {
    check_row(o);
    require(std::find(inputs.begin(), inputs.end(), o) == inputs.end(), ErrorKind::Device,
            "gate output row collides with an input row");
    require(mask.is_subset_of(armed_[o]), ErrorKind::Device, "gate output cell was not preset");
    const BitVector preset_bits = cells_[o] & mask;
    require(info.preset ? preset_bits == mask : preset_bits.none(), ErrorKind::Device,
            "gate output preset to the wrong value");
  }
  if (outputs.size() == 2)
    require(outputs[0] != outputs[1], ErrorKind::Device, "duplicate gate output rows");

  const std::size_t words = mask.words().size();
  for (std::size_t w = 0; w < words; ++w) {
    auto in = [&](std::size_t k) { return cells_[inputs[k]].words()[w]; };
    std::uint64_t res = 0;
    switch (kind) {
      case GateKind::Nand: res = ~(in(0) & in(1)); break;
      case GateKind::And: res = in(0) & in(1); break;
      case GateKind::Not:
      case GateKind::Inv12: res = ~in(0); break;
      case GateKind::Maj3: res = maj3(in(0), in(1), in(2)); break;
      case GateKind::Maj5: res = maj5(in(0), in(1), in(2), in(3), in(4)); break;
      case GateKind::Copy: res = in(0); break;
    }
    const std::uint64_t m = mask.words()[w];
    for (auto o : outputs) {
      auto& word = cells_[o].words()[w];
      word = (word & ~m) | (res & m);
    }
  }
  for (auto o : outputs) armed_[o] &= ~mask;

  const auto cells = mask.count();
  const auto& p = profile_;
  const double energy = p.voltage(kind) * p.i_switch * p.t_switch * static_cast<double>(cells);
  const double time = p.t_switch;
  ledger_.charge(cost_class_for(kind), 1, cells, scaled_energy(energy), scaled_time(time));
}

BitVector CramArray::read_row(RowIndex row, const ColumnMask& mask) {
  check_row(row);
  check_mask(mask);
  const auto cells = mask.count();
  const auto& p = profile_;
  ledger_.charge(CostClass::Read, 1, cells,
                 scaled_energy(p.read_cost.energy * static_cast<double>(cells)),
                 scaled_time(p.read_cost.time));
  return cells_[row] & mask;
}

void CramArray::write_row(RowIndex row, const ColumnMask& mask, const BitVector& bits) {
  check_row(row);
  check_mask(mask);
  require(bits.size() == cols_, ErrorKind::InvalidArgument, "write data width mismatch");
  auto& r = cells_[row];
  r = (r & ~mask) | (bits & mask);
  armed_[row] &= ~mask;
  const auto cells = mask.count();
  const auto& p = profile_;
  ledger_.charge(CostClass::Write, 1, cells,
                 scaled_energy(p.write_cost.energy * static_cast<double>(cells)),
                 scaled_time(p.write_cost.time));
}

}  // namespace cramsnn

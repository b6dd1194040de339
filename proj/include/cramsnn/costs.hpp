#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "cramsnn/device.hpp"

namespace cramsnn {

/// Per-event figures of the digital neuromorphic baseline (Loihi).
struct LoihiBaseline {
  static constexpr double spike_energy = 23.6e-12;
  static constexpr double spike_time = 3.5e-9;
  static constexpr double stdp_energy = 120e-12;
  static constexpr double stdp_time = 6.1e-9;
};

struct SpikeMetrics {
  double energy = 0.0;
  double time = 0.0;
  double edp = 0.0;
};

SpikeMetrics per_spike_metrics(const CostLedger& ledger);
SpikeMetrics make_metrics(double energy, double time);

enum class BreakdownClass : std::uint8_t { Preset, Addition, Multiplication, Comparison, ReadWrite, Routing, Other };
inline constexpr std::size_t kBreakdownClassCount = 7;
std::string_view breakdown_class_name(BreakdownClass cls);
BreakdownClass breakdown_class_for(CostClass cls);

struct Breakdown {
  std::array<double, kBreakdownClassCount> energy{};
  std::array<double, kBreakdownClassCount> fraction{};
  double of(BreakdownClass cls) const { return fraction[static_cast<std::size_t>(cls)]; }
};

/// Energy fractions by operation group. Throws on an empty ledger.
Breakdown breakdown_report(const CostLedger& ledger);

/// Closed-form routing cost for N arrays receiving j spikes each:
/// ceil(log2 N) stages, each moving every array's train once.
CostLedger routing_cost(double N, std::size_t j, const DeviceProfile& profile);

struct MetricsReport {
  double compute_time = 0.0;
  double routing_time = 0.0;
  double execution_time = 0.0;
  double max_spiking_rate = 0.0;
  double compute_energy = 0.0;
  double routing_energy = 0.0;
  double energy = 0.0;
  double edp = 0.0;
  Breakdown breakdown;
};

/// N arrays stepping in parallel: N x per-array energy plus routing;
/// per-array time plus the routing stages.
MetricsReport aggregate_report(const CostLedger& array_ledger, double N, std::size_t j, const DeviceProfile& profile);

struct RatioReport {
  double spike_energy = 0.0;
  double spike_time = 0.0;
  double spike_edp = 0.0;
  double stdp_energy = 0.0;
  double stdp_time = 0.0;
  double stdp_edp = 0.0;
};

/// Baseline over measured, so values above 1 favor the CRAM design.
RatioReport ratio_report(const SpikeMetrics& spike, const SpikeMetrics& stdp);

// ---------------------------------------------------------------------------
// Reference workloads and calibration

/// Ledger of one feedforward timestep after initialization, every
/// presynaptic input spiking, unit delays.
CostLedger measure_spike_workload(const DeviceProfile& profile, unsigned S, std::size_t L_f, std::size_t j);
/// Ledger of one STDP update driven by a single postsynaptic spike.
CostLedger measure_stdp_workload(const DeviceProfile& profile, unsigned S, std::size_t L_f, std::size_t j,
                                 unsigned precision = 10);

struct CalibrationTargets {
  double spike_energy = 143.81e-15;
  double spike_time = 499.86e-9;
  double stdp_energy = 0.33e-12;
  double network_time = 0.825e-6;
  double network_N = 1e9;
  std::size_t network_j = 1024;
  std::size_t network_L_f = 64;
  std::size_t spike_L_f = 32;
  unsigned S = 1;
  unsigned stdp_precision = 10;
};

struct CalibrationResult {
  double energy_scale = 1.0;
  double time_scale = 1.0;
  EnergyTime controller_overhead;
};

/// Fits E = es (E_raw + e_c n) and T = ts (T_raw + t_c n), n the number of
/// array operations in the workload, on the uncalibrated profile. Energy uses
/// the spike and STDP targets; time the spike and network targets.
CalibrationResult calibrate(std::string_view profile_name, const CalibrationTargets& targets = {});
/// Profile with calibration removed.
DeviceProfile uncalibrated(DeviceProfile profile);
DeviceProfile apply_calibration(DeviceProfile profile, const CalibrationResult& cal);

}  // namespace cramsnn

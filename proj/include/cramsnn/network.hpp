#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <functional>
#include <random>
#include <vector>

#include "cramsnn/config.hpp"
#include "cramsnn/fabric.hpp"
#include "cramsnn/lif.hpp"
#include "cramsnn/stdp.hpp"

namespace cramsnn {

struct StepRecord {
  std::vector<std::uint8_t> spikes;
  std::vector<std::uint32_t> membrane;
  std::vector<std::uint32_t> current;
};

/// N gate-level neurons, one array each, connected over the GDBG fabric.
/// A timestep computes every array, optionally runs STDP, then routes the
/// new spikes for the next step.
class Network {
 public:
  Network(const ExperimentConfig& cfg, const DeviceProfile& profile, bool learning, unsigned threads = 1);

  StepRecord step();

  std::size_t size() const noexcept { return neurons_.size(); }
  const Neuron& neuron(std::size_t i) const { return *neurons_.at(i); }
  const std::optional<RoutingProgram>& program() const noexcept { return program_; }
  std::vector<std::vector<std::uint32_t>> weights() const;
  /// Compute and learning cost across all arrays, excluding initialization.
  CostLedger compute_ledger() const;
  const CostLedger& routing_ledger() const noexcept { return routing_; }
  CostLedger init_ledger() const;

 private:
  std::vector<std::uint8_t> external_inputs(std::size_t i);

  ExperimentConfig cfg_;
  DeviceProfile profile_;
  bool learning_;
  unsigned threads_;
  std::vector<std::unique_ptr<Neuron>> neurons_;
  std::vector<std::unique_ptr<StdpEngine>> engines_;
  std::optional<GdbgTopology> topo_;
  std::optional<RoutingProgram> program_;
  std::vector<SpikeBuffer> delivered_;
  CostLedger routing_;
  std::vector<std::mt19937_64> input_rng_;
};

/// Default presynaptic lists: the fabric's delivered order with all
/// indicators clear.
std::vector<std::vector<std::size_t>> default_presynaptic(std::size_t N, std::size_t j);

/// Runs fn(i) for i in [0, n) over `threads` workers. Each index is handled
/// by exactly one worker, so results do not depend on the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace cramsnn

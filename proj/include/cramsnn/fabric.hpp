#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "cramsnn/device.hpp"

namespace cramsnn {

/// Generalized De Bruijn graph: node i drives 2i mod N and 2i+1 mod N.
struct GdbgTopology {
  std::size_t N = 0;
  unsigned n = 0;  // log2 N
  std::vector<std::array<std::size_t, 2>> out_edges;
  std::vector<std::array<std::size_t, 2>> in_edges;  // {v >> 1, (v >> 1) | N/2}

  std::size_t connections() const { return 2 * N; }
  /// Longest shortest path, by BFS from every node.
  unsigned diameter() const;
};

GdbgTopology build_topology(std::size_t N);

/// Per-array stage program. Stages c <= m = log2 j concatenate both incoming
/// trains; later stages keep the train picked by a 1-bit indicator and
/// reorder it by an m-bit XOR mask (out[s ^ mask] = in[s]).
struct RoutingProgram {
  std::size_t N = 0;
  std::size_t j = 0;
  unsigned n = 0;
  unsigned m = 0;
  std::vector<std::vector<std::uint8_t>> indicator;  // [c - m - 1][node]
  std::vector<std::vector<std::uint32_t>> mask;      // [c - m - 1][node]
  std::vector<std::vector<std::size_t>> presynaptic;

  unsigned stages() const noexcept { return n; }
  /// Stored reordering-mask bits per array: m (n - m).
  std::size_t address_bits() const noexcept { return static_cast<std::size_t>(m) * (n - m); }
  std::size_t indicator_bits() const noexcept { return n - m; }
  void dump(std::ostream& os) const;
};

/// Derives indicators and masks that deliver every array its j listed
/// sources in list order. Lists are realizable iff all sources of an array
/// share their low n - m bits, the shared indicator choices agree, and the
/// order is an XOR permutation of the delivered order. Throws
/// ErrorKind::Routing otherwise.
RoutingProgram compile_routing(const GdbgTopology& topo, const std::vector<std::vector<std::size_t>>& presynaptic,
                               std::size_t j);

struct SpikeBuffer {
  std::vector<std::uint8_t> spikes;
  std::vector<std::size_t> sources;
  friend bool operator==(const SpikeBuffer&, const SpikeBuffer&) = default;
};

/// Trains in flight between stages.
struct RoutingState {
  unsigned stage = 0;
  std::vector<SpikeBuffer> trains;
  CostLedger ledger;
};

RoutingState routing_start(const std::vector<std::uint8_t>& spikes);
/// Executes stage c (1-based); transfers are charged as routing reads and
/// writes, one time step per stage since arrays move in parallel.
void route_stage(RoutingState& state, const GdbgTopology& topo, const RoutingProgram& program, unsigned c,
                 const DeviceProfile& profile);
/// All log2 N stages.
std::vector<SpikeBuffer> route_timestep(const GdbgTopology& topo, const RoutingProgram& program,
                                        const std::vector<std::uint8_t>& spikes, const DeviceProfile& profile,
                                        CostLedger* ledger = nullptr);

/// Direct copy of each array's listed source spikes.
std::vector<SpikeBuffer> gather_oracle(const std::vector<std::uint8_t>& spikes,
                                       const std::vector<std::vector<std::size_t>>& presynaptic);

/// Realizable random lists: random indicators, random final masks.
template <class Rng>
std::vector<std::vector<std::size_t>> random_feasible_presynaptic(const GdbgTopology& topo, std::size_t j, Rng& rng);

/// Delivered source order for the given indicator choices with zero masks.
std::vector<std::vector<std::size_t>> delivered_sources(const GdbgTopology& topo, std::size_t j,
                                                        const std::vector<std::vector<std::uint8_t>>& indicator);

template <class Rng>
std::vector<std::vector<std::size_t>> random_feasible_presynaptic(const GdbgTopology& topo, std::size_t j, Rng& rng) {
  unsigned m = 0;
  while ((std::size_t{1} << m) < j) ++m;
  std::vector<std::vector<std::uint8_t>> ind(topo.n - m, std::vector<std::uint8_t>(topo.N));
  for (auto& stage : ind)
    for (auto& b : stage) b = static_cast<std::uint8_t>(rng() & 1u);
  auto lists = delivered_sources(topo, j, ind);
  if (m == topo.n) return lists;
  for (auto& list : lists) {
    const std::size_t mk = static_cast<std::size_t>(rng() % j);
    std::vector<std::size_t> out(j);
    for (std::size_t s = 0; s < j; ++s) out[s ^ mk] = list[s];
    list = std::move(out);
  }
  return lists;
}

}  // namespace cramsnn

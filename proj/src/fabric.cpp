#include "cramsnn/fabric.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <string>

#include "cramsnn/error.hpp"

namespace cramsnn {

namespace {

unsigned log2_exact(std::size_t v) {
  unsigned b = 0;
  while ((std::size_t{1} << b) < v) ++b;
  return b;
}

/// Provenance of every train after all stages for the given choices.
std::vector<std::vector<std::size_t>> simulate_sources(const GdbgTopology& topo, unsigned m,
                                                       const std::vector<std::vector<std::uint8_t>>& ind,
                                                       const std::vector<std::vector<std::uint32_t>>* masks) {
  std::vector<std::vector<std::size_t>> trains(topo.N);
  for (std::size_t v = 0; v < topo.N; ++v) trains[v] = {v};
  for (unsigned c = 1; c <= topo.n; ++c) {
    std::vector<std::vector<std::size_t>> next(topo.N);
    for (std::size_t v = 0; v < topo.N; ++v) {
      const auto& [p0, p1] = topo.in_edges[v];
      if (c <= m) {
        next[v] = trains[p0];
        next[v].insert(next[v].end(), trains[p1].begin(), trains[p1].end());
      } else {
        const auto& in = trains[ind[c - m - 1][v] ? p1 : p0];
        const std::uint32_t mk = masks ? (*masks)[c - m - 1][v] : 0;
        next[v].resize(in.size());
        for (std::size_t s = 0; s < in.size(); ++s) next[v][s ^ mk] = in[s];
      }
    }
    trains = std::move(next);
  }
  return trains;
}

}  // namespace

unsigned GdbgTopology::diameter() const {
  unsigned worst = 0;
  for (std::size_t s = 0; s < N; ++s) {
    std::vector<int> dist(N, -1);
    std::deque<std::size_t> q{s};
    dist[s] = 0;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop_front();
      for (auto w : out_edges[u])
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          q.push_back(w);
        }
    }
    for (int d : dist) {
      if (d < 0) fail(ErrorKind::Invariant, "topology is not strongly connected");
      worst = std::max(worst, static_cast<unsigned>(d));
    }
  }
  return worst;
}

GdbgTopology build_topology(std::size_t N) {
  require(N >= 2 && is_power_of_two(N), ErrorKind::InvalidArgument, "N must be a power of two, at least 2");
  GdbgTopology t;
  t.N = N;
  t.n = log2_exact(N);
  t.out_edges.resize(N);
  t.in_edges.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    t.out_edges[i] = {(2 * i) % N, (2 * i + 1) % N};
    t.in_edges[i] = {i >> 1, (i >> 1) | (N / 2)};
  }
  return t;
}

std::vector<std::vector<std::size_t>> delivered_sources(const GdbgTopology& topo, std::size_t j,
                                                        const std::vector<std::vector<std::uint8_t>>& indicator) {
  return simulate_sources(topo, log2_exact(j), indicator, nullptr);
}

RoutingProgram compile_routing(const GdbgTopology& topo, const std::vector<std::vector<std::size_t>>& presynaptic,
                               std::size_t j) {
  require(j >= 1 && j <= topo.N && is_power_of_two(j), ErrorKind::InvalidArgument,
          "j must be a power of two no larger than N");
  require(presynaptic.size() == topo.N, ErrorKind::InvalidArgument, "need one presynaptic list per array");
  RoutingProgram prog;
  prog.N = topo.N;
  prog.j = j;
  prog.n = topo.n;
  prog.m = log2_exact(j);
  prog.presynaptic = presynaptic;
  const unsigned n = prog.n;
  const unsigned m = prog.m;
  const std::size_t low_mask = (std::size_t{1} << (n - m)) - 1;

  std::vector<std::size_t> target(topo.N);
  for (std::size_t v = 0; v < topo.N; ++v) {
    const auto& list = presynaptic[v];
    require(list.size() == j, ErrorKind::InvalidArgument, "each presynaptic list needs exactly j sources");
    for (auto u : list) require(u < topo.N, ErrorKind::OutOfRange, "presynaptic source out of range");
    target[v] = list[0] & low_mask;
    for (auto u : list)
      if ((u & low_mask) != target[v])
        fail(ErrorKind::Routing, "array " + std::to_string(v) + ": sources disagree in their low " +
                                     std::to_string(n - m) + " bits");
  }

  // Backward pass: the train a node forwards at stage c must carry the low
  // bits its successor needs; each (stage, node) holds a single train.
  const unsigned sel = n - m;
  prog.indicator.assign(sel, std::vector<std::uint8_t>(topo.N, 0));
  prog.mask.assign(sel, std::vector<std::uint32_t>(topo.N, 0));
  std::vector<std::optional<std::size_t>> req(topo.N);
  for (std::size_t v = 0; v < topo.N; ++v) req[v] = target[v];
  for (unsigned c = n; c > m; --c) {
    std::vector<std::optional<std::size_t>> prev(topo.N);
    for (std::size_t v = 0; v < topo.N; ++v) {
      if (!req[v]) continue;
      const auto b = static_cast<std::uint8_t>((*req[v] >> (n - c)) & 1u);
      prog.indicator[c - m - 1][v] = b;
      const std::size_t p = topo.in_edges[v][b];
      if (prev[p] && *prev[p] != *req[v])
        fail(ErrorKind::Routing, "array " + std::to_string(p) + " must forward conflicting trains at stage " +
                                     std::to_string(c - 1));
      prev[p] = req[v];
    }
    req = std::move(prev);
  }

  const auto delivered = simulate_sources(topo, m, prog.indicator, nullptr);
  for (std::size_t v = 0; v < topo.N; ++v) {
    const auto& got = delivered[v];
    const auto& want = presynaptic[v];
    const auto it = std::find(got.begin(), got.end(), want[0]);
    if (it == got.end()) fail(ErrorKind::Routing, "array " + std::to_string(v) + ": source set is unreachable");
    const auto mk = static_cast<std::uint32_t>(it - got.begin());
    for (std::size_t s = 0; s < j; ++s)
      if (want[s ^ mk] != got[s])
        fail(ErrorKind::Routing, "array " + std::to_string(v) + ": order is not an XOR permutation");
    if (mk != 0) {
      if (sel == 0) fail(ErrorKind::Routing, "array " + std::to_string(v) + ": order is fixed when j = N");
      prog.mask[sel - 1][v] = mk;
    }
  }
  return prog;
}

void RoutingProgram::dump(std::ostream& os) const {
  os << "N=" << N << " j=" << j << " stages=" << n << " address_bits=" << address_bits() << '\n';
  for (std::size_t v = 0; v < N; ++v) {
    os << v << ':';
    for (unsigned s = 0; s < n - m; ++s) os << " c" << (m + 1 + s) << "=" << int(indicator[s][v]) << '/' << mask[s][v];
    os << '\n';
  }
}

RoutingState routing_start(const std::vector<std::uint8_t>& spikes) {
  RoutingState st;
  st.trains.resize(spikes.size());
  for (std::size_t v = 0; v < spikes.size(); ++v) st.trains[v] = {{spikes[v]}, {v}};
  return st;
}

void route_stage(RoutingState& state, const GdbgTopology& topo, const RoutingProgram& program, unsigned c,
                 const DeviceProfile& profile) {
  require(c >= 1 && c <= program.n, ErrorKind::OutOfRange, "routing stage out of range");
  require(c == state.stage + 1, ErrorKind::Invariant, "routing stages must run in order");
  require(state.trains.size() == topo.N && program.N == topo.N, ErrorKind::InvalidArgument,
          "routing state does not match the topology");
  std::vector<SpikeBuffer> next(topo.N);
  std::uint64_t bits = 0;
  for (std::size_t v = 0; v < topo.N; ++v) {
    const auto& [p0, p1] = topo.in_edges[v];
    SpikeBuffer& out = next[v];
    if (c <= program.m) {
      out = state.trains[p0];
      const SpikeBuffer& b = state.trains[p1];
      out.spikes.insert(out.spikes.end(), b.spikes.begin(), b.spikes.end());
      out.sources.insert(out.sources.end(), b.sources.begin(), b.sources.end());
    } else {
      const std::size_t s_idx = c - program.m - 1;
      const SpikeBuffer& in = state.trains[program.indicator[s_idx][v] ? p1 : p0];
      const std::uint32_t mk = program.mask[s_idx][v];
      out.spikes.resize(in.spikes.size());
      out.sources.resize(in.sources.size());
      for (std::size_t s = 0; s < in.spikes.size(); ++s) {
        out.spikes[s ^ mk] = in.spikes[s];
        out.sources[s ^ mk] = in.sources[s];
      }
    }
    bits += out.spikes.size();
  }
  const double energy = static_cast<double>(bits) * (profile.read_cost.energy + profile.write_cost.energy) *
                        profile.calibration_energy_scale;
  const double time = (profile.read_cost.time + profile.write_cost.time) * profile.calibration_time_scale;
  state.ledger.charge(CostClass::Routing, topo.N, bits, energy, time);
  state.trains = std::move(next);
  state.stage = c;
}

std::vector<SpikeBuffer> route_timestep(const GdbgTopology& topo, const RoutingProgram& program,
                                        const std::vector<std::uint8_t>& spikes, const DeviceProfile& profile,
                                        CostLedger* ledger) {
  require(spikes.size() == topo.N, ErrorKind::InvalidArgument, "need one spike per array");
  RoutingState st = routing_start(spikes);
  for (unsigned c = 1; c <= program.n; ++c) route_stage(st, topo, program, c, profile);
  if (ledger) ledger->merge(st.ledger);
  return std::move(st.trains);
}

std::vector<SpikeBuffer> gather_oracle(const std::vector<std::uint8_t>& spikes,
                                       const std::vector<std::vector<std::size_t>>& presynaptic) {
  std::vector<SpikeBuffer> out(presynaptic.size());
  for (std::size_t v = 0; v < presynaptic.size(); ++v)
    for (auto u : presynaptic[v]) {
      out[v].spikes.push_back(spikes.at(u));
      out[v].sources.push_back(u);
    }
  return out;
}

}  // namespace cramsnn

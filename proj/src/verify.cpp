#include "cramsnn/verify.hpp"

#include <memory>
#include <random>
#include <sstream>

#include "cramsnn/alu.hpp"
#include "cramsnn/fabric.hpp"
#include "cramsnn/oracle.hpp"
#include "cramsnn/prng.hpp"
#include "cramsnn/stdp.hpp"

namespace cramsnn {

SuiteResult verify_alu_exhaustive() {
  SuiteResult r{"alu_exhaustive_4bit", true, ""};
  CramArray array(64, 256, DeviceProfile::builtin("SHE-F"));
  RowPool pool(8, 64);
  Alu alu(array, pool);
  const Word a{0, 1, 2, 3}, b{4, 5, 6, 7};
  std::vector<std::uint64_t> av(256), bv(256);
  for (std::size_t c = 0; c < 256; ++c) {
    av[c] = c & 15;
    bv[c] = c >> 4;
  }
  const ColumnMask all = array.all_columns();
  alu.write_values(a, av, all);
  alu.write_values(b, bv, all);
  Scratch sum = alu.add(a, b, all);
  Scratch prod = alu.multiply(a, b, all);
  Scratch ge = alu.compare_ge(a, b, all);
  std::size_t bad = 0;
  for (std::size_t c = 0; c < 256; ++c) {
    bad += alu.peek_value(sum, c) != av[c] + bv[c];
    bad += alu.peek_value(prod, c) != av[c] * bv[c];
    bad += alu.peek_value(ge, c) != (av[c] >= bv[c] ? 1u : 0u);
  }
  r.passed = bad == 0;
  r.detail = std::to_string(3 * 256 - bad) + "/768 cases";
  return r;
}

SuiteResult verify_lif_stdp(std::uint64_t seed, std::size_t configs) {
  SuiteResult r{"lif_stdp_fixed_point", true, ""};
  std::mt19937_64 rng(seed);
  const DeviceProfile profile = DeviceProfile::builtin("SHE-F");
  std::size_t failures = 0, steps_run = 0, with_stdp = 0;
  for (std::size_t trial = 0; trial < configs; ++trial) {
    const NeuronParams p = random_small_neuron(rng);
    const std::size_t steps = 1 + rng() % 50;
    Neuron gate(p, profile);
    FixedPointNeuron fixed(p);
    std::unique_ptr<StdpEngine> gate_stdp;
    std::unique_ptr<FixedPointStdp> fixed_stdp;
    if (p.stdp.enabled) {
      gate_stdp = std::make_unique<StdpEngine>(gate);
      fixed_stdp = std::make_unique<FixedPointStdp>(p, fixed.lut());
      ++with_stdp;
    }
    for (std::size_t t = 0; t < steps; ++t) {
      std::vector<std::uint8_t> in(p.j);
      for (auto& b : in) b = static_cast<std::uint8_t>(rng() & 1u);
      const bool gs = gate.timestep(in);
      const bool fs = fixed.step(in);
      if (gate_stdp) {
        gate_stdp->update();
        fixed_stdp->update(in, fs);
        fixed.weights = fixed_stdp->weights();
      }
      ++steps_run;
      bool ok = gs == fs && gate.membrane() == fixed.membrane && gate.last_current() == fixed.current;
      for (std::size_t k = 0; k < p.j; ++k) ok = ok && gate.weight(k) == fixed.weights[k];
      if (!ok) {
        ++failures;
        break;
      }
    }
  }
  r.passed = failures == 0;
  std::ostringstream os;
  os << configs - failures << "/" << configs << " configs, " << steps_run << " steps, " << with_stdp << " with STDP";
  r.detail = os.str();
  return r;
}

SuiteResult verify_lfsr() {
  SuiteResult r{"lfsr_511", true, ""};
  CramArray array(64, 256, DeviceProfile::builtin("SHE-F"));
  RowPool pool(0, 64);
  Alu alu(array, pool);
  LfsrConfig cfg;
  Lfsr lfsr(alu, cfg, array.columns(0, 1));
  std::uint32_t soft = cfg.seed;
  std::size_t period = 0;
  bool match = true;
  for (std::size_t t = 1; t <= 511; ++t) {
    soft = lfsr_next(soft, cfg);
    match = match && lfsr.step() == soft;
    if (period == 0 && soft == cfg.seed) period = t;
  }
  r.passed = match && period == 511;
  r.detail = "period " + std::to_string(period) + (match ? ", sequence matches" : ", sequence differs");
  return r;
}

SuiteResult verify_routing(std::uint64_t seed) {
  SuiteResult r{"routing_gather", true, ""};
  std::mt19937_64 rng(seed);
  const DeviceProfile profile = DeviceProfile::builtin("SHE-F");
  std::ostringstream os;
  for (std::size_t N : {4u, 16u, 64u, 1024u}) {
    const GdbgTopology topo = build_topology(N);
    for (std::size_t j = 1; j <= N; j *= 4) {
      const auto lists = random_feasible_presynaptic(topo, j, rng);
      const RoutingProgram prog = compile_routing(topo, lists, j);
      std::vector<std::uint8_t> spikes(N);
      for (auto& s : spikes) s = static_cast<std::uint8_t>(rng() & 1u);
      const bool ok = route_timestep(topo, prog, spikes, profile) == gather_oracle(spikes, lists);
      r.passed = r.passed && ok;
      if (!ok) os << "N=" << N << " j=" << j << " mismatch; ";
    }
  }
  r.detail = r.passed ? "N in {4,16,64,1024}" : os.str();
  return r;
}

SuiteResult verify_resistive() {
  SuiteResult r{"resistive_truth_tables", true, ""};
  std::size_t cases = 0;
  for (const auto& name : DeviceProfile::builtin_names()) {
    const DeviceProfile p = DeviceProfile::builtin(name);
    for (GateKind kind : kAllGateKinds) {
      const std::size_t arity = gate_info(kind).arity;
      for (std::uint32_t bits = 0; bits < (1u << arity); ++bits) {
        std::vector<std::uint8_t> in(arity);
        for (std::size_t k = 0; k < arity; ++k) in[k] = (bits >> k) & 1u;
        r.passed = r.passed && resistive_switch_decision(kind, in, p) == truth_table(kind, in);
        ++cases;
      }
    }
  }
  r.detail = std::to_string(cases) + " cases";
  return r;
}

std::vector<SuiteResult> run_verification(std::uint64_t seed, std::size_t configs) {
  return {verify_alu_exhaustive(), verify_lif_stdp(seed, configs), verify_lfsr(), verify_routing(seed),
          verify_resistive()};
}

}  // namespace cramsnn

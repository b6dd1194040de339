#include "cramsnn/network.hpp"

#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "cramsnn/error.hpp"

namespace cramsnn {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex m;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::vector<std::size_t>> default_presynaptic(std::size_t N, std::size_t j) {
  const GdbgTopology topo = build_topology(N);
  unsigned m = 0;
  while ((std::size_t{1} << m) < j) ++m;
  const std::vector<std::vector<std::uint8_t>> ind(topo.n - m, std::vector<std::uint8_t>(N, 0));
  return delivered_sources(topo, j, ind);
}

Network::Network(const ExperimentConfig& cfg, const DeviceProfile& profile, bool learning, unsigned threads)
    : cfg_(cfg), profile_(profile), learning_(learning), threads_(threads) {
  SnnConfig& snn = cfg_.snn;
  snn.validate();
  if (learning_) snn.stdp.enabled = true;
  const std::size_t N = snn.N;
  if (N >= 2) {
    if (snn.j > N) fail(ErrorKind::InvalidArgument, "a network needs j <= N");
    topo_ = build_topology(N);
    if (snn.presynaptic.empty()) snn.presynaptic = default_presynaptic(N, snn.j);
    program_ = compile_routing(*topo_, snn.presynaptic, snn.j);
  }
  neurons_.resize(N);
  engines_.resize(N);
  parallel_for(N, threads_, [&](std::size_t i) {
    NeuronParams p = snn.neuron(i);
    p.stdp.enabled = learning_;
    neurons_[i] = std::make_unique<Neuron>(p, profile_);
    if (learning_) engines_[i] = std::make_unique<StdpEngine>(*neurons_[i]);
  });
  for (std::size_t i = 0; i < N; ++i) input_rng_.emplace_back(cfg_.seed * 0x9e3779b97f4a7c15ull + i);
  delivered_.assign(N, SpikeBuffer{std::vector<std::uint8_t>(snn.j, 0), {}});
}

std::vector<std::uint8_t> Network::external_inputs(std::size_t i) {
  std::vector<std::uint8_t> in(cfg_.snn.j, 0);
  if (cfg_.input_rate <= 0.0) return in;
  for (auto& b : in) b = static_cast<double>(input_rng_[i]() >> 11) * 0x1p-53 < cfg_.input_rate;
  return in;
}

StepRecord Network::step() {
  const std::size_t N = neurons_.size();
  std::vector<std::vector<std::uint8_t>> inputs(N);
  for (std::size_t i = 0; i < N; ++i) {
    inputs[i] = external_inputs(i);
    for (std::size_t k = 0; k < inputs[i].size(); ++k) inputs[i][k] |= delivered_[i].spikes[k];
  }
  StepRecord rec;
  rec.spikes.assign(N, 0);
  rec.membrane.assign(N, 0);
  rec.current.assign(N, 0);
  parallel_for(N, threads_, [&](std::size_t i) {
    rec.spikes[i] = neurons_[i]->timestep(inputs[i]);
    if (engines_[i]) engines_[i]->update();
    rec.membrane[i] = neurons_[i]->membrane();
    rec.current[i] = neurons_[i]->last_current();
  });
  if (topo_) delivered_ = route_timestep(*topo_, *program_, rec.spikes, profile_, &routing_);
  return rec;
}

std::vector<std::vector<std::uint32_t>> Network::weights() const {
  std::vector<std::vector<std::uint32_t>> w(neurons_.size());
  for (std::size_t i = 0; i < neurons_.size(); ++i)
    for (std::size_t k = 0; k < cfg_.snn.j; ++k) w[i].push_back(neurons_[i]->weight(k));
  return w;
}

CostLedger Network::compute_ledger() const {
  CostLedger total;
  for (const auto& n : neurons_) total.merge(n->array().ledger());
  return total;
}

CostLedger Network::init_ledger() const {
  CostLedger total;
  for (std::size_t i = 0; i < neurons_.size(); ++i) {
    total.merge(neurons_[i]->init_ledger());
    if (engines_[i]) total.merge(engines_[i]->init_ledger());
  }
  return total;
}

}  // namespace cramsnn

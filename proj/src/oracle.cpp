#include "cramsnn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "cramsnn/error.hpp"
#include "cramsnn/stdp.hpp"

namespace cramsnn {

std::uint64_t fixed_round(std::uint64_t x, unsigned width, unsigned bits) {
  if (width == bits) return x;
  require(width > bits && bits >= 1, ErrorKind::InvalidArgument, "rounding needs a wider input");
  const std::uint64_t top = (std::uint64_t{1} << bits) - 1;
  return std::min((x + rounding_factor(width - bits)) >> (width - bits), top);
}

FixedPointNeuron::FixedPointNeuron(NeuronParams params, std::optional<std::vector<std::uint32_t>> lut)
    : p_(std::move(params)) {
  p_.validate();
  lut_ = lut ? *lut : quantize_alpha_lut(p_.tau_u, p_.L_f, p_.S);
  require(lut_.size() == p_.L_f, ErrorKind::InvalidArgument, "LUT needs L_f entries");
  weights = p_.weights;
  counters.assign(p_.j, 0);
  history.assign(p_.L_f, std::vector<std::uint8_t>(p_.j, 0));
  lfsr_state = p_.lfsr.seed;
}

std::uint32_t FixedPointNeuron::noise() {
  const std::uint32_t mask = (std::uint32_t{1} << p_.S) - 1;
  const std::uint32_t r = (lfsr_state >> p_.lfsr.shift) & mask;
  lfsr_state = lfsr_next(lfsr_state, p_.lfsr);
  return r;
}

bool FixedPointNeuron::step(const std::vector<std::uint8_t>& spikes) {
  require(spikes.size() == p_.j, ErrorKind::InvalidArgument, "need one input spike per synapse");
  const unsigned S = p_.S;
  const std::uint64_t top = p_.max_value();
  std::vector<bool> enabled(p_.j);
  for (std::size_t k = 0; k < p_.j; ++k) {
    const std::uint32_t inc = (counters[k] + 1) & static_cast<std::uint32_t>(top);
    enabled[k] = inc >= p_.delays[k];
    counters[k] = enabled[k] ? 0 : inc;
  }
  for (std::size_t s = p_.L_f - 1; s >= 1; --s) history[s] = history[s - 1];
  for (std::size_t k = 0; k < p_.j; ++k) history[0][k] = spikes[k] != 0;

  const unsigned width = S + ceil_log2(p_.L_f);
  std::vector<std::uint64_t> r(p_.j, 0);
  for (std::size_t k = 0; k < p_.j; ++k) {
    if (!enabled[k]) continue;
    std::uint64_t acc = 0;
    for (std::size_t s = 0; s < p_.L_f; ++s)
      if (history[s][k]) acc += lut_[s];
    const std::uint64_t f = fixed_round(acc, width, S);
    r[k] = fixed_round(f * weights[k], 2 * S, S);
  }
  for (std::size_t half = p_.j / 2; half >= 1; half /= 2)
    for (std::size_t c = 0; c < half; ++c) r[c] = fixed_round(r[c] + r[c + half], S + 1, S);

  std::uint64_t u = std::min<std::uint64_t>(r[0] + p_.bias, top);
  if (p_.noise_current) u = std::min<std::uint64_t>(u + noise(), top);
  current = static_cast<std::uint32_t>(u);
  const std::uint64_t dv = fixed_round(std::uint64_t{membrane} * p_.decay_constant(), 2 * S, S);
  std::uint64_t t = std::min<std::uint64_t>(u + dv, top);
  if (p_.noise_membrane) t = std::min<std::uint64_t>(t + noise(), top);
  const std::uint64_t reset = spike ? p_.theta : 0;
  std::uint64_t v = t > reset ? t - reset : 0;
  spike = v >= p_.theta;
  if (spike) v = 0;
  membrane = static_cast<std::uint32_t>(v);
  return spike;
}

FixedPointStdp::FixedPointStdp(const NeuronParams& params, std::vector<std::uint32_t> lut)
    : p_(params), lut_(std::move(lut)), precision_(params.stdp.width(params.S)) {
  require(p_.stdp.enabled, ErrorKind::InvalidArgument, "STDP is disabled for this neuron");
  dt_pre.assign(p_.j, p_.stdp.t_max);
  dt_post = p_.stdp.t_max;
  accumulator.resize(p_.j);
  for (std::size_t k = 0; k < p_.j; ++k) accumulator[k] = std::uint64_t{p_.weights[k]} << (precision_ - p_.S);
}

std::uint64_t FixedPointStdp::trace(std::uint32_t dt) const {
  const std::uint64_t f = stdp_trace(lut_, dt, p_);
  if (p_.stdp.f_scale == FScale::Tau) return f;
  return fixed_round(f * stdp_inverse_tau_constant(p_), 2 * precision_, precision_);
}

void FixedPointStdp::apply(std::int32_t a, std::uint32_t dt, std::size_t k) {
  if (a == 0) return;
  const std::uint64_t top = (std::uint64_t{1} << precision_) - 1;
  const auto mag = static_cast<std::uint64_t>(std::abs(std::int64_t{a}));
  const std::uint64_t d = fixed_round(mag * trace(dt), 2 * precision_, precision_);
  auto& w = accumulator[k];
  w = a > 0 ? std::min(w + d, top) : (w > d ? w - d : 0);
}

void FixedPointStdp::update(const std::vector<std::uint8_t>& pre, bool post) {
  require(pre.size() == p_.j, ErrorKind::InvalidArgument, "need one presynaptic spike per synapse");
  const std::uint32_t t_max = p_.stdp.t_max;
  for (std::size_t k = 0; k < p_.j; ++k) dt_pre[k] = pre[k] ? 0 : std::min(dt_pre[k] + 1, t_max);
  dt_post = post ? 0 : std::min(dt_post + 1, t_max);
  for (std::size_t k = 0; k < p_.j; ++k)
    if (pre[k]) apply(p_.stdp.a_minus, dt_post, k);
  if (post)
    for (std::size_t k = 0; k < p_.j; ++k) apply(p_.stdp.a_plus, dt_pre[k], k);
}

std::vector<std::uint32_t> FixedPointStdp::weights() const {
  std::vector<std::uint32_t> w(p_.j);
  for (std::size_t k = 0; k < p_.j; ++k) w[k] = static_cast<std::uint32_t>(accumulator[k] >> (precision_ - p_.S));
  return w;
}

ReferenceNeuron::ReferenceNeuron(const NeuronParams& p)
    : filter_gain(std::ldexp(1.0, -static_cast<int>(ceil_log2(p.L_f)))),
      reduce_gain(1.0 / static_cast<double>(p.j)),
      tau_u_(p.tau_u) {
  p.validate();
  const double unit = std::ldexp(1.0, -static_cast<int>(p.S));
  bias_ = p.bias * unit;
  theta_ = p.theta * unit;
  decay_ = p.decay == DecayMode::Leaky ? 1.0 - 1.0 / p.tau_v : 1.0 / p.tau_v;
  for (auto w : p.weights) weights_.push_back(w * unit);
  delays_.assign(p.delays.begin(), p.delays.end());
  counters_.assign(p.j, 0);
  history_.assign(p.L_f, std::vector<std::uint8_t>(p.j, 0));
}

ReferenceNeuron::State ReferenceNeuron::step(const std::vector<std::uint8_t>& spikes) {
  require(spikes.size() == weights_.size(), ErrorKind::InvalidArgument, "need one input spike per synapse");
  const std::size_t j = weights_.size();
  for (std::size_t s = history_.size() - 1; s >= 1; --s) history_[s] = history_[s - 1];
  for (std::size_t k = 0; k < j; ++k) history_[0][k] = spikes[k] != 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < j; ++k) {
    ++counters_[k];
    if (counters_[k] < delays_[k]) continue;
    counters_[k] = 0;
    double f = 0.0;
    for (std::size_t s = 0; s < history_.size(); ++s)
      if (history_[s][k]) f += std::exp(-static_cast<double>(s) / tau_u_);
    sum += std::min(f * filter_gain, 1.0) * weights_[k];
  }
  State next;
  next.u = std::min(sum * reduce_gain + bias_, 1.0);
  const double t = std::min(next.u + decay_ * state_.v, 1.0);
  next.v = std::max(t - (state_.spike ? theta_ : 0.0), 0.0);
  next.spike = next.v >= theta_;
  if (next.spike) next.v = 0.0;
  state_ = next;
  return state_;
}

ReferenceLifState reference_lif_step(ReferenceNeuron& neuron, const std::vector<std::uint8_t>& spikes) {
  return neuron.step(spikes);
}

std::vector<double> reference_stdp_update(const ReferenceStdpState& st, const std::vector<std::uint8_t>& pre,
                                          bool post) {
  require(pre.size() == st.dt_pre.size(), ErrorKind::InvalidArgument, "need one presynaptic spike per synapse");
  std::vector<double> dw(pre.size(), 0.0);
  for (std::size_t k = 0; k < pre.size(); ++k) {
    if (pre[k] && st.dt_post >= 0.0) dw[k] += st.a_minus * std::exp(-st.dt_post / st.tau);
    if (post && st.dt_pre[k] >= 0.0) dw[k] += st.a_plus * std::exp(-st.dt_pre[k] / st.tau);
  }
  return dw;
}

std::vector<std::uint32_t> aligned_lut(double tau_u, std::size_t L_f, unsigned entry_bits, unsigned datapath_bits) {
  require(entry_bits >= 1 && entry_bits <= 24, ErrorKind::OutOfRange, "entry width must be in [1, 24]");
  std::vector<std::uint32_t> lut = quantize_alpha_lut(tau_u, L_f, entry_bits);
  for (auto& e : lut)
    e = entry_bits <= datapath_bits ? e << (datapath_bits - entry_bits)
                                    : static_cast<std::uint32_t>(fixed_round(e, entry_bits, datapath_bits));
  return lut;
}

std::vector<NeuronParams> rmse_network(const RmseStudy& study) {
  std::mt19937_64 rng(study.seed);
  std::vector<NeuronParams> net(study.neurons);
  const std::uint64_t range = std::uint64_t{1} << study.datapath_bits;
  for (auto& p : net) {
    p.j = study.j;
    p.S = study.datapath_bits;
    p.L_f = study.L_f;
    p.tau_u = study.tau_u;
    p.tau_v = study.tau_v;
    p.theta = static_cast<std::uint32_t>(range / 8 + rng() % (range / 4));
    p.bias = static_cast<std::uint32_t>(rng() % (range / 32));
    p.weights.resize(study.j);
    for (auto& w : p.weights) w = static_cast<std::uint32_t>(rng() % range);
    p.delays.assign(study.j, 1);
  }
  return net;
}

std::vector<RmsePoint> rmse_analysis(const RmseStudy& study) {
  const std::vector<NeuronParams> net = rmse_network(study);
  std::mt19937_64 rng(study.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::vector<std::vector<std::uint8_t>>> inputs(study.steps);
  for (auto& step : inputs) {
    step.resize(study.neurons);
    for (auto& row : step) {
      row.resize(study.j);
      for (auto& b : row) b = static_cast<double>(rng() >> 11) * 0x1p-53 < study.input_rate;
    }
  }
  std::vector<std::vector<double>> ref(study.neurons, std::vector<double>(study.steps));
  for (std::size_t i = 0; i < study.neurons; ++i) {
    ReferenceNeuron r(net[i]);
    for (std::size_t t = 0; t < study.steps; ++t) ref[i][t] = r.step(inputs[t][i]).v;
  }
  const double unit = std::ldexp(1.0, -static_cast<int>(study.datapath_bits));
  std::vector<RmsePoint> curve;
  for (unsigned bits : study.entry_bits) {
    double se = 0.0;
    for (std::size_t i = 0; i < study.neurons; ++i) {
      FixedPointNeuron q(net[i], aligned_lut(study.tau_u, study.L_f, bits, study.datapath_bits));
      for (std::size_t t = 0; t < study.steps; ++t) {
        q.step(inputs[t][i]);
        const double d = q.membrane * unit - ref[i][t];
        se += d * d;
      }
    }
    curve.push_back({bits, std::sqrt(se / static_cast<double>(study.neurons * study.steps))});
  }
  return curve;
}

}  // namespace cramsnn

#include "cramsnn/lif.hpp"

#include <algorithm>
#include <cmath>

#include "cramsnn/error.hpp"

namespace cramsnn {

unsigned ceil_log2(std::uint64_t n) {
  require(n >= 1, ErrorKind::InvalidArgument, "ceil_log2 of zero");
  unsigned b = 0;
  while ((std::uint64_t{1} << b) < n) ++b;
  return b;
}

std::uint64_t next_power_of_two(std::uint64_t n) { return std::uint64_t{1} << ceil_log2(n); }

unsigned StdpParams::counter_bits() const { return std::max(1u, ceil_log2(std::uint64_t{t_max} + 1)); }

void StdpParams::validate(unsigned weight_bits) const {
  if (!enabled) return;
  const unsigned p = width(weight_bits);
  require(p <= 24, ErrorKind::OutOfRange, "STDP precision must be at most 24 bits");
  require(t_max >= 1 && t_max <= 65535, ErrorKind::OutOfRange, "t_max must be in [1, 65535]");
  const std::int64_t lim = (std::int64_t{1} << p) - 1;
  require(std::abs(std::int64_t{a_plus}) <= lim && std::abs(std::int64_t{a_minus}) <= lim,
          ErrorKind::OutOfRange, "A+ and A- must fit the STDP precision");
}

void NeuronParams::validate() const {
  require(S >= 1 && S <= 16, ErrorKind::OutOfRange, "S must be in [1, 16]");
  require(L_f >= 1 && L_f <= 4096, ErrorKind::OutOfRange, "L_f must be in [1, 4096]");
  require(j >= 1 && is_power_of_two(j), ErrorKind::InvalidArgument, "j must be a power of two");
  require(tau_u > 0.0 && std::isfinite(tau_u), ErrorKind::OutOfRange, "tau_u must be positive");
  require(tau_v >= 1.0 && std::isfinite(tau_v), ErrorKind::OutOfRange, "tau_v must be at least 1");
  require(theta <= max_value() && bias <= max_value(), ErrorKind::OutOfRange, "theta and bias must fit S bits");
  require(weights.size() == j && delays.size() == j, ErrorKind::InvalidArgument,
          "weights and delays need one entry per synapse");
  for (auto w : weights) require(w <= max_value(), ErrorKind::OutOfRange, "weight exceeds S bits");
  for (auto d : delays) require(d >= 1 && d <= max_value(), ErrorKind::OutOfRange, "delay must be in [1, 2^S - 1]");
  if (noise_current || noise_membrane) {
    lfsr.validate();
    require(lfsr.shift + S <= lfsr.width, ErrorKind::OutOfRange, "noise word exceeds the LFSR width");
  }
  stdp.validate(S);
}

std::uint32_t NeuronParams::decay_constant() const {
  const double factor = decay == DecayMode::Leaky ? 1.0 - 1.0 / tau_v : 1.0 / tau_v;
  const double q = std::round(factor * static_cast<double>(std::uint64_t{1} << S));
  return static_cast<std::uint32_t>(std::clamp(q, 0.0, static_cast<double>(max_value())));
}

void SnnConfig::validate() const {
  require(N >= 1, ErrorKind::InvalidArgument, "N must be positive");
  require(theta.size() == N && bias.size() == N, ErrorKind::InvalidArgument, "theta and bias need N entries");
  require(weights.size() == N && delays.size() == N, ErrorKind::InvalidArgument, "weights and delays need N rows");
  require(presynaptic.empty() || presynaptic.size() == N, ErrorKind::InvalidArgument,
          "presynaptic lists need N rows");
  for (std::size_t i = 0; i < presynaptic.size(); ++i) {
    require(presynaptic[i].size() == j, ErrorKind::InvalidArgument, "each presynaptic list needs j entries");
    for (auto src : presynaptic[i]) require(src < N, ErrorKind::OutOfRange, "presynaptic id out of range");
  }
  for (std::size_t i = 0; i < N; ++i) neuron(i).validate();
}

NeuronParams SnnConfig::neuron(std::size_t i) const {
  NeuronParams p;
  p.j = j;
  p.S = S;
  p.L_f = L_f;
  p.tau_u = tau_u;
  p.tau_v = tau_v;
  p.theta = theta.at(i);
  p.bias = bias.at(i);
  p.weights = weights.at(i);
  p.delays = delays.at(i);
  p.decay = decay;
  p.noise_current = noise_current;
  p.noise_membrane = noise_membrane;
  p.lfsr = lfsr;
  // Distinct nonzero seed per neuron.
  const std::uint64_t period = (std::uint64_t{1} << lfsr.width) - 1;
  p.lfsr.seed = static_cast<std::uint32_t>(1 + (std::uint64_t{lfsr.seed} - 1 + 37 * i) % period);
  p.stdp = stdp;
  p.copy_mode = copy_mode;
  return p;
}

LayoutPlan plan_layout(unsigned S, std::size_t L_f) {
  require(S >= 1 && L_f >= 1, ErrorKind::InvalidArgument, "S and L_f must be positive");
  LayoutPlan plan;
  plan.static_rows = static_cast<std::size_t>(S) * (L_f + 4);
  std::size_t d = kMinArraySize;
  while (plan.static_rows * 16 > d * 9) d *= 2;
  if (d > kMaxArraySize) fail(ErrorKind::OutOfRange, "neuron does not fit a 2048 x 2048 array");
  plan.array_size = d;
  plan.utilization = 100.0 * static_cast<double>(plan.static_rows) / static_cast<double>(d);
  return plan;
}

std::size_t NeuronLayout::static_rows() const {
  std::size_t n = weights.size() + delays.size() + counters.size() + constants.size();
  for (const auto& e : lut) n += e.size();
  return n;
}

std::vector<std::uint32_t> quantize_alpha_lut(double tau_u, std::size_t L_f, unsigned S) {
  require(tau_u > 0.0, ErrorKind::OutOfRange, "tau_u must be positive");
  const double top = static_cast<double>((std::uint64_t{1} << S) - 1);
  std::vector<std::uint32_t> lut(L_f);
  for (std::size_t s = 0; s < L_f; ++s)
    lut[s] = static_cast<std::uint32_t>(std::round(top * std::exp(-static_cast<double>(s) / tau_u)));
  return lut;
}

namespace {

Word take(RowIndex& next, std::size_t n) {
  Word w(n);
  for (auto& r : w) r = next++;
  return w;
}

std::size_t needed_rows(const NeuronParams& p, std::size_t static_rows) {
  const std::size_t s = p.S;
  std::size_t n = static_rows + p.L_f + s + 1 + 4;
  if (p.noise_current || p.noise_membrane) n += p.lfsr.width;
  std::size_t wide = s;
  if (p.stdp.enabled) {
    const std::size_t prec = p.stdp.width(p.S);
    n += 4 * p.stdp.counter_bits() + 3 * prec;
    wide = std::max(wide, prec);
  }
  const std::size_t filter_width = s + ceil_log2(p.L_f);
  n += 6 * wide + 4 * filter_width + 16;
  return n;
}

}  // namespace

Neuron::Neuron(NeuronParams params, const DeviceProfile& profile, std::optional<std::vector<std::uint32_t>> lut)
    : params_(std::move(params)),
      plan_(plan_layout(params_.S, params_.L_f)),
      array_(std::max<std::size_t>(plan_.array_size, next_power_of_two(needed_rows(params_, plan_.static_rows))),
             std::max<std::size_t>(plan_.array_size, next_power_of_two(params_.j)), profile) {
  params_.validate();
  const std::size_t s = params_.S;
  const std::vector<std::uint32_t> table = lut ? *lut : quantize_alpha_lut(params_.tau_u, params_.L_f, params_.S);
  require(table.size() == params_.L_f, ErrorKind::InvalidArgument, "LUT needs L_f entries");
  for (auto e : table) require(e <= params_.max_value(), ErrorKind::OutOfRange, "LUT entry exceeds S bits");

  RowIndex next = 0;
  for (std::size_t k = 0; k < params_.L_f; ++k) layout_.lut.push_back(take(next, s));
  layout_.weights = take(next, s);
  layout_.delays = take(next, s);
  layout_.counters = take(next, s);
  layout_.constants = take(next, s);
  pool_ = RowPool(next, array_.rows());
  alu_ = std::make_unique<Alu>(array_, pool_, params_.copy_mode);
  layout_.history = pool_.acquire(params_.L_f);
  layout_.membrane = pool_.acquire(s);
  layout_.spike = pool_.acquire();

  const ColumnMask m = synapse_mask();
  for (std::size_t k = 0; k < params_.L_f; ++k) alu_->write_constant(layout_.lut[k], table[k], m);
  alu_->write_values(layout_.weights, {params_.weights.begin(), params_.weights.end()}, m);
  alu_->write_values(layout_.delays, {params_.delays.begin(), params_.delays.end()}, m);
  alu_->write_constant(layout_.counters, 0, m);
  alu_->write_values(layout_.constants, {params_.theta, params_.bias, params_.decay_constant()},
                     array_.columns(0, 3));
  alu_->write_constant(layout_.history, 0, m);
  alu_->write_constant(layout_.membrane, 0, neuron_mask());
  alu_->write_constant({layout_.spike}, 0, neuron_mask());
  if (params_.noise_current || params_.noise_membrane)
    lfsr_ = std::make_unique<Lfsr>(*alu_, params_.lfsr, neuron_mask());

  init_ledger_ = array_.ledger();
  array_.ledger().reset();
}

ColumnMask Neuron::delay_gate() {
  const ColumnMask m = synapse_mask();
  Scratch inc = alu_->increment(layout_.counters, m);
  Scratch en = alu_->compare_ge(inc, layout_.delays, m);
  Scratch nen = alu_->scratch(1);
  alu_->gate_into(GateKind::Not, {en[0]}, nen[0], m);
  Scratch next = alu_->and_scale(nen[0], inc, m);
  alu_->copy_region(next, layout_.counters, m);
  return array_.read_row(en[0], m);
}

void Neuron::write_spikes(const std::vector<std::uint8_t>& spikes) {
  require(spikes.size() == params_.j, ErrorKind::InvalidArgument, "need one input spike per synapse");
  const ColumnMask m = synapse_mask();
  const auto& h = layout_.history;
  for (std::size_t s = h.size() - 1; s >= 1; --s) alu_->copy_region({h[s - 1]}, {h[s]}, m);
  BitVector bits(array_.cols());
  for (std::size_t k = 0; k < spikes.size(); ++k)
    if (spikes[k] != 0) bits.set(k);
  array_.write_row(h[0], m, bits);
}

Scratch Neuron::step_filter(const ColumnMask& enabled) {
  const unsigned s = params_.S;
  if (enabled.none()) return alu_->scratch(s);
  // Binary-counter reduction keeps at most log2(L_f) + 1 partial sums live.
  std::vector<std::pair<unsigned, Scratch>> stack;
  for (std::size_t k = 0; k < params_.L_f; ++k) {
    Scratch term = alu_->and_scale(layout_.history[k], layout_.lut[k], enabled);
    unsigned level = 0;
    while (!stack.empty() && stack.back().first == level) {
      Scratch sum = alu_->add(stack.back().second, term, enabled);
      stack.pop_back();
      term = std::move(sum);
      ++level;
    }
    stack.emplace_back(level, std::move(term));
  }
  Scratch acc = std::move(stack.back().second);
  stack.pop_back();
  while (!stack.empty()) {
    Scratch sum = alu_->add(stack.back().second, acc, enabled);
    stack.pop_back();
    acc = std::move(sum);
  }
  if (acc.width() != s + ceil_log2(params_.L_f))
    fail(ErrorKind::Invariant, "filter accumulator width mismatch");
  if (acc.width() == s) return acc;
  return alu_->round_to(std::move(acc), s, enabled);
}

Scratch Neuron::step_weight_mul(Scratch filtered, const ColumnMask& enabled) {
  const ColumnMask m = synapse_mask();
  const ColumnMask disabled = m & ~enabled;
  Scratch out;
  if (enabled.any()) {
    Scratch prod = alu_->multiply(filtered, layout_.weights, enabled);
    filtered.reset();
    out = alu_->round_to(std::move(prod), params_.S, enabled);
  } else {
    out = std::move(filtered);
  }
  if (disabled.any()) alu_->write_constant(out, 0, disabled);
  return out;
}

Scratch Neuron::step_reduce(Scratch products) {
  const unsigned s = params_.S;
  for (std::size_t half = params_.j / 2; half >= 1; half /= 2) {
    Scratch upper = alu_->scratch(s);
    alu_->transfer_columns(products, half, upper, 0, half);
    const ColumnMask lower = array_.columns(0, half);
    Scratch sum = alu_->add(products, upper, lower);
    products.reset();
    upper.reset();
    products = alu_->round_to(std::move(sum), s, lower);
  }
  return products;
}

Scratch Neuron::fetch_constant(std::size_t column) {
  Scratch out = alu_->scratch(params_.S);
  alu_->transfer_columns(layout_.constants, column, out, 0, 1);
  return out;
}

Scratch Neuron::step_bias_noise(Scratch reduced) {
  const ColumnMask c0 = neuron_mask();
  Scratch b = fetch_constant(1);
  Scratch u = alu_->saturating_add(reduced, b, c0);
  reduced.reset();
  b.reset();
  if (params_.noise_current) {
    Scratch noisy = alu_->saturating_add(u, lfsr_->noise_rows(params_.S), c0);
    lfsr_->step();
    u = std::move(noisy);
  }
  last_current_ = static_cast<std::uint32_t>(alu_->peek_value(u, 0));
  return u;
}

void Neuron::step_membrane(Scratch current) {
  const ColumnMask c0 = neuron_mask();
  Scratch decay = fetch_constant(2);
  Scratch prod = alu_->multiply(layout_.membrane, decay, c0);
  decay.reset();
  Scratch dv = alu_->round_to(std::move(prod), params_.S, c0);
  Scratch t = alu_->saturating_add(current, dv, c0);
  current.reset();
  dv.reset();
  if (params_.noise_membrane) {
    Scratch noisy = alu_->saturating_add(t, lfsr_->noise_rows(params_.S), c0);
    lfsr_->step();
    t = std::move(noisy);
  }
  Scratch reset = alu_->and_scale(layout_.spike, layout_.constants, c0);
  Scratch v = alu_->subtract_clamped(t, reset, c0);
  t.reset();
  reset.reset();
  alu_->copy_region(v, layout_.membrane, c0);
}

bool Neuron::step_threshold_spike() {
  const ColumnMask c0 = neuron_mask();
  Scratch fire = alu_->compare_ge(layout_.membrane, layout_.constants, c0);
  Scratch quiet = alu_->scratch(1);
  alu_->gate_into(GateKind::Not, {fire[0]}, quiet[0], c0);
  Scratch v = alu_->and_scale(quiet[0], layout_.membrane, c0);
  alu_->copy_region(v, layout_.membrane, c0);
  alu_->copy_region(fire, {layout_.spike}, c0);
  return array_.read_row(layout_.spike, c0).test(0);
}

bool Neuron::timestep(const std::vector<std::uint8_t>& spikes) {
  array_.charge_controller();
  const ColumnMask enabled = delay_gate();
  write_spikes(spikes);
  Scratch f = step_filter(enabled);
  Scratch r = step_weight_mul(std::move(f), enabled);
  Scratch red = step_reduce(std::move(r));
  Scratch u = step_bias_noise(std::move(red));
  step_membrane(std::move(u));
  return step_threshold_spike();
}

std::uint32_t Neuron::membrane() const { return static_cast<std::uint32_t>(alu_->peek_value(layout_.membrane, 0)); }
bool Neuron::spike() const { return array_.peek(layout_.spike, 0); }
std::uint32_t Neuron::weight(std::size_t k) const {
  return static_cast<std::uint32_t>(alu_->peek_value(layout_.weights, k));
}
std::uint32_t Neuron::delay(std::size_t k) const {
  return static_cast<std::uint32_t>(alu_->peek_value(layout_.delays, k));
}
std::uint32_t Neuron::counter(std::size_t k) const {
  return static_cast<std::uint32_t>(alu_->peek_value(layout_.counters, k));
}
std::uint32_t Neuron::lut_entry(std::size_t s) const {
  return static_cast<std::uint32_t>(alu_->peek_value(layout_.lut.at(s), 0));
}
bool Neuron::history_bit(std::size_t k, std::size_t s) const { return array_.peek(layout_.history.at(s), k); }

void Neuron::set_weight_rows(const Word& src, const ColumnMask& mask) { alu_->copy_region(src, layout_.weights, mask); }

}  // namespace cramsnn

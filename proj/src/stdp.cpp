#include "cramsnn/stdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "cramsnn/error.hpp"

namespace cramsnn {

std::uint64_t stdp_trace(const std::vector<std::uint32_t>& lut, std::uint32_t dt, const NeuronParams& p) {
  const std::size_t window = std::min<std::size_t>(p.L_f, p.stdp.t_max);
  if (dt >= window) return 0;
  const unsigned prec = p.stdp.width(p.S);
  return std::uint64_t{lut.at(dt)} << (prec - p.S);
}

std::uint64_t stdp_inverse_tau_constant(const NeuronParams& p) {
  const unsigned prec = p.stdp.width(p.S);
  const double top = static_cast<double>((std::uint64_t{1} << prec) - 1);
  return static_cast<std::uint64_t>(std::clamp(std::round(std::ldexp(1.0, static_cast<int>(prec)) / p.tau_u), 0.0, top));
}

StdpEngine::StdpEngine(Neuron& neuron)
    : neuron_(neuron),
      alu_(neuron.alu()),
      precision_(neuron.params().stdp.width(neuron.params().S)),
      counter_bits_(neuron.params().stdp.counter_bits()) {
  const NeuronParams& p = neuron_.params();
  require(p.stdp.enabled, ErrorKind::InvalidArgument, "STDP is disabled for this neuron");
  CramArray& array = neuron_.array();
  const CostLedger before = array.ledger();
  RowPool& pool = alu_.pool();
  dt_pre_ = pool.acquire(counter_bits_);
  dt_post_ = pool.acquire(counter_bits_);
  dt_post_all_ = pool.acquire(counter_bits_);
  limit_ = pool.acquire(counter_bits_);
  accumulator_ = pool.acquire(precision_);
  a_plus_ = pool.acquire(precision_);
  a_minus_ = pool.acquire(precision_);

  const ColumnMask m = neuron_.synapse_mask();
  alu_.write_constant(dt_pre_, p.stdp.t_max, m);
  alu_.write_constant(dt_post_, p.stdp.t_max, neuron_.neuron_mask());
  alu_.write_constant(dt_post_all_, p.stdp.t_max, m);
  alu_.write_constant(limit_, p.stdp.t_max, m);
  std::vector<std::uint64_t> acc(p.j);
  for (std::size_t k = 0; k < p.j; ++k) acc[k] = std::uint64_t{p.weights[k]} << (precision_ - p.S);
  alu_.write_values(accumulator_, acc, m);
  alu_.write_constant(a_plus_, static_cast<std::uint64_t>(std::abs(std::int64_t{p.stdp.a_plus})), m);
  alu_.write_constant(a_minus_, static_cast<std::uint64_t>(std::abs(std::int64_t{p.stdp.a_minus})), m);
  if (p.stdp.f_scale == FScale::InverseTau) {
    scale_ = pool.acquire(precision_);
    alu_.write_constant(scale_, stdp_inverse_tau_constant(p), m);
  }
  init_ledger_ = array.ledger().since(before);
  array.ledger() = before;
}

std::vector<std::uint64_t> StdpEngine::read_values(const Word& rows, const ColumnMask& mask) {
  std::vector<std::uint64_t> out(mask.size(), 0);
  for (std::size_t b = 0; b < rows.size(); ++b) {
    const BitVector bits = neuron_.array().read_row(rows[b], mask);
    for (auto c : bits.indices()) out[c] |= std::uint64_t{1} << b;
  }
  return out;
}

void StdpEngine::reset_or_increment_dt() {
  const ColumnMask m = neuron_.synapse_mask();
  const ColumnMask c0 = neuron_.neuron_mask();
  const NeuronLayout& layout = neuron_.layout();
  {
    Scratch inc = alu_.increment_saturating(dt_pre_, limit_, m);
    Scratch quiet = alu_.scratch(1);
    alu_.gate_into(GateKind::Not, {layout.history[0]}, quiet[0], m);
    Scratch next = alu_.and_scale(quiet[0], inc, m);
    alu_.copy_region(next, dt_pre_, m);
  }
  {
    Scratch inc = alu_.increment_saturating(dt_post_, limit_, c0);
    Scratch quiet = alu_.scratch(1);
    alu_.gate_into(GateKind::Not, {layout.spike}, quiet[0], c0);
    Scratch next = alu_.and_scale(quiet[0], inc, c0);
    alu_.copy_region(next, dt_post_, c0);
  }
  // Broadcast the single-column dt_post to every synapse column.
  CramArray& array = neuron_.array();
  for (std::size_t b = 0; b < dt_post_.size(); ++b) {
    const bool bit = array.read_row(dt_post_[b], c0).test(0);
    array.write_row(dt_post_all_[b], m, BitVector(array.cols(), bit));
  }
}

Scratch StdpEngine::lookup_F(const Word& dt, const ColumnMask& mask) {
  const NeuronParams& p = neuron_.params();
  const NeuronLayout& layout = neuron_.layout();
  const ColumnMask c0 = neuron_.neuron_mask();
  const std::size_t window = std::min<std::size_t>(p.L_f, p.stdp.t_max);
  const std::vector<std::uint64_t> dts = read_values(dt, mask);
  std::map<std::uint64_t, std::uint64_t> fetched;
  std::vector<std::uint64_t> values(mask.size(), 0);
  for (auto c : mask.indices()) {
    const std::uint64_t d = dts[c];
    if (d >= window) continue;
    auto it = fetched.find(d);
    if (it == fetched.end()) {
      const std::vector<std::uint64_t> entry = read_values(layout.lut[d], c0);
      it = fetched.emplace(d, entry[0] << (precision_ - p.S)).first;
    }
    values[c] = it->second;
  }
  Scratch f = alu_.scratch(precision_);
  alu_.write_values(f, values, mask);
  if (p.stdp.f_scale == FScale::InverseTau) {
    Scratch prod = alu_.multiply(f, scale_, mask);
    f.reset();
    f = alu_.round_to(std::move(prod), precision_, mask);
  }
  return f;
}

void StdpEngine::apply(std::int32_t a, const Word& magnitude, const Word& dt, const ColumnMask& mask) {
  if (a == 0 || mask.none()) return;
  Scratch f = lookup_F(dt, mask);
  Scratch prod = alu_.multiply(magnitude, f, mask);
  f.reset();
  Scratch delta = alu_.round_to(std::move(prod), precision_, mask);
  Scratch next = a > 0 ? alu_.saturating_add(accumulator_, delta, mask)
                       : alu_.subtract_clamped(accumulator_, delta, mask);
  delta.reset();
  alu_.copy_region(next, accumulator_, mask);
}

void StdpEngine::apply_weight_update() {
  const NeuronParams& p = neuron_.params();
  const NeuronLayout& layout = neuron_.layout();
  CramArray& array = neuron_.array();
  const ColumnMask m = neuron_.synapse_mask();
  const ColumnMask pre = array.read_row(layout.history[0], m);
  const bool post = array.read_row(layout.spike, neuron_.neuron_mask()).test(0);
  apply(p.stdp.a_minus, a_minus_, dt_post_all_, pre);
  if (post) apply(p.stdp.a_plus, a_plus_, dt_pre_, m);
  const ColumnMask touched = post ? m : pre;
  if ((p.stdp.a_minus != 0 && pre.any()) || (p.stdp.a_plus != 0 && post)) {
    const Word top(accumulator_.end() - p.S, accumulator_.end());
    neuron_.set_weight_rows(top, touched);
  }
}

void StdpEngine::update() {
  neuron_.array().charge_controller();
  reset_or_increment_dt();
  apply_weight_update();
}

std::uint32_t StdpEngine::dt_pre(std::size_t k) const {
  return static_cast<std::uint32_t>(alu_.peek_value(dt_pre_, k));
}
std::uint32_t StdpEngine::dt_post() const { return static_cast<std::uint32_t>(alu_.peek_value(dt_post_, 0)); }
std::uint32_t StdpEngine::accumulator(std::size_t k) const {
  return static_cast<std::uint32_t>(alu_.peek_value(accumulator_, k));
}

}  // namespace cramsnn

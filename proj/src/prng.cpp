#include "cramsnn/prng.hpp"

#include "cramsnn/error.hpp"

namespace cramsnn {

void LfsrConfig::validate() const {
  require(width >= 2 && width <= 32, ErrorKind::Config, "LFSR width must be in [2, 32]");
  require(taps.size() >= 2, ErrorKind::Config, "LFSR needs at least two taps");
  for (auto t : taps) require(t >= 1 && t <= width, ErrorKind::Config, "LFSR tap outside register");
  const std::uint32_t mask = width == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << width) - 1;
  require((seed & mask) != 0, ErrorKind::Config, "LFSR seed must be nonzero");
}

std::uint32_t lfsr_next(std::uint32_t state, const LfsrConfig& cfg) {
  std::uint32_t fb = 0;
  for (auto t : cfg.taps) fb ^= (state >> (t - 1)) & 1u;
  const std::uint32_t mask = cfg.width == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << cfg.width) - 1;
  return ((state << 1) | fb) & mask;
}

Lfsr::Lfsr(Alu& alu, LfsrConfig cfg, ColumnMask mask)
    : alu_(alu), cfg_(std::move(cfg)), mask_(std::move(mask)) {
  cfg_.validate();
  require(mask_.count() == 1, ErrorKind::InvalidArgument, "LFSR occupies exactly one column");
  column_ = mask_.indices().front();
  state_ = alu_.pool().acquire(cfg_.width);
  alu_.write_constant(state_, cfg_.seed, mask_);
}

RowIndex Lfsr::xor_rows(RowIndex a, RowIndex b) {
  using enum GateKind;
  const RowIndex n1 = alu_.gate(Nand, {a, b}, mask_);
  const RowIndex n2 = alu_.gate(Nand, {a, n1}, mask_);
  const RowIndex n3 = alu_.gate(Nand, {b, n1}, mask_);
  const RowIndex x = alu_.gate(Nand, {n2, n3}, mask_);
  alu_.pool().release(n3);
  alu_.pool().release(n2);
  alu_.pool().release(n1);
  return x;
}

std::uint32_t Lfsr::step() {
  require(state() != 0, ErrorKind::Invariant, "LFSR reached the all-zero state");
  RowIndex fb = state_[cfg_.taps[0] - 1];
  bool owned = false;
  for (std::size_t t = 1; t < cfg_.taps.size(); ++t) {
    const RowIndex x = xor_rows(fb, state_[cfg_.taps[t] - 1]);
    if (owned) alu_.pool().release(fb);
    fb = x;
    owned = true;
  }
  for (std::size_t k = cfg_.width - 1; k > 0; --k) alu_.gate_into(GateKind::Copy, {state_[k - 1]}, state_[k], mask_);
  alu_.gate_into(GateKind::Copy, {fb}, state_[0], mask_);
  if (owned) alu_.pool().release(fb);
  return state();
}

Word Lfsr::noise_rows(unsigned bits) const {
  require(bits >= 1 && cfg_.shift + bits <= cfg_.width, ErrorKind::InvalidArgument,
          "noise word wider than the LFSR register");
  return Word(state_.begin() + cfg_.shift, state_.begin() + cfg_.shift + bits);
}

std::uint32_t Lfsr::noise_value(unsigned bits) {
  const Word rows = noise_rows(bits);
  const auto value = static_cast<std::uint32_t>(alu_.peek_value(rows, column_));
  step();
  return value;
}

std::uint32_t Lfsr::state() const { return static_cast<std::uint32_t>(alu_.peek_value(state_, column_)); }

}  // namespace cramsnn

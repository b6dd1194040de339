#pragma once

#include <cstdint>
#include <vector>

#include "cramsnn/alu.hpp"

namespace cramsnn {

/// Fibonacci LFSR parameters. Taps are 1-based exponents of the feedback
/// polynomial; the default x^9 + x^5 + 1 is primitive (period 511).
struct LfsrConfig {
  unsigned width = 9;
  std::vector<unsigned> taps{9, 5};
  std::uint32_t seed = 1;
  /// Noise words are taken from state bits [shift, shift + S).
  unsigned shift = 0;

  void validate() const;
};

/// Software reference step: shift left, feed back XOR of the tap bits into bit 0.
std::uint32_t lfsr_next(std::uint32_t state, const LfsrConfig& cfg);

/// In-array LFSR: XOR of the taps as four-NAND cells, then one COPY per bit.
class Lfsr {
 public:
  Lfsr(Alu& alu, LfsrConfig cfg, ColumnMask mask);

  /// One shift; charges 4 NAND per XOR plus `width` COPY gate events.
  std::uint32_t step();
  /// Current low bits r(t), then advances the register.
  std::uint32_t noise_value(unsigned bits);
  /// Rows holding the current noise word (valid until the next step).
  Word noise_rows(unsigned bits) const;

  std::uint32_t state() const;
  const LfsrConfig& config() const noexcept { return cfg_; }
  const Word& rows() const noexcept { return state_; }

 private:
  RowIndex xor_rows(RowIndex a, RowIndex b);

  Alu& alu_;
  LfsrConfig cfg_;
  ColumnMask mask_;
  std::size_t column_;
  Word state_;
};

}  // namespace cramsnn

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "otfs/types.hpp"

namespace otfs {

/// Square Gray-labelled QAM with unit average symbol energy.
///
/// The first half of each symbol's bits selects the in-phase level, the
/// second half the quadrature level; bit 0 maps to the positive side. For
/// 4-QAM this gives 00 -> (1+j)/sqrt2, 01 -> (1-j)/sqrt2, 11 -> (-1-j)/sqrt2,
/// 10 -> (-1+j)/sqrt2.
class QamConstellation {
 public:
  /// Supported orders: 4, 16, 64.
  explicit QamConstellation(int order = 4);

  int order() const noexcept { return order_; }
  int bits_per_symbol() const noexcept { return bits_; }
  /// Points indexed by their label read MSB-first from the bit group.
  const std::vector<Complex>& points() const noexcept { return points_; }

  /// Throws DimensionError unless bits.size() is a multiple of bits_per_symbol().
  CVector map(std::span<const std::uint8_t> bits) const;
  /// Minimum-distance hard decision.
  std::vector<std::uint8_t> demap(const CVector& symbols) const;

 private:
  double level(int gray_bits) const;
  int decide(double amplitude) const;

  int order_;
  int bits_;
  int side_;
  double scale_;
  std::vector<Complex> points_;
};

}  // namespace otfs

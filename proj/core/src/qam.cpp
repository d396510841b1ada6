#include "otfs/qam.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "otfs/error.hpp"

namespace otfs {

namespace {

int gray_to_binary(int g) {
  int b = 0;
  for (; g != 0; g >>= 1) b ^= g;
  return b;
}

int binary_to_gray(int b) { return b ^ (b >> 1); }

}  // namespace

QamConstellation::QamConstellation(int order) : order_(order) {
  if (order != 4 && order != 16 && order != 64) {
    throw InvariantError("qam_order", "supported orders are 4, 16 and 64, got " + std::to_string(order));
  }
  bits_ = static_cast<int>(std::lround(std::log2(order)));
  side_ = 1 << (bits_ / 2);
  scale_ = std::sqrt(2.0 * (side_ * side_ - 1) / 3.0);
  points_.resize(static_cast<std::size_t>(order));
  const int half = bits_ / 2;
  for (int label = 0; label < order; ++label) {
    const int i_bits = label >> half;
    const int q_bits = label & ((1 << half) - 1);
    points_[static_cast<std::size_t>(label)] = Complex(level(i_bits), level(q_bits));
  }
}

double QamConstellation::level(int gray_bits) const {
  const int position = gray_to_binary(gray_bits);
  return static_cast<double>((side_ - 1) - 2 * position) / scale_;
}

int QamConstellation::decide(double amplitude) const {
  if (!std::isfinite(amplitude)) return 0;
  const double pos = ((side_ - 1) - amplitude * scale_) / 2.0;
  const int nearest = std::clamp(static_cast<int>(std::lround(pos)), 0, side_ - 1);
  return binary_to_gray(nearest);
}

CVector QamConstellation::map(std::span<const std::uint8_t> bits) const {
  if (bits.size() % static_cast<std::size_t>(bits_) != 0) {
    throw DimensionError("bit count " + std::to_string(bits.size()) + " is not a multiple of " +
                         std::to_string(bits_));
  }
  CVector out(static_cast<Eigen::Index>(bits.size() / bits_));
  for (Eigen::Index s = 0; s < out.size(); ++s) {
    int label = 0;
    for (int b = 0; b < bits_; ++b) label = (label << 1) | (bits[static_cast<std::size_t>(s * bits_ + b)] & 1);
    out(s) = points_[static_cast<std::size_t>(label)];
  }
  return out;
}

std::vector<std::uint8_t> QamConstellation::demap(const CVector& symbols) const {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(symbols.size() * bits_));
  const int half = bits_ / 2;
  for (Eigen::Index s = 0; s < symbols.size(); ++s) {
    const int label = (decide(symbols(s).real()) << half) | decide(symbols(s).imag());
    for (int b = 0; b < bits_; ++b) {
      bits[static_cast<std::size_t>(s * bits_ + b)] = static_cast<std::uint8_t>((label >> (bits_ - 1 - b)) & 1);
    }
  }
  return bits;
}

}  // namespace otfs

#pragma once

#include <vector>

namespace otfs {

/// Integer tap offsets d = [D_1 .. D_P] of a circular tap-delay pattern on
/// an M-sample block. A matrix with this pattern has its nonzeros at
/// (i, (i - D_k) mod M): a lower band at the offsets plus a wrap-around
/// corner in the last D_P columns.
class DelayPattern {
 public:
  /// Offsets must be strictly increasing, non-negative and below M.
  DelayPattern(std::vector<int> offsets, int m);

  const std::vector<int>& offsets() const noexcept { return offsets_; }
  int dimension() const noexcept { return m_; }
  int path_count() const noexcept { return static_cast<int>(offsets_.size()); }
  int max_delay() const noexcept { return offsets_.back(); }
  /// First row of the trailing region, M - D_P. Rows above it factor
  /// with multipliers confined to the band offsets.
  int boundary() const noexcept { return m_ - offsets_.back(); }
  /// Segment bounds u = [d, M - D_P].
  std::vector<int> segments() const;
  /// True when D_1 == 0, i.e. the diagonal is part of the pattern.
  bool has_diagonal() const noexcept { return offsets_.front() == 0; }
  /// Column holding tap k in row i: (i - D_k) mod M.
  int column(int row, int tap) const noexcept {
    const int c = row - offsets_[static_cast<std::size_t>(tap)];
    return c < 0 ? c + m_ : c;
  }
  bool contains_offset(int offset) const noexcept;

  friend bool operator==(const DelayPattern&, const DelayPattern&) = default;

 private:
  std::vector<int> offsets_;
  int m_;
};

}  // namespace otfs

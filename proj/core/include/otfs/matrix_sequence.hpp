#pragma once

#include <cstddef>
#include <vector>

#include "otfs/grid.hpp"
#include "otfs/types.hpp"

namespace otfs {

/// An ordered set of N complex M x M matrices on a grid. Blocks are indexed
/// from zero (block n here is block n + 1 in one-based notation).
class MatrixSequence {
 public:
  MatrixSequence(const DdGrid& grid, std::vector<CMatrix> blocks);

  /// N zero blocks.
  static MatrixSequence zeros(const DdGrid& grid);
  /// Block 0 set to `first`, the rest zero.
  static MatrixSequence delta(const DdGrid& grid, const CMatrix& first);

  const DdGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  const CMatrix& operator[](std::size_t n) const { return blocks_[n]; }
  const std::vector<CMatrix>& blocks() const noexcept { return blocks_; }

  /// Largest entrywise magnitude difference against `other` (same grid).
  double max_abs_diff(const MatrixSequence& other) const;
  /// Sum of squared Frobenius norms of all blocks.
  double squared_norm() const;

 private:
  DdGrid grid_;
  std::vector<CMatrix> blocks_;
};

}  // namespace otfs

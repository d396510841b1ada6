#include "otfs/matrix_sequence.hpp"

#include <algorithm>
#include <string>

#include "otfs/error.hpp"

namespace otfs {

MatrixSequence::MatrixSequence(const DdGrid& grid, std::vector<CMatrix> blocks)
    : grid_(grid), blocks_(std::move(blocks)) {
  if (blocks_.size() != static_cast<std::size_t>(grid_.N())) {
    throw DimensionError("matrix sequence needs " + std::to_string(grid_.N()) + " blocks, got " +
                         std::to_string(blocks_.size()));
  }
  for (std::size_t n = 0; n < blocks_.size(); ++n) {
    if (blocks_[n].rows() != grid_.M() || blocks_[n].cols() != grid_.M()) {
      throw DimensionError("block " + std::to_string(n) + " is " + std::to_string(blocks_[n].rows()) +
                           "x" + std::to_string(blocks_[n].cols()) + ", expected " +
                           std::to_string(grid_.M()) + "x" + std::to_string(grid_.M()));
    }
  }
}

MatrixSequence MatrixSequence::zeros(const DdGrid& grid) {
  return MatrixSequence(grid, std::vector<CMatrix>(grid.N(), CMatrix::Zero(grid.M(), grid.M())));
}

MatrixSequence MatrixSequence::delta(const DdGrid& grid, const CMatrix& first) {
  std::vector<CMatrix> blocks(grid.N(), CMatrix::Zero(grid.M(), grid.M()));
  blocks[0] = first;
  return MatrixSequence(grid, std::move(blocks));
}

double MatrixSequence::max_abs_diff(const MatrixSequence& other) const {
  if (other.size() != size() || other.grid().M() != grid_.M()) {
    throw DimensionError("max_abs_diff: sequences have different shapes");
  }
  double worst = 0.0;
  for (std::size_t n = 0; n < blocks_.size(); ++n) {
    worst = std::max(worst, (blocks_[n] - other.blocks_[n]).cwiseAbs().maxCoeff());
  }
  return worst;
}

double MatrixSequence::squared_norm() const {
  double total = 0.0;
  for (const auto& b : blocks_) total += b.squaredNorm();
  return total;
}

}  // namespace otfs

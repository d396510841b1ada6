#include "otfs/transforms.hpp"

#include <cmath>
#include <string>

#include "otfs/error.hpp"
#include "otfs/op_counter.hpp"

namespace otfs {

using fft::Direction;

namespace {

// Applies the unitary M-point transform down every column and the unitary
// N-point transform along every row of a column-major M x N matrix.
CMatrix transform_2d(CMatrix data, Direction column_dir, Direction row_dir) {
  const int m = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  fft::transform_batch(data.data(), m, n, 1, m, column_dir);
  fft::transform_batch(data.data(), n, m, m, 1, row_dir);
  data *= 1.0 / std::sqrt(static_cast<double>(m) * n);
  return data;
}

}  // namespace

TfFrame isfft(const DdFrame& frame) {
  return TfFrame(frame.grid(), transform_2d(frame.data(), Direction::Forward, Direction::Inverse));
}

DdFrame sfft(const TfFrame& frame) {
  return DdFrame(frame.grid(), transform_2d(frame.data(), Direction::Inverse, Direction::Forward));
}

CVector vectorize(const DdFrame& frame) { return frame.data().reshaped(); }

DdFrame devectorize(const CVector& v, const DdGrid& grid) {
  if (v.size() != grid.size()) {
    throw DimensionError("devectorize: vector length " + std::to_string(v.size()) + " != N*M = " +
                         std::to_string(grid.size()));
  }
  return DdFrame(grid, v.reshaped(grid.M(), grid.N()));
}

namespace detail {

void transform_sequence(std::vector<CMatrix>& blocks, Direction dir, double scale) {
  const int n = static_cast<int>(blocks.size());
  if (n == 0) return;
  const Eigen::Index rows = blocks[0].rows();
  const Eigen::Index cols = blocks[0].cols();
  const int positions = static_cast<int>(rows * cols);
  const double factor = scale / std::sqrt(static_cast<double>(n));
  if (n == 1) {
    if (factor != 1.0) blocks[0] *= factor;
    return;
  }
  // Pack as positions x N with the sequence index as the slow axis, so each
  // matrix position is a length-N sequence with stride `positions`.
  std::vector<Complex> packed(static_cast<std::size_t>(positions) * n);
  for (int b = 0; b < n; ++b) {
    if (blocks[b].rows() != rows || blocks[b].cols() != cols) {
      throw DimensionError("transform_sequence: blocks differ in shape");
    }
    std::copy(blocks[b].data(), blocks[b].data() + positions, packed.data() + static_cast<std::size_t>(b) * positions);
  }
  fft::transform_batch(packed.data(), n, positions, positions, 1, dir);
  for (int b = 0; b < n; ++b) {
    const Complex* src = packed.data() + static_cast<std::size_t>(b) * positions;
    for (int i = 0; i < positions; ++i) blocks[b].data()[i] = src[i] * factor;
  }
}

void transform_segments(CVector& v, int m, int n, Direction dir) {
  if (v.size() != static_cast<Eigen::Index>(m) * n) {
    throw DimensionError("transform_segments: vector length does not match N*M");
  }
  if (n == 1) return;
  fft::transform_batch(v.data(), n, m, m, 1, dir);
  v *= 1.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace detail

MatrixSequence fft_mtx(const MatrixSequence& seq) {
  std::vector<CMatrix> blocks = seq.blocks();
  detail::transform_sequence(blocks, Direction::Forward);
  return MatrixSequence(seq.grid(), std::move(blocks));
}

MatrixSequence ifft_mtx(const MatrixSequence& seq) {
  std::vector<CMatrix> blocks = seq.blocks();
  detail::transform_sequence(blocks, Direction::Inverse);
  return MatrixSequence(seq.grid(), std::move(blocks));
}

CMatrix block_circ_assemble(const MatrixSequence& generators) {
  const int m = generators.grid().M();
  const int n = generators.grid().N();
  ops::note_dense_materialization(static_cast<std::uint64_t>(m) * n);
  CMatrix dense(static_cast<Eigen::Index>(m) * n, static_cast<Eigen::Index>(m) * n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      dense.block(static_cast<Eigen::Index>(i) * m, static_cast<Eigen::Index>(k) * m, m, m) =
          generators[static_cast<std::size_t>(((k - i) % n + n) % n)];
    }
  }
  return dense;
}

}  // namespace otfs

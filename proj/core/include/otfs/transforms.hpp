#pragma once

#include <vector>

#include "otfs/fft.hpp"
#include "otfs/grid.hpp"
#include "otfs/matrix_sequence.hpp"
#include "otfs/types.hpp"

namespace otfs {

// All M- and N-point DFT matrices are unitary: [F]_{i,p} = e^{-j2pi ip/K}/sqrt(K).

/// X_TF = F_M X_DD F_N^H.
TfFrame isfft(const DdFrame& frame);
/// Y_DD = F_M^H R_TF F_N. Inverse of isfft.
DdFrame sfft(const TfFrame& frame);

/// Column-wise stacking: entry (m, n) lands at index n * M + m.
CVector vectorize(const DdFrame& frame);
/// Inverse of vectorize. Throws DimensionError unless v.size() == NM.
DdFrame devectorize(const CVector& v, const DdGrid& grid);

/// Output block t = (1/sqrt(N)) sum_n e^{-j2pi tn/N} input block n, computed
/// as M^2 length-N FFTs (one per matrix position).
MatrixSequence fft_mtx(const MatrixSequence& seq);
/// Exact inverse of fft_mtx.
MatrixSequence ifft_mtx(const MatrixSequence& seq);

/// Dense NM x NM block-circulant matrix whose block (i, k) is
/// generators[(k - i) mod N]. Intended for oracles and small instances.
CMatrix block_circ_assemble(const MatrixSequence& generators);

namespace detail {

/// Unitary DFT across the sequence index of equally shaped blocks, in place.
/// Blocks may be any shape; `scale` multiplies the unitary result.
void transform_sequence(std::vector<CMatrix>& blocks, fft::Direction dir, double scale = 1.0);

/// Unitary DFT across the N length-M segments of a vectorized frame, in
/// place: segment t <- (1/sqrt(N)) sum_n e^{-+j2pi tn/N} segment n.
void transform_segments(CVector& v, int m, int n, fft::Direction dir);

}  // namespace detail

}  // namespace otfs

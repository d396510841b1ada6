#pragma once

#include <cstdint>
#include <vector>

#include "otfs/delay_pattern.hpp"
#include "otfs/matrix_sequence.hpp"
#include "otfs/types.hpp"

namespace otfs {

/// Factors and intermediate solution of the pivot-free structured LU.
struct LuWorkspace {
  /// Unit lower-triangular multipliers (L). In rows above the trailing
  /// region the only off-diagonal entries sit at the band offsets.
  CMatrix multipliers;
  /// Upper factor (U). Rows above the trailing region hold the diagonal plus
  /// the last D_P columns; the trailing D_P x D_P corner is dense.
  CMatrix upper;
  /// L^{-1}, filled by structured_invert.
  CMatrix forward;
  /// max|U| / max|S|.
  double upper_growth = 1.0;
  /// max|L^{-1}|.
  double forward_growth = 1.0;
};

struct StructuredOptions {
  /// Pivots below this magnitude abort the factorization.
  double pivot_tolerance = 1e-14;
  /// Blocks whose upper_growth * forward_growth exceeds this are refactored
  /// with the pivoted band LU instead.
  double growth_limit = 1e6;
};

/// Pivot-free LU of a matrix whose nonzeros follow `pattern`. Entries of `s`
/// outside the pattern are ignored. Requires D_1 == 0 (diagonal present).
/// Throws SingularMatrixError carrying the elimination step on a pivot below
/// the tolerance. Cost O(M P D_P + D_P^3).
LuWorkspace structured_lu(const CMatrix& s, const DelayPattern& pattern, const StructuredOptions& options = {});

/// S^{-1} from a finished factorization: structured forward substitution
/// against the identity, then back substitution over the sparse U rows.
/// Cost O(M^2 D_P).
CMatrix structured_invert(LuWorkspace& workspace, const DelayPattern& pattern);
CMatrix structured_invert(const CMatrix& s, const DelayPattern& pattern, const StructuredOptions& options = {});

/// S^{-1} by LU with row interchanges restricted to the D_P + 1 rows that
/// can hold a nonzero in the pivot column. U keeps an upper bandwidth of
/// 2 D_P plus the last D_P columns, so the cost stays O(M^2 D_P) while the
/// element growth is that of partial pivoting. Reads only pattern entries;
/// any D_1 is accepted. Throws SingularMatrixError carrying the step.
CMatrix pivoted_band_invert(const CMatrix& s, const DelayPattern& pattern, double pivot_tolerance = 1e-14);

/// True when every entry of `s` off the pattern is exactly zero.
bool conforms_to(const CMatrix& s, const DelayPattern& pattern);

/// Result of inverting a block-circulant operator in the transformed domain.
struct BlockCirculantInverse {
  /// Generators {B_q} of the inverse, same index law as the input.
  MatrixSequence generators;
  /// S_t^{-1}, the block-diagonal form of the inverse.
  std::vector<CMatrix> spectral_inverse;
  /// Blocks inverted by the pivot-free structured LU.
  int structured_blocks = 0;
  /// Blocks the pivot-free LU rejected, inverted by pivoted_band_invert.
  int pivoted_blocks = 0;
  int dense_blocks = 0;
};

/// S_t = sqrt(N) fft_mtx(generators)_t. For block (i, k) = G_{(k - i) mod N}
/// this is exactly the diagonalization (F_N^H (x) I) G (F_N (x) I).
std::vector<CMatrix> block_diagonalize(const MatrixSequence& generators);
/// Inverse of block_diagonalize: generators = ifft_mtx(S) / sqrt(N).
MatrixSequence from_block_diagonal(const DdGrid& grid, std::vector<CMatrix> spectral);

/// Inverts each S_t and transforms back. With a `pattern` that S_t follows,
/// the pivot-free structured LU runs first; a pivot breakdown or growth
/// above the limit reroutes the block to pivoted_band_invert. Blocks off the
/// pattern use dense pivoted inversion. Throws SingularMatrixError naming t.
BlockCirculantInverse invert_block_circulant(const MatrixSequence& generators, const DelayPattern* pattern,
                                             const StructuredOptions& options = {});

MatrixSequence block_circ_inverse(const MatrixSequence& generators);
MatrixSequence block_circ_inverse(const MatrixSequence& generators, const DelayPattern& pattern);

/// Partial-pivoting dense inverse with residual max|A A^{-1} - I|.
struct DenseInverse {
  CMatrix inverse;
  double residual = 0.0;
  double condition_estimate = 0.0;
};

/// Reference inversion. Throws SizeGuardError above `max_dimension` and
/// SingularMatrixError (with a condition estimate) when numerically singular.
DenseInverse dense_inverse_oracle(const CMatrix& a, int max_dimension = 4096);

/// Same inversion without the residual check; charged 4/3 K^3 multiplies.
CMatrix dense_inverse(const CMatrix& a);

/// Multiplies charged for one dense K x K LU-based inversion.
std::uint64_t dense_inverse_mults(std::uint64_t k);

}  // namespace otfs

#pragma once

#include <vector>

#include "otfs/channel.hpp"
#include "otfs/delay_pattern.hpp"
#include "otfs/grid.hpp"
#include "otfs/matrix_sequence.hpp"
#include "otfs/struct_linalg.hpp"
#include "otfs/types.hpp"

namespace otfs {

/// A block-circulant linear equalizer held as its generators plus the
/// block-diagonal form used to apply it without NM x NM storage.
class BlockCirculantEqualizer {
 public:
  BlockCirculantEqualizer(MatrixSequence generators, std::vector<CMatrix> spectral);

  const DdGrid& grid() const noexcept { return generators_.grid(); }
  /// Generators W_0 .. W_{N-1}; block (i, k) of the operator is W_{(k-i) mod N}.
  const MatrixSequence& generators() const noexcept { return generators_; }
  /// Block-diagonal form, block t = sqrt(N) fft_mtx(generators)_t.
  const std::vector<CMatrix>& spectral() const noexcept { return spectral_; }

  /// W y via N-segment transforms and N dense M x M products.
  CVector apply(const CVector& y) const;
  /// Assembled NM x NM matrix (tests and oracles only).
  CMatrix dense() const;

 private:
  MatrixSequence generators_;
  std::vector<CMatrix> spectral_;
};

/// W_ZF = circ{B_0 .. B_{N-1}} = H_eff^{-1}.
class ZfEqualizer : public BlockCirculantEqualizer {
 public:
  ZfEqualizer(MatrixSequence generators, std::vector<CMatrix> spectral, int structured_blocks);
  /// Number of S_t inverted by the pivot-free structured LU; the rest went
  /// through the pivoted band LU.
  int structured_blocks() const noexcept { return structured_blocks_; }

 private:
  int structured_blocks_;
};

/// W_MMSE = circ{W~_0 .. W~_{N-1}} = (H^H H + sigma^2 I)^{-1} H^H.
class MmseEqualizer : public BlockCirculantEqualizer {
 public:
  MmseEqualizer(MatrixSequence generators, std::vector<CMatrix> spectral, double sigma2);
  double noise_variance() const noexcept { return sigma2_; }

 private:
  double sigma2_;
};

/// Inverts the effective channel block by block in the transformed domain;
/// S_t equals H~_t, so the structured LU applies. Never forms NM x NM data.
/// Throws SingularMatrixError naming t for a non-invertible channel.
ZfEqualizer zf_build(const EffectiveChannel& channel, const DelayPattern& pattern,
                     const StructuredOptions& options = {});
CVector zf_apply(const ZfEqualizer& eq, const CVector& y);

struct MmseOptions {
  /// Mutation hook: index A^H with (k - i) instead of (i - k) in the
  /// generator sum. Produces a wrong equalizer; used by the verify suite.
  bool flip_conjugate_index = false;
};

/// Forms the blocks S_t^H S_t + sigma^2 I of C = H^H H + sigma^2 I, inverts
/// them, transforms back to the generators C_i^{-1}, then
/// W~_k = sum_i C_i^{-1} A^H_{(i-k) mod N}. The A_n share the channel tap
/// pattern, so each product costs O(M^2 P) when `pattern` matches it.
MmseEqualizer mmse_build(const EffectiveChannel& channel, double sigma2, const DelayPattern& pattern,
                         const MmseOptions& options = {});
CVector mmse_apply(const MmseEqualizer& eq, const CVector& y);

/// Dense reference equalizer W applied as a plain matrix-vector product.
class DenseEqualizer {
 public:
  explicit DenseEqualizer(CMatrix w) : w_(std::move(w)) {}
  const CMatrix& matrix() const noexcept { return w_; }
  CVector apply(const CVector& y) const;

 private:
  CMatrix w_;
};

/// W = H^{-1} by dense pivoted inversion, O((NM)^3).
DenseEqualizer direct_zf_build(const CMatrix& heff);
/// W = (H^H H + sigma^2 I)^{-1} H^H by dense inversion.
DenseEqualizer direct_mmse_build(const CMatrix& heff, double sigma2);

CVector direct_zf_oracle(const CMatrix& heff, const CVector& y);
CVector direct_mmse_oracle(const CMatrix& heff, double sigma2, const CVector& y);

/// Equalizer that trusts the doubly circulant ideal-waveform channel. The
/// channel is diagonalized by a 2-D DFT, so each bin is a scalar gain.
class IdealEqualizer {
 public:
  IdealEqualizer(const DdGrid& grid, CMatrix bin_gains);
  const DdGrid& grid() const noexcept { return grid_; }
  /// M x N per-bin equalizer gains.
  const CMatrix& bin_gains() const noexcept { return gains_; }
  CVector apply(const CVector& y) const;

 private:
  DdGrid grid_;
  CMatrix gains_;
};

/// Throws SingularMatrixError when a DFT bin of H_DD vanishes.
IdealEqualizer ideal_zf_build(const MismatchChannel& channel);
IdealEqualizer ideal_mmse_build(const MismatchChannel& channel, double sigma2);

}  // namespace otfs

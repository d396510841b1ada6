#pragma once

#include <cstdint>
#include <vector>

#include "otfs/delay_pattern.hpp"
#include "otfs/grid.hpp"
#include "otfs/matrix_sequence.hpp"
#include "otfs/types.hpp"

namespace otfs {

/// Power-delay profile quantized to integer sample positions.
class DelayProfile {
 public:
  /// Taps given directly in samples. `cp_length` 0 selects D_P + 1.
  static DelayProfile from_taps(std::vector<int> taps, std::vector<double> powers_db, int cp_length = 0);

  /// Delays in seconds quantized by ceiling at `sample_rate_hz`. Rejects
  /// delays that collide on the same sample position.
  static DelayProfile from_delays(const std::vector<double>& delays_s, std::vector<double> powers_db,
                                  double sample_rate_hz, int cp_length = 0);

  /// ITU-R vehicular-B quantized at the full-scale rate of 64 x 15 kHz:
  /// d = [0, 1, 9, 13, 17, 20], L_cp = 21. The tap positions do not change
  /// with the grid, so small grids are rejected by `pattern()`.
  static DelayProfile vehicular_b();

  /// ITU-R vehicular-B quantized at the grid's own rate M * delta_f. Paths
  /// that land on the same sample are merged and their powers summed.
  static DelayProfile vehicular_b_scaled(const DdGrid& grid);

  const std::vector<int>& taps() const noexcept { return taps_; }
  const std::vector<double>& powers_db() const noexcept { return powers_db_; }
  int path_count() const noexcept { return static_cast<int>(taps_.size()); }
  int max_delay() const noexcept { return taps_.back(); }
  int cp_length() const noexcept { return cp_length_; }

  /// Linear path variances scaled to sum to one.
  std::vector<double> normalized_powers() const;

  /// The tap pattern on `grid`. Throws InvariantError naming D_P < M when
  /// the profile does not fit.
  DelayPattern pattern(const DdGrid& grid) const;

  /// ITU-R vehicular-B path delays (seconds) and powers (dB).
  static const std::vector<double>& vehicular_b_delays();
  static const std::vector<double>& vehicular_b_powers_db();

 private:
  DelayProfile(std::vector<int> taps, std::vector<double> powers_db, int cp_length);

  std::vector<int> taps_;
  std::vector<double> powers_db_;
  int cp_length_;
};

/// Per-path gain and Doppler shift for one channel draw.
struct PathRealization {
  std::vector<Complex> gains;
  std::vector<double> doppler_hz;
};

/// g_k ~ CN(0, p_k) with p_k the normalized profile powers; Doppler uniform
/// on [-f_max, f_max]. Deterministic in `seed`.
PathRealization draw_realization(const DelayProfile& profile, double f_max, std::uint64_t seed);

/// Per-OFDM-symbol time-domain channel blocks H~_p after CP removal.
///
/// Block p is stored as an M x P array of tap values: entry (m, k) is
/// [H~_p]_{m, (m - D_k) mod M}. All other entries of H~_p are zero.
class TimeVaryingChannel {
 public:
  TimeVaryingChannel(const DdGrid& grid, DelayPattern pattern, int cp_length, std::vector<CMatrix> taps);

  const DdGrid& grid() const noexcept { return grid_; }
  const DelayPattern& pattern() const noexcept { return pattern_; }
  int cp_length() const noexcept { return cp_length_; }
  const std::vector<CMatrix>& taps() const noexcept { return taps_; }

  CMatrix dense_block(int p) const;
  MatrixSequence dense_blocks() const;
  /// H~_p s for one length-M segment, O(MP).
  CVector apply_block(int p, const CVector& segment) const;
  /// Block-diagonal H~ applied to a length-NM time-domain vector.
  CVector apply(const CVector& signal) const;

 private:
  DdGrid grid_;
  DelayPattern pattern_;
  int cp_length_;
  std::vector<CMatrix> taps_;
};

/// Sample m of OFDM symbol p (0-based) is taken at absolute time index
/// q = p (M + L_cp) + L_cp + m + 1, counting discarded CP samples;
/// tap k carries g_k e^{j 2 pi nu_k q T_s}.
TimeVaryingChannel build_time_domain(const PathRealization& realization, const DelayProfile& profile,
                                     const DdGrid& grid);

/// Block-circulant effective channel circ{A_0 .. A_{N-1}}, block (i, k) =
/// A_{(k - i) mod N}. Every A_n shares the tap pattern of the channel, so
/// the generators are also kept in the compact M x P tap form.
class EffectiveChannel {
 public:
  EffectiveChannel(const DdGrid& grid, DelayPattern pattern, std::vector<CMatrix> tap_generators);

  const DdGrid& grid() const noexcept { return grid_; }
  const DelayPattern& pattern() const noexcept { return pattern_; }
  const std::vector<CMatrix>& tap_generators() const noexcept { return tap_generators_; }
  const MatrixSequence& generators() const noexcept { return generators_; }
  /// block_circ_assemble(generators()).
  CMatrix dense() const;

 private:
  DdGrid grid_;
  DelayPattern pattern_;
  std::vector<CMatrix> tap_generators_;
  MatrixSequence generators_;
};

/// A_n = (1/N) sum_p e^{+j2pi pn/N} H~_p, i.e. the unitary IFFT_Mtx of the
/// channel blocks scaled by 1/sqrt(N). O(MP N log N).
EffectiveChannel heff_rect_generators(const TimeVaryingChannel& channel);

/// Dense (F_N (x) I_M) H~ (F_N^H (x) I_M) formed by explicit products.
/// Throws SizeGuardError when NM > max_dimension.
CMatrix heff_rect_direct(const TimeVaryingChannel& channel, int max_dimension = 4096);

/// Doubly circulant channel assumed under the ideal-waveform model.
class MismatchChannel {
 public:
  MismatchChannel(const DdGrid& grid, CMatrix h_dd);

  const DdGrid& grid() const noexcept { return grid_; }
  /// M x N; column n is the n-th length-M segment of the first column of
  /// the rectangular effective channel.
  const CMatrix& h_dd() const noexcept { return h_dd_; }
  /// circ{circ{h_1}, ..., circ{h_N}}: block (i, k) = circ{h_{(i-k) mod N}}.
  CMatrix dense(int max_dimension = 4096) const;

 private:
  DdGrid grid_;
  CMatrix h_dd_;
};

MismatchChannel heff_ideal_mismatch(const EffectiveChannel& effective);

}  // namespace otfs

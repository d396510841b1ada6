#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "otfs/channel.hpp"
#include "otfs/grid.hpp"
#include "otfs/types.hpp"

namespace otfs {

enum class EqualizerKind { ZfLow, ZfDirect, MmseLow, MmseDirect, IdealMismatchZf, IdealMismatchMmse };

/// "zf_low", "zf_direct", "mmse_low", "mmse_direct", "ideal_mismatch_zf", "ideal_mismatch_mmse".
std::string_view equalizer_name(EqualizerKind kind);
std::optional<EqualizerKind> parse_equalizer_name(std::string_view name);
bool is_direct(EqualizerKind kind);

/// Which delay profile to use; resolved against the grid by `resolve()`.
struct ProfileSelection {
  /// "vehicular_b", "vehicular_b_scaled" or "custom".
  std::string name = "vehicular_b";
  /// Custom profiles only: tap positions in samples and powers in dB.
  std::vector<int> taps;
  std::vector<double> powers_db;
  /// 0 selects D_P + 1.
  int cp_length = 0;

  DelayProfile resolve(const DdGrid& grid) const;
};

struct BenchSettings {
  /// Values used for both M and N; the grid is their cross product.
  std::vector<int> sizes{8, 16, 32, 64};
  int repetitions = 5;
  /// Dense baselines above this NM are reported as skipped.
  int dense_max_nm = 1024;
  double sigma2 = 0.1;
};

struct VerifySettings {
  /// Flip the A^H index in the MMSE generator sum (mutation self-test).
  bool inject_mmse_index_fault = false;
  /// Frames used by the mismatch-degradation property.
  int mismatch_frames = 400;
};

/// One experiment. Defaults reproduce the full-scale setup: 15 kHz spacing,
/// M = 64, N = 32, vehicular-B, f_max = 1 kHz, 4-QAM, 20000 frames.
struct SimConfig {
  DdGrid grid{64, 32, 15e3};
  ProfileSelection profile;
  double f_max_hz = 1000.0;
  std::vector<double> snr_db{5.0, 10.0, 15.0};
  int frames = 20000;
  std::uint64_t seed = 1;
  std::vector<EqualizerKind> equalizers{EqualizerKind::ZfLow, EqualizerKind::MmseLow,
                                        EqualizerKind::IdealMismatchZf, EqualizerKind::IdealMismatchMmse};
  int qam_order = 4;
  /// Record the largest low-vs-direct output deviation when both variants run.
  bool check_oracles = false;
  /// Worker threads for the frame loop; never changes results.
  int jobs = 1;
  BenchSettings bench;
  VerifySettings verify;

  DelayProfile delay_profile() const { return profile.resolve(grid); }
  /// Throws InvariantError naming the offending field.
  void validate() const;
};

/// sigma^2 = 10^(-snr_db / 10) for unit-energy symbols and channel.
double noise_variance(double snr_db);

struct BerRecord {
  EqualizerKind equalizer = EqualizerKind::ZfLow;
  double snr_db = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  std::uint64_t frames = 0;
  std::uint64_t skipped = 0;
  double wall_ms = 0.0;
  std::uint64_t mult_count = 0;

  double ber() const { return bits == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(bits); }
};

struct SweepResult {
  std::vector<BerRecord> records;
  /// Largest max|x_low - x_direct| / max|x_direct| seen, when check_oracles
  /// is set and both variants of a family ran.
  std::optional<double> zf_oracle_deviation;
  std::optional<double> mmse_oracle_deviation;

  const BerRecord* find(EqualizerKind kind, double snr_db) const;
};

/// H_eff x through the factored form (F_N (x) I) H~ (F_N^H (x) I):
/// N-point transforms plus sparse block products, O(NM log N + NMP).
CVector propagate_frame(const CVector& x, const TimeVaryingChannel& channel);

/// y = H_eff vec(x) + w with w ~ CN(0, sigma2 I).
CVector transmit_frame(const DdFrame& x, const TimeVaryingChannel& channel, double sigma2, std::mt19937_64& rng);

/// The channel drawn for `frame` of a sweep over `config`.
TimeVaryingChannel frame_channel(const SimConfig& config, const DelayProfile& profile, std::uint64_t frame);

/// Monte-Carlo BER sweep. Channel, data and unit noise are keyed by
/// (seed, frame) and shared by every equalizer and SNR point. Frames whose
/// equalizer construction is singular are counted in `skipped`.
SweepResult run_ber_sweep(const SimConfig& config);

/// Comment-line config echo, a header row, then one row per record:
/// equalizer,snr_db,bits,errors,ber,frames,skipped,wall_ms,mult_count.
void write_ber_csv(std::ostream& out, const SimConfig& config, const SweepResult& result);

// Complexity accounting

struct ComplexityRow {
  std::string scheme;
  int m = 0;
  int n = 0;
  int p = 0;
  /// Empty when the dense guard skipped the row.
  std::optional<std::uint64_t> mult_count;
  std::optional<double> wall_ms;
  double analytic = 0.0;
};

/// Textbook costs: (NM)^3, M^2 N log2 N and M^2 N^2 P.
double analytic_direct(int m, int n);
double analytic_zf(int m, int n);
double analytic_mmse(int m, int n, int p);

struct HeadlineRatios {
  double zf = 0.0;
  double mmse = 0.0;
};
HeadlineRatios headline_ratios(int m, int n, int p);

struct ComplexityOptions {
  int repetitions = 5;
  int dense_max_nm = 1024;
  double sigma2 = 0.1;
  double f_max_hz = 1000.0;
  std::uint64_t seed = 1;
};

/// Measured build+apply multiply counts and median wall time for
/// zf_structured, mmse_structured, zf_direct and mmse_direct on one grid.
std::vector<ComplexityRow> complexity_report(const DdGrid& grid, const DelayProfile& profile,
                                             const ComplexityOptions& options);

/// scheme,M,N,P,mult_count,wall_ms,analytic_formula_value
void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows);

}  // namespace otfs

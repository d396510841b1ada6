#include "otfs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "otfs/error.hpp"
#include "otfs/op_counter.hpp"
#include "otfs/transforms.hpp"

namespace otfs {

namespace {

constexpr double kFullScaleSampleRate = 64 * 15e3;

int quantize_ceil(double delay_s, double sample_rate_hz) {
  // The small slack keeps exact multiples of the sample period on their own bin.
  return static_cast<int>(std::ceil(delay_s * sample_rate_hz - 1e-9));
}

void check_guard(int dimension, int max_dimension) {
  if (dimension > max_dimension) {
    throw SizeGuardError(static_cast<std::size_t>(dimension), static_cast<std::size_t>(max_dimension));
  }
}

}  // namespace

// DelayProfile

DelayProfile::DelayProfile(std::vector<int> taps, std::vector<double> powers_db, int cp_length)
    : taps_(std::move(taps)), powers_db_(std::move(powers_db)), cp_length_(cp_length) {
  if (taps_.empty()) throw InvariantError("P", "profile needs at least one path");
  if (taps_.size() != powers_db_.size()) {
    throw InvariantError("powers_db", "expected one power per path (" + std::to_string(taps_.size()) + ")");
  }
  if (taps_.front() < 0) throw InvariantError("D_1", "delay positions must be non-negative");
  for (std::size_t k = 1; k < taps_.size(); ++k) {
    if (taps_[k] <= taps_[k - 1]) {
      throw InvariantError("d", "delay positions must be strictly increasing and distinct after rounding");
    }
  }
  for (double p : powers_db_) {
    if (!std::isfinite(p)) throw InvariantError("powers_db", "path powers must be finite");
  }
  if (cp_length_ == 0) cp_length_ = taps_.back() + 1;
  if (cp_length_ < taps_.back() + 1) {
    throw InvariantError("L_cp", "cyclic prefix length " + std::to_string(cp_length_) +
                                     " must exceed the maximum delay D_P = " + std::to_string(taps_.back()));
  }
}

DelayProfile DelayProfile::from_taps(std::vector<int> taps, std::vector<double> powers_db, int cp_length) {
  return DelayProfile(std::move(taps), std::move(powers_db), cp_length);
}

DelayProfile DelayProfile::from_delays(const std::vector<double>& delays_s, std::vector<double> powers_db,
                                       double sample_rate_hz, int cp_length) {
  for (std::size_t k = 1; k < delays_s.size(); ++k) {
    if (!(delays_s[k] > delays_s[k - 1])) throw InvariantError("delays_s", "delays must be strictly increasing");
  }
  std::vector<int> taps;
  taps.reserve(delays_s.size());
  for (double tau : delays_s) taps.push_back(quantize_ceil(tau, sample_rate_hz));
  return DelayProfile(std::move(taps), std::move(powers_db), cp_length);
}

const std::vector<double>& DelayProfile::vehicular_b_delays() {
  static const std::vector<double> delays{0.0, 0.3e-6, 8.9e-6, 12.9e-6, 17.1e-6, 20.0e-6};
  return delays;
}

const std::vector<double>& DelayProfile::vehicular_b_powers_db() {
  static const std::vector<double> powers{-2.5, 0.0, -12.8, -10.0, -25.2, -16.0};
  return powers;
}

DelayProfile DelayProfile::vehicular_b() {
  return from_delays(vehicular_b_delays(), vehicular_b_powers_db(), kFullScaleSampleRate);
}

DelayProfile DelayProfile::vehicular_b_scaled(const DdGrid& grid) {
  const double rate = grid.M() * grid.subcarrier_spacing();
  std::map<int, double> merged;
  const auto& delays = vehicular_b_delays();
  const auto& powers = vehicular_b_powers_db();
  for (std::size_t k = 0; k < delays.size(); ++k) {
    merged[quantize_ceil(delays[k], rate)] += std::pow(10.0, powers[k] / 10.0);
  }
  std::vector<int> taps;
  std::vector<double> powers_db;
  for (const auto& [tap, linear] : merged) {
    taps.push_back(tap);
    powers_db.push_back(10.0 * std::log10(linear));
  }
  return DelayProfile(std::move(taps), std::move(powers_db), 0);
}

std::vector<double> DelayProfile::normalized_powers() const {
  std::vector<double> linear;
  linear.reserve(powers_db_.size());
  double total = 0.0;
  for (double p : powers_db_) {
    linear.push_back(std::pow(10.0, p / 10.0));
    total += linear.back();
  }
  for (double& v : linear) v /= total;
  return linear;
}

DelayPattern DelayProfile::pattern(const DdGrid& grid) const { return DelayPattern(taps_, grid.M()); }

// Realizations

PathRealization draw_realization(const DelayProfile& profile, double f_max, std::uint64_t seed) {
  if (!(f_max >= 0.0)) throw InvariantError("f_max", "maximum Doppler must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-f_max, f_max);

  PathRealization out;
  for (double variance : profile.normalized_powers()) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    out.gains.emplace_back(s * re, s * im);
    out.doppler_hz.push_back(f_max > 0.0 ? uniform(rng) : 0.0);
  }
  return out;
}

// TimeVaryingChannel

TimeVaryingChannel::TimeVaryingChannel(const DdGrid& grid, DelayPattern pattern, int cp_length,
                                       std::vector<CMatrix> taps)
    : grid_(grid), pattern_(std::move(pattern)), cp_length_(cp_length), taps_(std::move(taps)) {
  if (pattern_.dimension() != grid_.M()) throw DimensionError("channel pattern dimension differs from M");
  if (taps_.size() != static_cast<std::size_t>(grid_.N())) {
    throw DimensionError("channel needs N = " + std::to_string(grid_.N()) + " blocks");
  }
  for (const auto& t : taps_) {
    if (t.rows() != grid_.M() || t.cols() != pattern_.path_count()) {
      throw DimensionError("channel tap block must be M x P");
    }
  }
}

CMatrix TimeVaryingChannel::dense_block(int p) const {
  const int m_count = grid_.M();
  CMatrix block = CMatrix::Zero(m_count, m_count);
  const CMatrix& t = taps_[static_cast<std::size_t>(p)];
  for (int m = 0; m < m_count; ++m) {
    for (int k = 0; k < pattern_.path_count(); ++k) block(m, pattern_.column(m, k)) = t(m, k);
  }
  return block;
}

MatrixSequence TimeVaryingChannel::dense_blocks() const {
  std::vector<CMatrix> blocks;
  blocks.reserve(taps_.size());
  for (int p = 0; p < grid_.N(); ++p) blocks.push_back(dense_block(p));
  return MatrixSequence(grid_, std::move(blocks));
}

CVector TimeVaryingChannel::apply_block(int p, const CVector& segment) const {
  const int m_count = grid_.M();
  if (segment.size() != m_count) throw DimensionError("apply_block: segment length must be M");
  const CMatrix& t = taps_[static_cast<std::size_t>(p)];
  CVector out = CVector::Zero(m_count);
  for (int m = 0; m < m_count; ++m) {
    Complex acc{};
    for (int k = 0; k < pattern_.path_count(); ++k) acc += t(m, k) * segment(pattern_.column(m, k));
    out(m) = acc;
  }
  ops::add_mults(static_cast<std::uint64_t>(m_count) * pattern_.path_count());
  return out;
}

CVector TimeVaryingChannel::apply(const CVector& signal) const {
  const int m_count = grid_.M();
  if (signal.size() != grid_.size()) throw DimensionError("apply: signal length must be N*M");
  CVector out(signal.size());
  for (int p = 0; p < grid_.N(); ++p) {
    out.segment(static_cast<Eigen::Index>(p) * m_count, m_count) =
        apply_block(p, signal.segment(static_cast<Eigen::Index>(p) * m_count, m_count));
  }
  return out;
}

TimeVaryingChannel build_time_domain(const PathRealization& realization, const DelayProfile& profile,
                                     const DdGrid& grid) {
  DelayPattern pattern = profile.pattern(grid);
  const int p_count = profile.path_count();
  if (realization.gains.size() != static_cast<std::size_t>(p_count) ||
      realization.doppler_hz.size() != static_cast<std::size_t>(p_count)) {
    throw DimensionError("realization path count does not match profile");
  }
  const int m_count = grid.M();
  const int cp = profile.cp_length();
  const double ts = grid.sample_period();

  std::vector<CMatrix> taps(static_cast<std::size_t>(grid.N()), CMatrix(m_count, p_count));
  for (int p = 0; p < grid.N(); ++p) {
    for (int m = 0; m < m_count; ++m) {
      const double q = static_cast<double>(p) * (m_count + cp) + cp + m + 1;
      for (int k = 0; k < p_count; ++k) {
        const double phase = 2.0 * kPi * realization.doppler_hz[k] * q * ts;
        taps[p](m, k) = realization.gains[k] * Complex(std::cos(phase), std::sin(phase));
      }
    }
  }
  return TimeVaryingChannel(grid, std::move(pattern), cp, std::move(taps));
}

// Effective channel

namespace {

std::vector<CMatrix> scatter_taps(const DelayPattern& pattern, const std::vector<CMatrix>& taps) {
  const int m_count = pattern.dimension();
  std::vector<CMatrix> dense;
  dense.reserve(taps.size());
  for (const auto& t : taps) {
    CMatrix block = CMatrix::Zero(m_count, m_count);
    for (int m = 0; m < m_count; ++m) {
      for (int k = 0; k < pattern.path_count(); ++k) block(m, pattern.column(m, k)) = t(m, k);
    }
    dense.push_back(std::move(block));
  }
  return dense;
}

}  // namespace

EffectiveChannel::EffectiveChannel(const DdGrid& grid, DelayPattern pattern, std::vector<CMatrix> tap_generators)
    : grid_(grid),
      pattern_(std::move(pattern)),
      tap_generators_(std::move(tap_generators)),
      generators_(grid_, scatter_taps(pattern_, tap_generators_)) {}

CMatrix EffectiveChannel::dense() const { return block_circ_assemble(generators_); }

EffectiveChannel heff_rect_generators(const TimeVaryingChannel& channel) {
  std::vector<CMatrix> generators = channel.taps();
  const double n = channel.grid().N();
  detail::transform_sequence(generators, fft::Direction::Inverse, 1.0 / std::sqrt(n));
  return EffectiveChannel(channel.grid(), channel.pattern(), std::move(generators));
}

CMatrix heff_rect_direct(const TimeVaryingChannel& channel, int max_dimension) {
  const DdGrid& grid = channel.grid();
  const int m_count = grid.M();
  const int n_count = grid.N();
  const int dim = grid.size();
  check_guard(dim, max_dimension);
  ops::note_dense_materialization(static_cast<std::uint64_t>(dim));

  CMatrix f_n(n_count, n_count);
  for (int i = 0; i < n_count; ++i) {
    for (int p = 0; p < n_count; ++p) {
      const double angle = -2.0 * kPi * static_cast<double>(i) * p / n_count;
      f_n(i, p) = Complex(std::cos(angle), std::sin(angle)) / std::sqrt(static_cast<double>(n_count));
    }
  }
  CMatrix kron = CMatrix::Zero(dim, dim);
  for (int i = 0; i < n_count; ++i) {
    for (int p = 0; p < n_count; ++p) {
      kron.block(static_cast<Eigen::Index>(i) * m_count, static_cast<Eigen::Index>(p) * m_count, m_count, m_count)
          .diagonal()
          .setConstant(f_n(i, p));
    }
  }
  CMatrix h_tilde = CMatrix::Zero(dim, dim);
  for (int p = 0; p < n_count; ++p) {
    h_tilde.block(static_cast<Eigen::Index>(p) * m_count, static_cast<Eigen::Index>(p) * m_count, m_count,
                  m_count) = channel.dense_block(p);
  }
  ops::add_mults(2ULL * static_cast<std::uint64_t>(dim) * dim * dim);
  return kron * h_tilde * kron.adjoint();
}

// Mismatch channel

MismatchChannel::MismatchChannel(const DdGrid& grid, CMatrix h_dd) : grid_(grid), h_dd_(std::move(h_dd)) {
  if (h_dd_.rows() != grid_.M() || h_dd_.cols() != grid_.N()) throw DimensionError("H_DD must be M x N");
}

CMatrix MismatchChannel::dense(int max_dimension) const {
  const int m_count = grid_.M();
  const int n_count = grid_.N();
  const int dim = grid_.size();
  check_guard(dim, max_dimension);
  ops::note_dense_materialization(static_cast<std::uint64_t>(dim));
  CMatrix out(dim, dim);
  for (int i = 0; i < n_count; ++i) {
    for (int k = 0; k < n_count; ++k) {
      const int col = ((i - k) % n_count + n_count) % n_count;
      for (int a = 0; a < m_count; ++a) {
        for (int b = 0; b < m_count; ++b) {
          out(static_cast<Eigen::Index>(i) * m_count + a, static_cast<Eigen::Index>(k) * m_count + b) =
              h_dd_(((a - b) % m_count + m_count) % m_count, col);
        }
      }
    }
  }
  return out;
}

MismatchChannel heff_ideal_mismatch(const EffectiveChannel& effective) {
  const DdGrid& grid = effective.grid();
  const int n_count = grid.N();
  // Segment i of the dense first column is the first column of block (i, 0),
  // which is A_{(-i) mod N}.
  CMatrix h_dd(grid.M(), n_count);
  for (int i = 0; i < n_count; ++i) {
    h_dd.col(i) = effective.generators()[static_cast<std::size_t>((n_count - i) % n_count)].col(0);
  }
  return MismatchChannel(grid, std::move(h_dd));
}

}  // namespace otfs

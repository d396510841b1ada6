#include "otfs/equalizers.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "otfs/error.hpp"
#include "otfs/op_counter.hpp"
#include "otfs/transforms.hpp"

namespace otfs {

using fft::Direction;

namespace {

constexpr int kDenseLimit = 4096;

void check_square(const CMatrix& heff) {
  if (heff.rows() != heff.cols()) throw DimensionError("effective channel must be square");
  if (heff.rows() > kDenseLimit) {
    throw SizeGuardError(static_cast<std::size_t>(heff.rows()), static_cast<std::size_t>(kDenseLimit));
  }
}

// C_t = S^H S + sigma^2 I using only the pattern entries of S.
CMatrix regularized_gram(const CMatrix& s, const DelayPattern& pattern, double sigma2, bool sparse) {
  const int m = static_cast<int>(s.rows());
  CMatrix c;
  if (sparse) {
    const int taps = pattern.path_count();
    c = CMatrix::Zero(m, m);
    for (int row = 0; row < m; ++row) {
      for (int k1 = 0; k1 < taps; ++k1) {
        const int a = pattern.column(row, k1);
        const Complex left = std::conj(s(row, a));
        for (int k2 = 0; k2 < taps; ++k2) {
          const int b = pattern.column(row, k2);
          c(a, b) += left * s(row, b);
        }
      }
    }
    ops::add_mults(static_cast<std::uint64_t>(m) * taps * taps);
  } else {
    c = s.adjoint() * s;
    ops::add_mults(static_cast<std::uint64_t>(m) * m * m);
  }
  c.diagonal().array() += sigma2;
  return c;
}

CMatrix hermitian_inverse(const CMatrix& c, std::size_t t) {
  const Eigen::Index m = c.rows();
  Eigen::LLT<CMatrix> llt(c);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError(t, "regularized block C_" + std::to_string(t) + " is not positive definite");
  }
  CMatrix inv = llt.solve(CMatrix::Identity(m, m));
  const auto mm = static_cast<std::uint64_t>(m);
  ops::add_mults(mm * mm * mm / 6 + mm * mm * mm);
  if (!inv.allFinite()) throw SingularMatrixError(t, "regularized block C_" + std::to_string(t) + " is singular");
  return inv;
}

// X A^H where A has the tap pattern and is given by its M x P tap values.
CMatrix times_adjoint_taps(const CMatrix& x, const CMatrix& a_taps, const DelayPattern& pattern) {
  const int m = static_cast<int>(x.rows());
  const int taps = pattern.path_count();
  CMatrix out = CMatrix::Zero(m, m);
  for (int c = 0; c < m; ++c) {
    for (int k = 0; k < taps; ++k) {
      out.col(c) += x.col(pattern.column(c, k)) * std::conj(a_taps(c, k));
    }
  }
  ops::add_mults(static_cast<std::uint64_t>(m) * m * taps);
  return out;
}

}  // namespace

// BlockCirculantEqualizer

BlockCirculantEqualizer::BlockCirculantEqualizer(MatrixSequence generators, std::vector<CMatrix> spectral)
    : generators_(std::move(generators)), spectral_(std::move(spectral)) {
  if (spectral_.size() != generators_.size()) throw DimensionError("spectral block count must equal N");
}

CVector BlockCirculantEqualizer::apply(const CVector& y) const {
  const int m = grid().M();
  const int n = grid().N();
  if (y.size() != grid().size()) {
    throw DimensionError("equalizer input length " + std::to_string(y.size()) + " != N*M = " +
                         std::to_string(grid().size()));
  }
  CVector work = y;
  detail::transform_segments(work, m, n, Direction::Inverse);
  for (int t = 0; t < n; ++t) {
    auto seg = work.segment(static_cast<Eigen::Index>(t) * m, m);
    seg = (spectral_[static_cast<std::size_t>(t)] * seg).eval();
  }
  ops::add_mults(static_cast<std::uint64_t>(n) * m * m);
  detail::transform_segments(work, m, n, Direction::Forward);
  return work;
}

CMatrix BlockCirculantEqualizer::dense() const { return block_circ_assemble(generators_); }

ZfEqualizer::ZfEqualizer(MatrixSequence generators, std::vector<CMatrix> spectral, int structured_blocks)
    : BlockCirculantEqualizer(std::move(generators), std::move(spectral)), structured_blocks_(structured_blocks) {}

MmseEqualizer::MmseEqualizer(MatrixSequence generators, std::vector<CMatrix> spectral, double sigma2)
    : BlockCirculantEqualizer(std::move(generators), std::move(spectral)), sigma2_(sigma2) {}

// ZF

ZfEqualizer zf_build(const EffectiveChannel& channel, const DelayPattern& pattern, const StructuredOptions& options) {
  BlockCirculantInverse inv = invert_block_circulant(channel.generators(), &pattern, options);
  return ZfEqualizer(std::move(inv.generators), std::move(inv.spectral_inverse), inv.structured_blocks);
}

CVector zf_apply(const ZfEqualizer& eq, const CVector& y) { return eq.apply(y); }

// MMSE

MmseEqualizer mmse_build(const EffectiveChannel& channel, double sigma2, const DelayPattern& pattern,
                         const MmseOptions& options) {
  if (!(sigma2 >= 0.0)) throw InvariantError("sigma2", "noise variance must be >= 0");
  const DdGrid& grid = channel.grid();
  const int n = grid.N();
  const bool sparse = pattern == channel.pattern();

  std::vector<CMatrix> spectral = block_diagonalize(channel.generators());
  for (std::size_t t = 0; t < spectral.size(); ++t) {
    spectral[t] = hermitian_inverse(regularized_gram(spectral[t], pattern, sigma2, sparse), t);
  }
  const MatrixSequence c_inv = from_block_diagonal(grid, std::move(spectral));

  std::vector<CMatrix> w(static_cast<std::size_t>(n), CMatrix::Zero(grid.M(), grid.M()));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const int diff = options.flip_conjugate_index ? k - i : i - k;
      const auto a_index = static_cast<std::size_t>(((diff % n) + n) % n);
      if (sparse) {
        w[k] += times_adjoint_taps(c_inv[i], channel.tap_generators()[a_index], pattern);
      } else {
        w[k] += c_inv[i] * channel.generators()[a_index].adjoint();
        ops::add_mults(static_cast<std::uint64_t>(grid.M()) * grid.M() * grid.M());
      }
    }
  }
  MatrixSequence generators(grid, std::move(w));
  std::vector<CMatrix> apply_blocks = block_diagonalize(generators);
  return MmseEqualizer(std::move(generators), std::move(apply_blocks), sigma2);
}

CVector mmse_apply(const MmseEqualizer& eq, const CVector& y) { return eq.apply(y); }

// Direct dense baselines

CVector DenseEqualizer::apply(const CVector& y) const {
  if (y.size() != w_.cols()) throw DimensionError("equalizer input length does not match operator size");
  ops::add_mults(static_cast<std::uint64_t>(w_.rows()) * w_.cols());
  return w_ * y;
}

DenseEqualizer direct_zf_build(const CMatrix& heff) {
  check_square(heff);
  return DenseEqualizer(dense_inverse(heff));
}

DenseEqualizer direct_mmse_build(const CMatrix& heff, double sigma2) {
  check_square(heff);
  if (!(sigma2 >= 0.0)) throw InvariantError("sigma2", "noise variance must be >= 0");
  const auto k = static_cast<std::uint64_t>(heff.rows());
  CMatrix c = heff.adjoint() * heff;
  c.diagonal().array() += sigma2;
  ops::add_mults(k * k * k);
  // C is Hermitian positive definite: Cholesky, then K right-hand sides.
  const Eigen::LLT<CMatrix> llt(c);
  ops::add_mults((k * k * k - k) / 6 + k * k * k);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-15)) {
    throw SingularMatrixError(0, "H^H H + sigma^2 I is numerically singular");
  }
  return DenseEqualizer(llt.solve(heff.adjoint()));
}

CVector direct_zf_oracle(const CMatrix& heff, const CVector& y) { return direct_zf_build(heff).apply(y); }

CVector direct_mmse_oracle(const CMatrix& heff, double sigma2, const CVector& y) {
  return direct_mmse_build(heff, sigma2).apply(y);
}

// Ideal-waveform (mismatched) equalizers

namespace {

CMatrix dft2(CMatrix data, Direction dir) {
  const int m = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  fft::transform_batch(data.data(), m, n, 1, m, dir);
  fft::transform_batch(data.data(), n, m, m, 1, dir);
  return data;
}

}  // namespace

IdealEqualizer::IdealEqualizer(const DdGrid& grid, CMatrix bin_gains) : grid_(grid), gains_(std::move(bin_gains)) {
  if (gains_.rows() != grid_.M() || gains_.cols() != grid_.N()) throw DimensionError("bin gains must be M x N");
}

CVector IdealEqualizer::apply(const CVector& y) const {
  if (y.size() != grid_.size()) throw DimensionError("equalizer input length must be N*M");
  CMatrix bins = dft2(y.reshaped(grid_.M(), grid_.N()), Direction::Forward);
  bins.array() *= gains_.array();
  ops::add_mults(static_cast<std::uint64_t>(grid_.size()));
  CMatrix out = dft2(std::move(bins), Direction::Inverse) / static_cast<double>(grid_.size());
  return out.reshaped();
}

IdealEqualizer ideal_zf_build(const MismatchChannel& channel) {
  const CMatrix lambda = dft2(channel.h_dd(), Direction::Forward);
  const double peak = lambda.cwiseAbs().maxCoeff();
  CMatrix gains(lambda.rows(), lambda.cols());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!(std::abs(lambda(i)) > 1e-12 * peak)) {
      throw SingularMatrixError(static_cast<std::size_t>(i), "ideal-waveform channel has a vanishing DFT bin");
    }
    gains(i) = 1.0 / lambda(i);
  }
  ops::add_mults(static_cast<std::uint64_t>(lambda.size()));
  return IdealEqualizer(channel.grid(), std::move(gains));
}

IdealEqualizer ideal_mmse_build(const MismatchChannel& channel, double sigma2) {
  if (!(sigma2 >= 0.0)) throw InvariantError("sigma2", "noise variance must be >= 0");
  const CMatrix lambda = dft2(channel.h_dd(), Direction::Forward);
  CMatrix gains(lambda.rows(), lambda.cols());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double denom = std::norm(lambda(i)) + sigma2;
    if (!(denom > 0.0)) throw SingularMatrixError(static_cast<std::size_t>(i), "ideal-waveform MMSE bin is singular");
    gains(i) = std::conj(lambda(i)) / denom;
  }
  ops::add_mults(2ULL * static_cast<std::uint64_t>(lambda.size()));
  return IdealEqualizer(channel.grid(), std::move(gains));
}

}  // namespace otfs

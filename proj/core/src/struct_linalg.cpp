#include "otfs/struct_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "otfs/error.hpp"
#include "otfs/op_counter.hpp"
#include "otfs/transforms.hpp"

namespace otfs {

namespace {

void check_operands(const CMatrix& s, const DelayPattern& pattern) {
  if (s.rows() != s.cols() || s.rows() != pattern.dimension()) {
    throw DimensionError("structured matrix must be M x M with M = pattern dimension");
  }
  if (!pattern.has_diagonal()) {
    throw InvariantError("D_1", "structured factorization needs D_1 == 0 so the diagonal is populated");
  }
}

[[noreturn]] void throw_pivot(int step, double magnitude) {
  std::ostringstream msg;
  msg << "zero pivot at elimination step " << step << " (|pivot| = " << magnitude << ")";
  throw SingularMatrixError(static_cast<std::size_t>(step), msg.str());
}

}  // namespace

LuWorkspace structured_lu(const CMatrix& s, const DelayPattern& pattern, const StructuredOptions& options) {
  check_operands(s, pattern);
  const int m = pattern.dimension();
  const int taps = pattern.path_count();
  const int boundary = pattern.boundary();
  const auto& d = pattern.offsets();

  LuWorkspace ws;
  ws.multipliers = CMatrix::Identity(m, m);
  ws.upper = CMatrix::Zero(m, m);
  CMatrix& phi = ws.multipliers;
  CMatrix& upper = ws.upper;

  double s_max = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < taps; ++k) s_max = std::max(s_max, std::abs(s(i, pattern.column(i, k))));
  }

  std::uint64_t mults = 0;

  // Rows above the boundary: the pivot is the untouched diagonal, the only
  // lower entries are the band taps, and every elimination lands in the last
  // D_P columns.
  for (int i = 0; i < boundary; ++i) {
    const Complex pivot = s(i, i);
    if (std::abs(pivot) < options.pivot_tolerance) throw_pivot(i, std::abs(pivot));
    upper(i, i) = pivot;
    for (int k = 1; k < taps; ++k) {
      const int col = pattern.column(i, k);
      if (d[k] > i) upper(i, col) = s(i, col);
    }
    for (int k = 1; k < taps && d[k] <= i; ++k) {
      const int j = i - d[k];
      const Complex l = s(i, j) / upper(j, j);
      phi(i, j) = l;
      for (int c = boundary; c < m; ++c) upper(i, c) -= l * upper(j, c);
      mults += 1 + static_cast<std::uint64_t>(m - boundary);
    }
  }

  // Trailing rows: band taps that reach the structured rows first, then a
  // regular LU sweep over the dense D_P x D_P corner.
  Eigen::VectorXcd row(m);
  for (int i = boundary; i < m; ++i) {
    row.setZero();
    for (int k = 0; k < taps; ++k) {
      const int col = pattern.column(i, k);
      row(col) = s(i, col);
    }
    for (int k = 0; k < taps; ++k) {
      const int j = i - d[k];
      if (j < 0 || j >= boundary) continue;
      const Complex l = row(j) / upper(j, j);
      phi(i, j) = l;
      row(j) = 0.0;
      for (int c = boundary; c < m; ++c) row(c) -= l * upper(j, c);
      mults += 1 + static_cast<std::uint64_t>(m - boundary);
    }
    for (int j = boundary; j < i; ++j) {
      if (row(j) == Complex{}) continue;
      const Complex l = row(j) / upper(j, j);
      phi(i, j) = l;
      row(j) = 0.0;
      for (int c = j + 1; c < m; ++c) row(c) -= l * upper(j, c);
      mults += 1 + static_cast<std::uint64_t>(m - 1 - j);
    }
    if (std::abs(row(i)) < options.pivot_tolerance) throw_pivot(i, std::abs(row(i)));
    upper.row(i).segment(i, m - i) = row.segment(i, m - i).transpose();
  }

  ops::add_mults(mults);
  ws.upper_growth = s_max > 0.0 ? upper.cwiseAbs().maxCoeff() / s_max : 1.0;
  return ws;
}

CMatrix structured_invert(LuWorkspace& ws, const DelayPattern& pattern) {
  const int m = pattern.dimension();
  const int taps = pattern.path_count();
  const int boundary = pattern.boundary();
  const auto& d = pattern.offsets();
  const CMatrix& phi = ws.multipliers;
  const CMatrix& upper = ws.upper;
  if (phi.rows() != m || upper.rows() != m) throw DimensionError("workspace does not match pattern");

  std::uint64_t mults = 0;

  // Y = L^{-1}. Row j of Y is zero beyond column j.
  ws.forward = CMatrix::Zero(m, m);
  CMatrix& y = ws.forward;
  for (int k = 0; k < m; ++k) {
    y(k, k) = 1.0;
    for (int t = 1; t < taps && d[t] <= k; ++t) {
      const int j = k - d[t];
      if (k >= boundary && j >= boundary) continue;
      const Complex l = phi(k, j);
      if (l == Complex{}) continue;
      y.row(k).head(j + 1) -= l * y.row(j).head(j + 1);
      mults += static_cast<std::uint64_t>(j + 1);
    }
    if (k >= boundary) {
      for (int j = boundary; j < k; ++j) {
        const Complex l = phi(k, j);
        if (l == Complex{}) continue;
        y.row(k).head(j + 1) -= l * y.row(j).head(j + 1);
        mults += static_cast<std::uint64_t>(j + 1);
      }
    }
  }
  ws.forward_growth = y.cwiseAbs().maxCoeff();

  // X = U^{-1} Y, bottom-up. U row k is nonzero only at k and in the last
  // D_P columns (all of (k, M) in the trailing rows).
  CMatrix x(m, m);
  for (int k = m - 1; k >= 0; --k) {
    Eigen::RowVectorXcd acc = y.row(k);
    const int first = std::max(k + 1, boundary);
    for (int j = first; j < m; ++j) {
      const Complex u = upper(k, j);
      if (u == Complex{}) continue;
      acc -= u * x.row(j);
      mults += static_cast<std::uint64_t>(m);
    }
    x.row(k) = acc / upper(k, k);
    mults += static_cast<std::uint64_t>(m);
  }
  ops::add_mults(mults);
  return x;
}

CMatrix structured_invert(const CMatrix& s, const DelayPattern& pattern, const StructuredOptions& options) {
  LuWorkspace ws = structured_lu(s, pattern, options);
  return structured_invert(ws, pattern);
}

CMatrix pivoted_band_invert(const CMatrix& s, const DelayPattern& pattern, double pivot_tolerance) {
  const int m = pattern.dimension();
  if (s.rows() != m || s.cols() != m) throw DimensionError("structured matrix must be M x M with M = pattern dimension");
  const int dp = pattern.max_delay();
  const int boundary = pattern.boundary();
  const int taps = pattern.path_count();

  CMatrix a = CMatrix::Zero(m, m);
  double s_max = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < taps; ++k) {
      const int c = pattern.column(i, k);
      a(i, c) = s(i, c);
      s_max = std::max(s_max, std::abs(a(i, c)));
    }
  }
  const double tolerance = pivot_tolerance * (s_max > 0.0 ? s_max : 1.0);

  // Last row that can be nonzero in column j, and last band column of U row j.
  auto row_end = [&](int j) { return j < boundary ? std::min(m - 1, j + dp) : m - 1; };
  auto band_end = [&](int j) { return j < boundary ? std::min(m - 1, j + 2 * dp) : m - 1; };

  std::uint64_t mults = 0;
  std::vector<int> swaps(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    int p = j;
    for (int i = j + 1; i <= row_end(j); ++i) {
      if (std::abs(a(i, j)) > std::abs(a(p, j))) p = i;
    }
    if (std::abs(a(p, j)) < tolerance) throw_pivot(j, std::abs(a(p, j)));
    swaps[static_cast<std::size_t>(j)] = p;
    // Earlier multiplier columns stay in place; the solve replays the swaps
    // step by step instead.
    if (p != j) a.row(j).tail(m - j).swap(a.row(p).tail(m - j));

    const int hi = band_end(j);
    const int corner = std::max(hi + 1, boundary);
    for (int i = j + 1; i <= row_end(j); ++i) {
      if (a(i, j) == Complex{}) continue;
      const Complex l = a(i, j) / a(j, j);
      a(i, j) = l;
      for (int c = j + 1; c <= hi; ++c) a(i, c) -= l * a(j, c);
      for (int c = corner; c < m; ++c) a(i, c) -= l * a(j, c);
      mults += 1 + static_cast<std::uint64_t>(hi - j) + static_cast<std::uint64_t>(std::max(0, m - corner));
    }
  }

  // Y = L^{-1} P with the interchanges interleaved, then X = U^{-1} Y.
  CMatrix y = CMatrix::Identity(m, m);
  for (int j = 0; j < m; ++j) {
    const int p = swaps[static_cast<std::size_t>(j)];
    if (p != j) y.row(j).swap(y.row(p));
    for (int i = j + 1; i <= row_end(j); ++i) {
      const Complex l = a(i, j);
      if (l == Complex{}) continue;
      y.row(i) -= l * y.row(j);
      mults += static_cast<std::uint64_t>(m);
    }
  }
  CMatrix x(m, m);
  for (int k = m - 1; k >= 0; --k) {
    Eigen::RowVectorXcd acc = y.row(k);
    const int hi = band_end(k);
    const int corner = std::max(hi + 1, boundary);
    auto subtract = [&](int c) {
      const Complex u = a(k, c);
      if (u == Complex{}) return;
      acc -= u * x.row(c);
      mults += static_cast<std::uint64_t>(m);
    };
    for (int c = k + 1; c <= hi; ++c) subtract(c);
    for (int c = corner; c < m; ++c) subtract(c);
    x.row(k) = acc / a(k, k);
    mults += static_cast<std::uint64_t>(m);
  }
  ops::add_mults(mults);
  return x;
}

bool conforms_to(const CMatrix& s, const DelayPattern& pattern) {
  const int m = pattern.dimension();
  if (s.rows() != m || s.cols() != m) return false;
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < m; ++c) {
      const int offset = ((i - c) % m + m) % m;
      if (!pattern.contains_offset(offset) && s(i, c) != Complex{}) return false;
    }
  }
  return true;
}

std::vector<CMatrix> block_diagonalize(const MatrixSequence& generators) {
  std::vector<CMatrix> blocks = generators.blocks();
  detail::transform_sequence(blocks, fft::Direction::Forward, std::sqrt(static_cast<double>(blocks.size())));
  return blocks;
}

MatrixSequence from_block_diagonal(const DdGrid& grid, std::vector<CMatrix> spectral) {
  detail::transform_sequence(spectral, fft::Direction::Inverse, 1.0 / std::sqrt(static_cast<double>(grid.N())));
  return MatrixSequence(grid, std::move(spectral));
}

BlockCirculantInverse invert_block_circulant(const MatrixSequence& generators, const DelayPattern* pattern,
                                             const StructuredOptions& options) {
  const DdGrid& grid = generators.grid();
  std::vector<CMatrix> spectral = block_diagonalize(generators);
  const bool structured_ok = pattern != nullptr && pattern->has_diagonal() && pattern->dimension() == grid.M();

  int structured = 0;
  int pivoted = 0;
  int dense = 0;
  for (std::size_t t = 0; t < spectral.size(); ++t) {
    bool done = false;
    if (structured_ok && conforms_to(spectral[t], *pattern)) {
      try {
        LuWorkspace ws = structured_lu(spectral[t], *pattern, options);
        CMatrix inv = structured_invert(ws, *pattern);
        if (ws.upper_growth * ws.forward_growth <= options.growth_limit) {
          spectral[t] = std::move(inv);
          ++structured;
          done = true;
        }
      } catch (const SingularMatrixError&) {
        // Pivot breakdown; row interchanges below decide singularity.
      }
      if (!done) {
        ops::thread_counts().structured_fallbacks += 1;
        try {
          spectral[t] = pivoted_band_invert(spectral[t], *pattern, options.pivot_tolerance);
        } catch (const SingularMatrixError& e) {
          throw SingularMatrixError(t, "block S_" + std::to_string(t) + " is singular: " + e.what());
        }
        ++pivoted;
        done = true;
      }
    }
    if (!done) {
      try {
        spectral[t] = dense_inverse(spectral[t]);
      } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(t, "block S_" + std::to_string(t) + " is singular: " + e.what());
      }
      ++dense;
    }
  }

  BlockCirculantInverse out{from_block_diagonal(grid, spectral), std::move(spectral), structured, pivoted, dense};
  return out;
}

MatrixSequence block_circ_inverse(const MatrixSequence& generators) {
  return invert_block_circulant(generators, nullptr).generators;
}

MatrixSequence block_circ_inverse(const MatrixSequence& generators, const DelayPattern& pattern) {
  return invert_block_circulant(generators, &pattern).generators;
}

std::uint64_t dense_inverse_mults(std::uint64_t k) {
  // LU: sum_j (K-j-1)(K-j) updates + (K-j-1) divisions; then K forward and
  // K backward triangular solves against the identity.
  const std::uint64_t lu = (k * k * k - k) / 3 + k * (k - 1) / 2;
  return lu + k * k * k;
}

CMatrix dense_inverse(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("dense_inverse: matrix must be square");
  const Eigen::Index k = a.rows();
  Eigen::PartialPivLU<CMatrix> lu(a);
  ops::add_mults(dense_inverse_mults(static_cast<std::uint64_t>(k)));
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15) || !std::isfinite(rcond)) {
    std::ostringstream msg;
    msg << "matrix is numerically singular (condition estimate "
        << (rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity()) << ")";
    throw SingularMatrixError(0, msg.str());
  }
  return lu.inverse();
}

DenseInverse dense_inverse_oracle(const CMatrix& a, int max_dimension) {
  if (a.rows() != a.cols()) throw DimensionError("dense_inverse_oracle: matrix must be square");
  if (a.rows() > max_dimension) {
    throw SizeGuardError(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(max_dimension));
  }
  DenseInverse out;
  Eigen::PartialPivLU<CMatrix> lu(a);
  out.condition_estimate = lu.rcond() > 0.0 ? 1.0 / lu.rcond() : std::numeric_limits<double>::infinity();
  out.inverse = dense_inverse(a);
  const Eigen::Index k = a.rows();
  out.residual = (a * out.inverse - CMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace otfs

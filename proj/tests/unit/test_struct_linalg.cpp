#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "otfs/delay_pattern.hpp"
#include "otfs/error.hpp"
#include "otfs/op_counter.hpp"
#include "otfs/struct_linalg.hpp"
#include "otfs/transforms.hpp"

using namespace otfs;

namespace {

// Hand-rolled generator: D_1 = 0 plus distinct offsets in [1, M - 1].
DelayPattern random_pattern(int m, int taps, std::mt19937_64& rng, bool with_diagonal = true) {
  std::uniform_int_distribution<int> pick(with_diagonal ? 1 : 0, m - 1);
  std::vector<int> d;
  if (with_diagonal) d.push_back(0);
  while (int(d.size()) < taps) {
    const int v = pick(rng);
    if (std::find(d.begin(), d.end(), v) == d.end()) d.push_back(v);
  }
  std::sort(d.begin(), d.end());
  return DelayPattern(d, m);
}

CMatrix random_on_pattern(const DelayPattern& p, std::mt19937_64& rng, double diagonal_boost = 0.0) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  const int m = p.dimension();
  CMatrix s = CMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < p.path_count(); ++k) s(i, p.column(i, k)) = Complex(g(rng), g(rng));
  }
  if (p.has_diagonal()) s.diagonal().array() += diagonal_boost;
  return s;
}

bool off_pattern_zero(const CMatrix& s, const DelayPattern& p) {
  for (int i = 0; i < s.rows(); ++i) {
    for (int c = 0; c < s.cols(); ++c) {
      if (!p.contains_offset(((i - c) % p.dimension() + p.dimension()) % p.dimension()) && s(i, c) != Complex{}) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("delay pattern geometry") {
  const DelayPattern p({0, 1, 3}, 8);
  CHECK(p.boundary() == 5);
  CHECK(p.segments() == std::vector<int>{0, 1, 3, 5});
  CHECK(p.column(0, 1) == 7);
  CHECK(p.column(4, 2) == 1);
  CHECK(p.contains_offset(3));
  CHECK_FALSE(p.contains_offset(2));
  CHECK_THROWS_AS(DelayPattern({0, 8}, 8), InvariantError);
  CHECK_THROWS_AS(DelayPattern({1, 1}, 8), InvariantError);
  CHECK_THROWS_AS(DelayPattern({}, 8), InvariantError);
}

TEST_CASE("structured LU agrees with Doolittle elimination") {
  std::mt19937_64 rng(31);
  const DelayPattern p({0, 1, 2, 5}, 12);
  const CMatrix s = random_on_pattern(p, rng, 3.0);
  oracle::Matrix l, u;
  oracle::doolittle(s, l, u);
  const LuWorkspace ws = structured_lu(s, p);
  CHECK((ws.multipliers - l).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ws.upper - u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("property: structured LU reconstructs and confines fill") {
  std::mt19937_64 rng(32);
  int trials = 0;
  for (int m : {8, 16, 32}) {
    for (int taps : {2, 4, 6}) {
      for (int rep = 0; rep < 6; ++rep) {
        const DelayPattern p = random_pattern(m, taps, rng);
        const CMatrix s = random_on_pattern(p, rng, 2.0);
        const LuWorkspace ws = structured_lu(s, p);
        CHECK(oracle::rel_max_error(ws.multipliers * ws.upper, s) < 1e-9);

        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m; ++j) {
            if (j < i) CHECK(ws.upper(i, j) == Complex{});
            if (i < p.boundary() && j < i && !p.contains_offset(i - j)) CHECK(ws.multipliers(i, j) == Complex{});
            if (i < p.boundary() && j > i && j < p.boundary()) CHECK(ws.upper(i, j) == Complex{});
          }
        }
        ++trials;
      }
    }
  }
  CHECK(trials == 54);
}

TEST_CASE("property: structured inverse matches the dense pivoted inverse") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 4 + int(rng() % 29);
    const DelayPattern p = random_pattern(m, 1 + int(rng() % std::min(6, m - 1)) + 1, rng);
    const CMatrix s = random_on_pattern(p, rng, 2.0);
    const CMatrix inv = structured_invert(s, p);
    const Eigen::FullPivLU<oracle::Matrix> oracle_lu(s);
    CHECK(oracle::rel_max_error(inv, oracle_lu.inverse()) < 1e-9);
    CHECK((s * inv - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("structured LU ignores entries off the pattern") {
  std::mt19937_64 rng(34);
  const DelayPattern p({0, 2}, 6);
  const CMatrix s = random_on_pattern(p, rng, 2.0);
  CMatrix noisy = s;
  noisy(0, 3) = 5.0;
  CHECK(conforms_to(s, p));
  CHECK_FALSE(conforms_to(noisy, p));
  CHECK((structured_invert(noisy, p) - structured_invert(s, p)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a zero pivot raises with the elimination step") {
  const DelayPattern p({0, 1}, 4);
  CMatrix s = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    s(i, i) = 1.0;
    s(i, p.column(i, 1)) = 0.5;
  }
  s(2, 2) = 0.0;
  try {
    (void)structured_lu(s, p);
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("structured LU needs the diagonal in the pattern") {
  const DelayPattern p({1, 2}, 5);
  CHECK_THROWS_AS(structured_lu(CMatrix::Identity(5, 5), p), InvariantError);
}

TEST_CASE("property: pivoted band inverse is exact for any offsets") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 4 + int(rng() % 29);
    const bool diag = trial % 2 == 0;
    const DelayPattern p = random_pattern(m, 2 + int(rng() % std::min(5, m - 2)), rng, diag);
    const CMatrix s = random_on_pattern(p, rng);
    const Eigen::FullPivLU<oracle::Matrix> oracle_lu(s);
    if (oracle_lu.rcond() < 1e-10) continue;
    const CMatrix inv = pivoted_band_invert(s, p);
    CHECK((s * inv - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(oracle::rel_max_error(inv, oracle_lu.inverse()) < 1e-8);
  }
}

TEST_CASE("pivoted band inverse survives what breaks the pivot-free LU") {
  // A dominant first off-diagonal tap makes pivot-free elimination grow like
  // (tap ratio)^M.
  const int m = 48;
  const DelayPattern p({0, 1, 2}, m);
  CMatrix s = CMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    s(i, p.column(i, 0)) = 0.1;
    s(i, p.column(i, 1)) = 1.0;
    s(i, p.column(i, 2)) = 0.3;
  }
  // Either the pivots collapse outright or the growth guard must trip.
  try {
    const LuWorkspace ws = structured_lu(s, p);
    CHECK(ws.upper_growth * ws.forward_growth > StructuredOptions{}.growth_limit);
  } catch (const SingularMatrixError&) {
  }
  const CMatrix inv = pivoted_band_invert(s, p);
  CHECK((s * inv - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("structured inversion cost grows like M^2 D_P") {
  std::mt19937_64 rng(36);
  std::vector<double> ms, counts;
  for (int m : {32, 64, 128, 256}) {
    const DelayPattern p({0, 1, 3, 4}, m);
    const CMatrix s = random_on_pattern(p, rng, 3.0);
    const ops::ScopedCount count;
    (void)structured_invert(s, p);
    ms.push_back(m);
    counts.push_back(double(count.delta().mults));
  }
  const double slope = oracle::loglog_slope(ms, counts);
  CHECK(slope > 1.8);
  CHECK(slope < 2.2);
}

TEST_CASE("dense inverse counts and singular detection") {
  CHECK(dense_inverse_mults(1) == 1);
  CHECK(dense_inverse_mults(3) == 8 + 3 + 27);
  CHECK_THROWS_AS(dense_inverse(CMatrix::Zero(3, 3)), SingularMatrixError);
  const DenseInverse d = dense_inverse_oracle(CMatrix::Identity(4, 4) * 2.0);
  CHECK(d.residual < 1e-15);
  CHECK(d.condition_estimate == doctest::Approx(1.0));
  CHECK_THROWS_AS(dense_inverse_oracle(CMatrix::Identity(8, 8), 4), SizeGuardError);
}

TEST_CASE("property: block-circulant inverse via the spectral blocks") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 12; ++trial) {
    const int m = 4 + int(rng() % 6);
    const int n = 1 + int(rng() % 7);
    const DdGrid g(m, n, 15e3);
    const DelayPattern p = random_pattern(m, 3, rng);
    std::vector<CMatrix> blocks;
    for (int k = 0; k < n; ++k) blocks.push_back(random_on_pattern(p, rng, k == 0 ? 3.0 : 0.0));
    const MatrixSequence gen(g, blocks);

    const CMatrix a = block_circ_assemble(gen);
    const CMatrix expected = Eigen::FullPivLU<oracle::Matrix>(a).inverse();
    CHECK(oracle::rel_max_error(block_circ_assemble(block_circ_inverse(gen)), expected) < 1e-9);
    CHECK(oracle::rel_max_error(block_circ_assemble(block_circ_inverse(gen, p)), expected) < 1e-9);

    // Every S_t keeps the generator pattern.
    for (const CMatrix& s : block_diagonalize(gen)) CHECK(off_pattern_zero(s, p));
  }
}

TEST_CASE("block_diagonalize equals the Kronecker diagonalization") {
  std::mt19937_64 rng(38);
  const DdGrid g(3, 4, 15e3);
  std::vector<CMatrix> blocks;
  for (int k = 0; k < 4; ++k) blocks.push_back(oracle::random_matrix(3, 3, rng));
  const MatrixSequence gen(g, blocks);
  const CMatrix t = oracle::kron(oracle::dft(4), CMatrix::Identity(3, 3));
  const CMatrix d = t.adjoint() * block_circ_assemble(gen) * t;
  const auto s = block_diagonalize(gen);
  for (int k = 0; k < 4; ++k) CHECK((d.block(k * 3, k * 3, 3, 3) - s[std::size_t(k)]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(from_block_diagonal(g, s).max_abs_diff(gen) < 1e-12);
}

TEST_CASE("singular block-circulant operators name the block") {
  const DdGrid g(3, 2, 15e3);
  const MatrixSequence gen(g, {CMatrix::Identity(3, 3), CMatrix::Identity(3, 3)});
  // S_1 = G_0 - G_1 = 0.
  try {
    (void)block_circ_inverse(gen);
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.index() == 1);
  }
}

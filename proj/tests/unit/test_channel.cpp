#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "oracles.hpp"
#include "otfs/channel.hpp"
#include "otfs/error.hpp"
#include "otfs/transforms.hpp"

using namespace otfs;

namespace {

// Independent quantization: ceil(delay * rate), colliding paths merged.
std::map<int, double> quantized_vehicular_b(double rate) {
  const double delays_us[] = {0.0, 0.3, 8.9, 12.9, 17.1, 20.0};
  const double powers_db[] = {-2.5, 0.0, -12.8, -10.0, -25.2, -16.0};
  std::map<int, double> out;
  for (int k = 0; k < 6; ++k) {
    out[int(std::ceil(delays_us[k] * 1e-6 * rate - 1e-9))] += std::pow(10.0, powers_db[k] / 10.0);
  }
  return out;
}

oracle::Matrix block_diag(const TimeVaryingChannel& ch) {
  const int m = ch.grid().M();
  const int n = ch.grid().N();
  oracle::Matrix h = oracle::Matrix::Zero(n * m, n * m);
  for (int p = 0; p < n; ++p) h.block(p * m, p * m, m, m) = ch.dense_block(p);
  return h;
}

oracle::Matrix eq5(const TimeVaryingChannel& ch) {
  const int m = ch.grid().M();
  const oracle::Matrix t = oracle::kron(oracle::dft(ch.grid().N()), oracle::Matrix::Identity(m, m));
  return t * block_diag(ch) * t.adjoint();
}

TimeVaryingChannel random_channel(const DdGrid& grid, const DelayProfile& profile, double f_max, std::uint64_t seed) {
  return build_time_domain(draw_realization(profile, f_max, seed), profile, grid);
}

}  // namespace

TEST_CASE("vehicular-B at the full-scale rate") {
  const DelayProfile p = DelayProfile::vehicular_b();
  CHECK(p.taps() == std::vector<int>{0, 1, 9, 13, 17, 20});
  CHECK(p.path_count() == 6);
  CHECK(p.max_delay() == 20);
  CHECK(p.cp_length() == 21);

  const auto expected = quantized_vehicular_b(64 * 15e3);
  std::vector<int> taps;
  for (const auto& [tap, power] : expected) taps.push_back(tap);
  CHECK(taps == p.taps());
}

TEST_CASE("vehicular-B scaled to a desk grid merges colliding paths") {
  const DdGrid g(16, 8, 15e3);
  const DelayProfile p = DelayProfile::vehicular_b_scaled(g);
  const auto expected = quantized_vehicular_b(16 * 15e3);
  REQUIRE(p.path_count() == int(expected.size()));
  std::size_t k = 0;
  for (const auto& [tap, linear] : expected) {
    CHECK(p.taps()[k] == tap);
    CHECK(p.powers_db()[k] == doctest::Approx(10.0 * std::log10(linear)));
    ++k;
  }
  CHECK(p.max_delay() < g.M());
}

TEST_CASE("a profile longer than the block is rejected naming D_P < M") {
  const DdGrid g(8, 8, 15e3);
  try {
    (void)DelayProfile::vehicular_b().pattern(g);
    FAIL("expected rejection");
  } catch (const InvariantError& e) {
    CHECK(e.field() == "D_P");
    CHECK(std::string(e.what()).find("D_P < M") != std::string::npos);
  }
}

TEST_CASE("profile invariants") {
  CHECK_THROWS_AS(DelayProfile::from_taps({}, {}), InvariantError);
  CHECK_THROWS_AS(DelayProfile::from_taps({0, 2}, {0.0}), InvariantError);
  CHECK_THROWS_AS(DelayProfile::from_taps({2, 1}, {0.0, 0.0}), InvariantError);
  CHECK_THROWS_AS(DelayProfile::from_taps({0, 4}, {0.0, 0.0}, 4), InvariantError);
  CHECK(DelayProfile::from_taps({0, 4}, {0.0, 0.0}).cp_length() == 5);
  CHECK_THROWS_AS(DelayProfile::from_delays({0.0, 1e-7, 1.01e-7}, {0, 0, 0}, 15e6), InvariantError);
}

TEST_CASE("normalized powers sum to one") {
  const DelayProfile p = DelayProfile::vehicular_b();
  const auto w = p.normalized_powers();
  double total = 0.0;
  for (double v : w) total += v;
  CHECK(total == doctest::Approx(1.0));
  CHECK(w[1] / w[0] == doctest::Approx(std::pow(10.0, 0.25)));
}

TEST_CASE("realizations are deterministic and have the profile's moments") {
  const DelayProfile p = DelayProfile::vehicular_b();
  const auto a = draw_realization(p, 1000.0, 7);
  const auto b = draw_realization(p, 1000.0, 7);
  CHECK(a.gains == b.gains);
  CHECK(a.doppler_hz == b.doppler_hz);
  CHECK(draw_realization(p, 1000.0, 8).gains != a.gains);

  const auto w = p.normalized_powers();
  std::vector<double> power(6, 0.0);
  double max_doppler = 0.0;
  const int draws = 20000;
  for (int s = 0; s < draws; ++s) {
    const auto r = draw_realization(p, 1000.0, std::uint64_t(s) + 100);
    for (int k = 0; k < 6; ++k) {
      power[std::size_t(k)] += std::norm(r.gains[std::size_t(k)]) / draws;
      max_doppler = std::max(max_doppler, std::abs(r.doppler_hz[std::size_t(k)]));
    }
  }
  for (int k = 0; k < 6; ++k) CHECK(power[std::size_t(k)] == doctest::Approx(w[std::size_t(k)]).epsilon(0.05));
  CHECK(max_doppler <= 1000.0);
  CHECK(max_doppler > 990.0);
}

TEST_CASE("time-domain blocks equal a sample-by-sample tap-delay line with CP") {
  std::mt19937_64 rng(21);
  for (auto [m, n] : {std::pair{16, 4}, {8, 3}, {64, 2}}) {
    const DdGrid g(m, n, 15e3);
    const DelayProfile p = m == 64 ? DelayProfile::vehicular_b() : DelayProfile::from_taps({0, 1, 3, 5}, {0, -1, -3, -6});
    const auto r = draw_realization(p, 3000.0, 5);
    const TimeVaryingChannel ch = build_time_domain(r, p, g);

    std::vector<oracle::Vector> symbols;
    for (int k = 0; k < n; ++k) symbols.push_back(oracle::random_vector(m, rng));
    const auto rx = oracle::tdl_receive(symbols, p.cp_length(), p.taps(), r.gains, r.doppler_hz, g.sample_period());
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      worst = std::max(worst, (ch.dense_block(k) * symbols[std::size_t(k)] - rx[std::size_t(k)]).cwiseAbs().maxCoeff());
      worst = std::max(worst, (ch.apply_block(k, symbols[std::size_t(k)]) - rx[std::size_t(k)]).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("channel apply matches the block-diagonal product") {
  std::mt19937_64 rng(22);
  const DdGrid g(8, 5, 15e3);
  const DelayProfile p = DelayProfile::from_taps({0, 2, 3}, {0, -2, -4});
  const TimeVaryingChannel ch = random_channel(g, p, 2000.0, 3);
  const oracle::Vector s = oracle::random_vector(40, rng);
  CHECK((ch.apply(s) - block_diag(ch) * s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("property: the explicit effective channel is block-circulant") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> dim(2, 10);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = dim(rng) + 2;
    const int n = dim(rng);
    const DdGrid g(m, n, 15e3);
    std::uniform_int_distribution<int> tap(1, m - 1);
    std::vector<int> taps{0, tap(rng)};
    if (taps[1] < m - 1) taps.push_back(taps[1] + 1);
    const DelayProfile p = DelayProfile::from_taps(taps, std::vector<double>(taps.size(), 0.0));
    const TimeVaryingChannel ch = random_channel(g, p, 5000.0, rng());
    const CMatrix h = heff_rect_direct(ch);
    CHECK((h - eq5(ch)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(oracle::block_shift_deviation(h, m, n) < 1e-10);
    CHECK((heff_rect_generators(ch).dense() - h).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("generators follow A_n = (1/N) sum_p e^{+j2pi pn/N} H~_p") {
  const DdGrid g(6, 5, 15e3);
  const DelayProfile p = DelayProfile::from_taps({0, 1, 4}, {0, -3, -6});
  const TimeVaryingChannel ch = random_channel(g, p, 4000.0, 9);
  const EffectiveChannel eff = heff_rect_generators(ch);
  double worst = 0.0;
  for (int nn = 0; nn < 5; ++nn) {
    oracle::Matrix a = oracle::Matrix::Zero(6, 6);
    for (int pp = 0; pp < 5; ++pp) {
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) a(r, c) += oracle::expj(2.0 * oracle::kPi * pp * nn / 5) * ch.dense_block(pp)(r, c);
      }
    }
    a /= 5.0;
    worst = std::max(worst, (eff.generators()[std::size_t(nn)] - a).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-12);
  CHECK(eff.pattern() == ch.pattern());
}

TEST_CASE("the effective channel reproduces the full OTFS modem chain") {
  std::mt19937_64 rng(24);
  const DdGrid g(8, 4, 15e3);
  const DelayProfile p = DelayProfile::from_taps({0, 1, 3}, {0, -2, -5});
  const auto r = draw_realization(p, 3000.0, 12);
  const TimeVaryingChannel ch = build_time_domain(r, p, g);

  const oracle::Matrix x = oracle::random_matrix(8, 4, rng);
  const oracle::Matrix x_tf = oracle::isfft_sum(x);
  const oracle::Matrix fm = oracle::dft(8);
  std::vector<oracle::Vector> symbols;
  for (int k = 0; k < 4; ++k) symbols.push_back(fm.adjoint() * x_tf.col(k));
  const auto rx = oracle::tdl_receive(symbols, p.cp_length(), p.taps(), r.gains, r.doppler_hz, g.sample_period());
  oracle::Matrix y_tf(8, 4);
  for (int k = 0; k < 4; ++k) y_tf.col(k) = fm * rx[std::size_t(k)];
  const oracle::Matrix y_dd = fm.adjoint() * y_tf * oracle::dft(4);

  const CMatrix h = heff_rect_generators(ch).dense();
  CHECK((h * oracle::vec(x) - oracle::vec(y_dd)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dense construction refuses large grids") {
  const DdGrid g(64, 32, 15e3);
  const DelayProfile p = DelayProfile::vehicular_b();
  const TimeVaryingChannel ch = random_channel(g, p, 1000.0, 1);
  CHECK_THROWS_AS(heff_rect_direct(ch, 1024), SizeGuardError);
}

TEST_CASE("ideal-waveform mismatch channel") {
  const DdGrid g(6, 4, 15e3);
  const DelayProfile p = DelayProfile::from_taps({0, 1, 2}, {0, -2, -4});
  const EffectiveChannel eff = heff_rect_generators(random_channel(g, p, 4000.0, 13));
  const MismatchChannel mis = heff_ideal_mismatch(eff);
  const CMatrix h = eff.dense();

  // h_DD holds the first column of H_eff, one length-M segment per column.
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 6; ++m) CHECK(std::abs(mis.h_dd()(m, n) - h(n * 6 + m, 0)) < 1e-14);
  }

  // Doubly circulant: block (i, k) = circ{h_{(i-k) mod N}}, circ{h}(r, c) = h[(r - c) mod M].
  const CMatrix d = mis.dense();
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) {
          const Complex expected = mis.h_dd()(((r - c) % 6 + 6) % 6, ((i - k) % 4 + 4) % 4);
          worst = std::max(worst, std::abs(d(i * 6 + r, k * 6 + c) - expected));
        }
      }
    }
  }
  CHECK(worst == 0.0);
  CHECK(d.col(0) == h.col(0));
  CHECK((d - h).cwiseAbs().maxCoeff() > 1e-3);
}

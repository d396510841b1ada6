#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "otfs/error.hpp"
#include "otfs/qam.hpp"

using namespace otfs;

TEST_CASE("4-QAM Gray labels") {
  const QamConstellation q(4);
  const double a = 1.0 / std::sqrt(2.0);
  const std::vector<std::uint8_t> bits{0, 0, 0, 1, 1, 1, 1, 0};
  const CVector s = q.map(bits);
  REQUIRE(s.size() == 4);
  CHECK(std::abs(s(0) - Complex(a, a)) < 1e-15);
  CHECK(std::abs(s(1) - Complex(a, -a)) < 1e-15);
  CHECK(std::abs(s(2) - Complex(-a, -a)) < 1e-15);
  CHECK(std::abs(s(3) - Complex(-a, a)) < 1e-15);
}

TEST_CASE("property: constellations have unit energy and Gray neighbours") {
  for (int order : {4, 16, 64}) {
    const QamConstellation q(order);
    double energy = 0.0;
    for (const Complex& p : q.points()) energy += std::norm(p);
    CHECK(energy / order == doctest::Approx(1.0));

    // Nearest neighbours differ in exactly one bit.
    double dmin = 1e9;
    for (int i = 0; i < order; ++i) {
      for (int j = i + 1; j < order; ++j) dmin = std::min(dmin, std::abs(q.points()[i] - q.points()[j]));
    }
    for (int i = 0; i < order; ++i) {
      for (int j = 0; j < order; ++j) {
        if (i != j && std::abs(std::abs(q.points()[i] - q.points()[j]) - dmin) < 1e-12) {
          CHECK(__builtin_popcount(unsigned(i ^ j)) == 1);
        }
      }
    }
  }
}

TEST_CASE("property: demap inverts map, also under small perturbations") {
  std::mt19937_64 rng(51);
  std::bernoulli_distribution coin(0.5);
  for (int order : {4, 16, 64}) {
    const QamConstellation q(order);
    const int k = q.bits_per_symbol();
    std::vector<std::uint8_t> bits(std::size_t(k) * 2500);
    for (auto& b : bits) b = coin(rng);
    CVector s = q.map(bits);
    CHECK(q.demap(s) == bits);

    double dmin = 1e9;
    for (std::size_t i = 1; i < q.points().size(); ++i) dmin = std::min(dmin, std::abs(q.points()[i] - q.points()[0]));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * oracle::kPi);
    for (auto& v : s) v += 0.49 * dmin / std::sqrt(2.0) * oracle::expj(phase(rng));
    CHECK(q.demap(s) == bits);
  }
}

TEST_CASE("qam rejects bad input") {
  CHECK_THROWS_AS(QamConstellation(8), InvariantError);
  const QamConstellation q(16);
  CHECK_THROWS_AS(q.map(std::vector<std::uint8_t>{0, 1, 1}), DimensionError);
}

TEST_CASE("4-QAM over AWGN follows Q(1/sigma)") {
  const QamConstellation q(4);
  std::mt19937_64 rng(52);
  std::bernoulli_distribution coin(0.5);
  const double sigma2 = std::pow(10.0, -1.0);
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2 / 2.0));
  const std::size_t n_bits = 1'000'000;
  std::vector<std::uint8_t> bits(n_bits);
  for (auto& b : bits) b = coin(rng);
  CVector s = q.map(bits);
  for (auto& v : s) v += Complex(noise(rng), noise(rng));
  const auto decided = q.demap(s);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < n_bits; ++i) errors += decided[i] != bits[i];
  const double ber = double(errors) / double(n_bits);
  CHECK(ber == doctest::Approx(oracle::q_function(1.0 / std::sqrt(sigma2))).epsilon(0.15));
}

TEST_CASE("non-finite samples decide deterministically") {
  const QamConstellation q(4);
  CVector s(1);
  s(0) = Complex(std::nan(""), 1.0);
  CHECK(q.demap(s).size() == 2);
}

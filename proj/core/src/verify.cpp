#include "otfs/verify.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <random>
#include <sstream>

#include "otfs/channel.hpp"
#include "otfs/equalizers.hpp"
#include "otfs/error.hpp"
#include "otfs/modem_sim.hpp"
#include "otfs/struct_linalg.hpp"
#include "otfs/transforms.hpp"

namespace otfs {

namespace {

// z quantile for one-sided 99% confidence.
constexpr double kZ99 = 2.326;

const DdGrid kDeskGrid{16, 8, 15e3};
// Keeps f_max N T equal to the full-scale 1 kHz, N = 32 setup.
constexpr double kDeskDoppler = 4000.0;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

CVector random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CVector v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v;
}

double rel_error(const CVector& a, const CVector& ref) {
  return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

TimeVaryingChannel small_channel(std::uint64_t seed) {
  const DdGrid grid(8, 8, 15e3);
  const DelayProfile profile = DelayProfile::from_taps({0, 2, 5}, {0.0, -3.0, -6.0});
  return build_time_domain(draw_realization(profile, 2000.0, seed), profile, grid);
}

TimeVaryingChannel desk_channel(std::uint64_t seed) {
  const DelayProfile profile = DelayProfile::vehicular_b_scaled(kDeskGrid);
  return build_time_domain(draw_realization(profile, kDeskDoppler, seed), profile, kDeskGrid);
}

CMatrix random_structured(const DelayPattern& pattern, std::mt19937_64& rng) {
  const int m = pattern.dimension();
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMatrix s = CMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < pattern.path_count(); ++k) s(i, pattern.column(i, k)) = Complex(g(rng), g(rng));
  }
  return s;
}

DelayPattern random_pattern(int m, int taps, std::mt19937_64& rng) {
  std::vector<int> offsets{0};
  std::uniform_int_distribution<int> pick(1, m - 1);
  while (static_cast<int>(offsets.size()) < taps) {
    const int d = pick(rng);
    if (std::find(offsets.begin(), offsets.end(), d) == offsets.end()) offsets.push_back(d);
  }
  std::sort(offsets.begin(), offsets.end());
  return DelayPattern(offsets, m);
}

struct Outcome {
  bool passed;
  std::string detail;
};

Outcome heff_block_circulant(const VerifyOptions& o) {
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 10; ++r) {
    const CMatrix h = heff_rect_direct(small_channel(o.seed + r));
    worst = std::max(worst, block_shift_deviation(h, 8, 8));
  }
  return {worst < 1e-10, "max block-shift deviation " + fmt(worst)};
}

Outcome heff_generator_equivalence(const VerifyOptions& o) {
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 10; ++r) {
    const TimeVaryingChannel ch = small_channel(o.seed + r);
    const CMatrix diff = heff_rect_direct(ch) - heff_rect_generators(ch).dense();
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return {worst < 1e-10, "max |direct - generators| " + fmt(worst)};
}

template <class Check>
Outcome over_random_structured(const VerifyOptions& o, Check check) {
  std::mt19937_64 rng(o.seed);
  double worst = 0.0;
  bool ok = true;
  for (int m : {8, 16, 32}) {
    for (int taps : {2, 4, 6}) {
      for (int rep = 0; rep < 4; ++rep) {
        const DelayPattern pattern = random_pattern(m, taps, rng);
        const CMatrix s = random_structured(pattern, rng);
        const auto [value, good] = check(s, pattern);
        worst = std::max(worst, value);
        ok = ok && good;
      }
    }
  }
  return {ok, "worst " + fmt(worst)};
}

Outcome structured_lu_reconstruction(const VerifyOptions& o) {
  return over_random_structured(o, [](const CMatrix& s, const DelayPattern& pattern) {
    const LuWorkspace ws = structured_lu(s, pattern);
    const double err = (ws.multipliers * ws.upper - s).cwiseAbs().maxCoeff() / s.cwiseAbs().maxCoeff();
    return std::pair{err, err < 1e-9};
  });
}

Outcome structured_lu_fill_confinement(const VerifyOptions& o) {
  return over_random_structured(o, [](const CMatrix& s, const DelayPattern& pattern) {
    const LuWorkspace ws = structured_lu(s, pattern);
    const int m = pattern.dimension();
    int stray = 0;
    for (int i = 0; i < pattern.boundary(); ++i) {
      for (int j = 0; j < i; ++j) {
        if (!pattern.contains_offset(i - j) && ws.multipliers(i, j) != Complex{}) ++stray;
      }
      for (int j = i + 1; j < pattern.boundary(); ++j) {
        if (ws.upper(i, j) != Complex{}) ++stray;
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < i; ++j) {
        if (ws.upper(i, j) != Complex{}) ++stray;
      }
    }
    return std::pair{static_cast<double>(stray), stray == 0};
  });
}

Outcome structured_inverse_residual(const VerifyOptions& o) {
  return over_random_structured(o, [](const CMatrix& s, const DelayPattern& pattern) {
    const CMatrix inv = structured_invert(s, pattern);
    const CMatrix oracle = dense_inverse_oracle(s).inverse;
    const double residual = (s * inv - CMatrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
    const double vs_oracle = (inv - oracle).cwiseAbs().maxCoeff() / oracle.cwiseAbs().maxCoeff();
    const double err = std::max(residual, vs_oracle);
    return std::pair{err, err < 1e-8};
  });
}

Outcome zf_low_vs_direct(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed);
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 5; ++r) {
    const EffectiveChannel eff = heff_rect_generators(desk_channel(o.seed + r));
    const CVector y = random_vector(kDeskGrid.size(), rng);
    worst = std::max(worst, rel_error(zf_build(eff, eff.pattern()).apply(y), direct_zf_oracle(eff.dense(), y)));
  }
  return {worst < 1e-8, "max relative error " + fmt(worst)};
}

Outcome mmse_low_vs_direct(const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed);
  MmseOptions mmse;
  mmse.flip_conjugate_index = o.inject_mmse_index_fault;
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 5; ++r) {
    const EffectiveChannel eff = heff_rect_generators(desk_channel(o.seed + r));
    const CMatrix dense = eff.dense();
    for (double sigma2 : {0.1, 0.01}) {
      const CVector y = random_vector(kDeskGrid.size(), rng);
      const CVector low = mmse_build(eff, sigma2, eff.pattern(), mmse).apply(y);
      worst = std::max(worst, rel_error(low, direct_mmse_oracle(dense, sigma2, y)));
    }
  }
  return {worst < 1e-8, "max relative error " + fmt(worst)};
}

Outcome mismatch_degradation(const VerifyOptions& o) {
  SimConfig cfg;
  cfg.grid = kDeskGrid;
  cfg.profile.name = "vehicular_b_scaled";
  cfg.f_max_hz = kDeskDoppler;
  cfg.snr_db = {12.0};
  cfg.frames = o.mismatch_frames;
  cfg.seed = o.seed;
  cfg.equalizers = {EqualizerKind::MmseLow, EqualizerKind::IdealMismatchMmse};
  const SweepResult result = run_ber_sweep(cfg);
  const BerRecord* matched = result.find(EqualizerKind::MmseLow, 12.0);
  const BerRecord* ideal = result.find(EqualizerKind::IdealMismatchMmse, 12.0);
  const double z = proportion_z(ideal->errors, ideal->bits, matched->errors, matched->bits);
  return {z > kZ99, "BER ideal " + fmt(ideal->ber()) + " vs matched " + fmt(matched->ber()) + ", z = " + fmt(z)};
}

struct Property {
  const char* name;
  Outcome (*run)(const VerifyOptions&);
};

const std::vector<Property>& properties() {
  static const std::vector<Property> table = {
      {"heff_block_circulant", heff_block_circulant},
      {"heff_generator_equivalence", heff_generator_equivalence},
      {"structured_lu_reconstruction", structured_lu_reconstruction},
      {"structured_lu_fill_confinement", structured_lu_fill_confinement},
      {"structured_inverse_residual", structured_inverse_residual},
      {"zf_low_vs_direct", zf_low_vs_direct},
      {"mmse_low_vs_direct", mmse_low_vs_direct},
      {"mismatch_degradation", mismatch_degradation},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : properties()) out.emplace_back(p.name);
    return out;
  }();
  return names;
}

std::vector<PropertyResult> run_verification(const VerifyOptions& options,
                                             const std::function<void(const PropertyResult&)>& on_result) {
  std::vector<PropertyResult> results;
  for (const auto& p : properties()) {
    PropertyResult r;
    r.name = p.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome out = p.run(options);
      r.passed = out.passed;
      r.detail = out.detail;
    } catch (const Error& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

double block_shift_deviation(const CMatrix& a, int m, int n) {
  if (a.rows() != static_cast<Eigen::Index>(m) * n || a.cols() != a.rows()) {
    throw DimensionError("block_shift_deviation: matrix must be NM x NM");
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const int shift = ((k - i) % n + n) % n;
      const double dev = (a.block(i * m, k * m, m, m) - a.block(0, shift * m, m, m)).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

double proportion_z(std::uint64_t errors_a, std::uint64_t bits_a, std::uint64_t errors_b, std::uint64_t bits_b) {
  const double na = static_cast<double>(bits_a);
  const double nb = static_cast<double>(bits_b);
  const double pa = static_cast<double>(errors_a) / na;
  const double pb = static_cast<double>(errors_b) / nb;
  const double pooled = static_cast<double>(errors_a + errors_b) / (na + nb);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
  if (se == 0.0) return pa > pb ? std::numeric_limits<double>::infinity() : 0.0;
  return (pa - pb) / se;
}

}  // namespace otfs

#include "otfs/modem_sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "otfs/config.hpp"
#include "otfs/equalizers.hpp"
#include "otfs/error.hpp"
#include "otfs/op_counter.hpp"
#include "otfs/qam.hpp"
#include "otfs/transforms.hpp"

namespace otfs {

namespace {

constexpr EqualizerKind kAllKinds[] = {EqualizerKind::ZfLow,           EqualizerKind::ZfDirect,
                                       EqualizerKind::MmseLow,         EqualizerKind::MmseDirect,
                                       EqualizerKind::IdealMismatchZf, EqualizerKind::IdealMismatchMmse};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ frame) ^ stream);
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool depends_on_noise(EqualizerKind kind) {
  return kind == EqualizerKind::MmseLow || kind == EqualizerKind::MmseDirect ||
         kind == EqualizerKind::IdealMismatchMmse;
}

double relative_deviation(const CVector& a, const CVector& reference) {
  const double scale = reference.cwiseAbs().maxCoeff();
  return (a - reference).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

// A built equalizer of any family behind one apply().
class AnyEqualizer {
 public:
  AnyEqualizer() = default;
  template <class Eq>
  explicit AnyEqualizer(Eq eq) : apply_([e = std::move(eq)](const CVector& y) { return e.apply(y); }) {}
  CVector apply(const CVector& y) const { return apply_(y); }
  explicit operator bool() const { return static_cast<bool>(apply_); }

 private:
  std::function<CVector(const CVector&)> apply_;
};

struct FrameInputs {
  const TimeVaryingChannel* channel;
  const EffectiveChannel* effective;
  const CMatrix* dense_heff;
  const MismatchChannel* mismatch;
};

AnyEqualizer build_equalizer(EqualizerKind kind, const FrameInputs& in, double sigma2) {
  switch (kind) {
    case EqualizerKind::ZfLow:
      return AnyEqualizer(zf_build(*in.effective, in.effective->pattern()));
    case EqualizerKind::MmseLow:
      return AnyEqualizer(mmse_build(*in.effective, sigma2, in.effective->pattern()));
    case EqualizerKind::ZfDirect:
      return AnyEqualizer(direct_zf_build(*in.dense_heff));
    case EqualizerKind::MmseDirect:
      return AnyEqualizer(direct_mmse_build(*in.dense_heff, sigma2));
    case EqualizerKind::IdealMismatchZf:
      return AnyEqualizer(ideal_zf_build(*in.mismatch));
    case EqualizerKind::IdealMismatchMmse:
      return AnyEqualizer(ideal_mmse_build(*in.mismatch, sigma2));
  }
  throw Error("unknown equalizer kind");
}

struct Cell {
  std::uint64_t errors = 0;
  bool skipped = false;
  std::uint64_t mults = 0;
  double wall_ms = 0.0;
};

struct FrameOutcome {
  std::vector<Cell> cells;  // [snr][equalizer]
  double zf_deviation = 0.0;
  double mmse_deviation = 0.0;
};

FrameOutcome run_frame(const SimConfig& cfg, const DelayProfile& profile, const QamConstellation& qam,
                       std::uint64_t frame) {
  const DdGrid& grid = cfg.grid;
  const auto& kinds = cfg.equalizers;
  const std::size_t n_eq = kinds.size();
  FrameOutcome out;
  out.cells.resize(cfg.snr_db.size() * n_eq);

  const TimeVaryingChannel channel = frame_channel(cfg, profile, frame);
  const EffectiveChannel effective = heff_rect_generators(channel);

  std::mt19937_64 data_rng(stream_seed(cfg.seed, frame, 1));
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(grid.size()) * qam.bits_per_symbol());
  for (auto& b : bits) b = coin(data_rng) ? 1 : 0;
  const CVector x = qam.map(bits);

  std::mt19937_64 noise_rng(stream_seed(cfg.seed, frame, 2));
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector unit_noise(grid.size());
  for (Eigen::Index i = 0; i < unit_noise.size(); ++i) unit_noise(i) = Complex(normal(noise_rng), normal(noise_rng));

  const CVector hx = propagate_frame(x, channel);

  const bool want_dense = std::any_of(kinds.begin(), kinds.end(), is_direct);
  const bool want_mismatch = std::any_of(kinds.begin(), kinds.end(), [](EqualizerKind k) {
    return k == EqualizerKind::IdealMismatchZf || k == EqualizerKind::IdealMismatchMmse;
  });
  std::optional<CMatrix> dense_heff;
  if (want_dense) dense_heff = heff_rect_direct(channel);
  std::optional<MismatchChannel> mismatch;
  if (want_mismatch) mismatch = heff_ideal_mismatch(effective);
  const FrameInputs inputs{&channel, &effective, dense_heff ? &*dense_heff : nullptr, mismatch ? &*mismatch : nullptr};

  // Noise-independent equalizers are built once per frame; their build cost
  // is charged to every SNR point they serve.
  struct Built {
    AnyEqualizer eq;
    bool singular = false;
    std::uint64_t mults = 0;
    double wall_ms = 0.0;
  };
  std::vector<Built> fixed(n_eq);
  auto build = [&](EqualizerKind kind, double sigma2) {
    Built b;
    const ops::ScopedCount count;
    const auto start = Clock::now();
    try {
      b.eq = build_equalizer(kind, inputs, sigma2);
    } catch (const SingularMatrixError&) {
      b.singular = true;
    }
    b.wall_ms = elapsed_ms(start);
    b.mults = count.delta().mults;
    return b;
  };
  for (std::size_t e = 0; e < n_eq; ++e) {
    if (!depends_on_noise(kinds[e])) fixed[e] = build(kinds[e], 0.0);
  }

  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const double sigma2 = noise_variance(cfg.snr_db[s]);
    const CVector y = hx + std::sqrt(sigma2) * unit_noise;
    std::vector<std::optional<CVector>> estimates(n_eq);
    for (std::size_t e = 0; e < n_eq; ++e) {
      Cell& cell = out.cells[s * n_eq + e];
      Built b = depends_on_noise(kinds[e]) ? build(kinds[e], sigma2) : fixed[e];
      if (b.singular) {
        cell.skipped = true;
        continue;
      }
      const ops::ScopedCount count;
      const auto start = Clock::now();
      CVector estimate = b.eq.apply(y);
      cell.wall_ms = b.wall_ms + elapsed_ms(start);
      cell.mults = b.mults + count.delta().mults;
      const auto decided = qam.demap(estimate);
      for (std::size_t i = 0; i < bits.size(); ++i) cell.errors += decided[i] != bits[i];
      estimates[e] = std::move(estimate);
    }
    if (cfg.check_oracles) {
      auto deviation = [&](EqualizerKind low, EqualizerKind direct) -> double {
        const auto il = std::find(kinds.begin(), kinds.end(), low);
        const auto id = std::find(kinds.begin(), kinds.end(), direct);
        if (il == kinds.end() || id == kinds.end()) return 0.0;
        const auto& a = estimates[static_cast<std::size_t>(il - kinds.begin())];
        const auto& b = estimates[static_cast<std::size_t>(id - kinds.begin())];
        return a && b ? relative_deviation(*a, *b) : 0.0;
      };
      out.zf_deviation = std::max(out.zf_deviation, deviation(EqualizerKind::ZfLow, EqualizerKind::ZfDirect));
      out.mmse_deviation = std::max(out.mmse_deviation, deviation(EqualizerKind::MmseLow, EqualizerKind::MmseDirect));
    }
  }
  return out;
}

bool has_kind(const std::vector<EqualizerKind>& kinds, EqualizerKind k) {
  return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

}  // namespace

std::string_view equalizer_name(EqualizerKind kind) {
  switch (kind) {
    case EqualizerKind::ZfLow: return "zf_low";
    case EqualizerKind::ZfDirect: return "zf_direct";
    case EqualizerKind::MmseLow: return "mmse_low";
    case EqualizerKind::MmseDirect: return "mmse_direct";
    case EqualizerKind::IdealMismatchZf: return "ideal_mismatch_zf";
    case EqualizerKind::IdealMismatchMmse: return "ideal_mismatch_mmse";
  }
  return "unknown";
}

std::optional<EqualizerKind> parse_equalizer_name(std::string_view name) {
  for (EqualizerKind k : kAllKinds) {
    if (equalizer_name(k) == name) return k;
  }
  return std::nullopt;
}

bool is_direct(EqualizerKind kind) { return kind == EqualizerKind::ZfDirect || kind == EqualizerKind::MmseDirect; }

DelayProfile ProfileSelection::resolve(const DdGrid& grid) const {
  DelayProfile profile = [&] {
    if (name == "vehicular_b") return DelayProfile::vehicular_b();
    if (name == "vehicular_b_scaled") return DelayProfile::vehicular_b_scaled(grid);
    if (name == "custom") return DelayProfile::from_taps(taps, powers_db);
    throw InvariantError("channel.profile", "unknown profile '" + name + "'");
  }();
  const int cp = cp_length == 0 ? profile.cp_length() : cp_length;
  profile = DelayProfile::from_taps(profile.taps(), profile.powers_db(), cp);
  profile.pattern(grid);
  return profile;
}

void SimConfig::validate() const {
  delay_profile();
  if (!(f_max_hz >= 0.0) || !std::isfinite(f_max_hz)) throw InvariantError("channel.f_max", "must be >= 0");
  if (snr_db.empty()) throw InvariantError("sim.snr_db", "SNR list must not be empty");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw InvariantError("sim.snr_db", "SNR values must be finite");
  }
  if (frames < 1) throw InvariantError("sim.frames", "must be >= 1");
  if (equalizers.empty()) throw InvariantError("sim.equalizers", "select at least one equalizer");
  QamConstellation check(qam_order);
  if (jobs < 1) throw InvariantError("sim.jobs", "must be >= 1");
  if (bench.repetitions < 1) throw InvariantError("bench.repetitions", "must be >= 1");
  if (bench.sizes.empty()) throw InvariantError("bench.sizes", "must not be empty");
  for (int s : bench.sizes) {
    if (s < 1) throw InvariantError("bench.sizes", "sizes must be >= 1");
  }
  if (!(bench.sigma2 >= 0.0)) throw InvariantError("bench.sigma2", "must be >= 0");
  if (verify.mismatch_frames < 1) throw InvariantError("verify.mismatch_frames", "must be >= 1");
  if (std::any_of(equalizers.begin(), equalizers.end(), is_direct) && grid.size() > 4096) {
    throw InvariantError("sim.equalizers", "direct equalizers need NM <= 4096");
  }
}

double noise_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

const BerRecord* SweepResult::find(EqualizerKind kind, double snr_db) const {
  for (const auto& r : records) {
    if (r.equalizer == kind && r.snr_db == snr_db) return &r;
  }
  return nullptr;
}

CVector propagate_frame(const CVector& x, const TimeVaryingChannel& channel) {
  const DdGrid& grid = channel.grid();
  if (x.size() != grid.size()) throw DimensionError("propagate_frame: input length must be N*M");
  CVector s = x;
  detail::transform_segments(s, grid.M(), grid.N(), fft::Direction::Inverse);
  CVector r = channel.apply(s);
  detail::transform_segments(r, grid.M(), grid.N(), fft::Direction::Forward);
  return r;
}

CVector transmit_frame(const DdFrame& x, const TimeVaryingChannel& channel, double sigma2, std::mt19937_64& rng) {
  if (!(x.grid() == channel.grid())) throw DimensionError("transmit_frame: frame and channel grids differ");
  CVector y = propagate_frame(vectorize(x), channel);
  if (sigma2 > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma2 / 2.0));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += Complex(normal(rng), normal(rng));
  }
  return y;
}

TimeVaryingChannel frame_channel(const SimConfig& config, const DelayProfile& profile, std::uint64_t frame) {
  const PathRealization realization = draw_realization(profile, config.f_max_hz, stream_seed(config.seed, frame, 0));
  return build_time_domain(realization, profile, config.grid);
}

SweepResult run_ber_sweep(const SimConfig& config) {
  config.validate();
  const DelayProfile profile = config.delay_profile();
  const QamConstellation qam(config.qam_order);
  const auto frames = static_cast<std::size_t>(config.frames);

  std::vector<FrameOutcome> outcomes(frames);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t f = next++; f < frames; f = next++) {
      try {
        outcomes[f] = run_frame(config, profile, qam, f);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = frames;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(frames)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t n_eq = config.equalizers.size();
  const auto bits_per_frame = static_cast<std::uint64_t>(config.grid.size()) * qam.bits_per_symbol();
  SweepResult result;
  double zf_dev = 0.0;
  double mmse_dev = 0.0;
  for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
    for (std::size_t e = 0; e < n_eq; ++e) {
      BerRecord rec;
      rec.equalizer = config.equalizers[e];
      rec.snr_db = config.snr_db[s];
      for (const auto& o : outcomes) {
        const Cell& c = o.cells[s * n_eq + e];
        ++rec.frames;
        if (c.skipped) {
          ++rec.skipped;
          continue;
        }
        rec.bits += bits_per_frame;
        rec.errors += c.errors;
        rec.wall_ms += c.wall_ms;
        rec.mult_count += c.mults;
      }
      result.records.push_back(rec);
    }
  }
  for (const auto& o : outcomes) {
    zf_dev = std::max(zf_dev, o.zf_deviation);
    mmse_dev = std::max(mmse_dev, o.mmse_deviation);
  }
  if (config.check_oracles) {
    if (has_kind(config.equalizers, EqualizerKind::ZfLow) && has_kind(config.equalizers, EqualizerKind::ZfDirect)) {
      result.zf_oracle_deviation = zf_dev;
    }
    if (has_kind(config.equalizers, EqualizerKind::MmseLow) &&
        has_kind(config.equalizers, EqualizerKind::MmseDirect)) {
      result.mmse_oracle_deviation = mmse_dev;
    }
  }
  return result;
}

void write_ber_csv(std::ostream& out, const SimConfig& config, const SweepResult& result) {
  out << "# otfs simulate\n";
  std::istringstream echo(to_config_text(config));
  for (std::string line; std::getline(echo, line);) out << "# " << line << '\n';
  out << "equalizer,snr_db,bits,errors,ber,frames,skipped,wall_ms,mult_count\n";
  char buf[256];
  for (const auto& r : result.records) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%llu,%llu,%.9e,%llu,%llu,%.3f,%llu\n",
                  std::string(equalizer_name(r.equalizer)).c_str(), r.snr_db,
                  static_cast<unsigned long long>(r.bits), static_cast<unsigned long long>(r.errors), r.ber(),
                  static_cast<unsigned long long>(r.frames), static_cast<unsigned long long>(r.skipped), r.wall_ms,
                  static_cast<unsigned long long>(r.mult_count));
    out << buf;
  }
  if (result.zf_oracle_deviation) out << "# zf_oracle_max_rel_deviation = " << *result.zf_oracle_deviation << '\n';
  if (result.mmse_oracle_deviation) {
    out << "# mmse_oracle_max_rel_deviation = " << *result.mmse_oracle_deviation << '\n';
  }
}

// Complexity

double analytic_direct(int m, int n) {
  const double nm = static_cast<double>(n) * m;
  return nm * nm * nm;
}

double analytic_zf(int m, int n) { return static_cast<double>(m) * m * n * std::log2(static_cast<double>(n)); }

double analytic_mmse(int m, int n, int p) { return static_cast<double>(m) * m * n * n * p; }

HeadlineRatios headline_ratios(int m, int n, int p) {
  return {analytic_direct(m, n) / analytic_zf(m, n), analytic_direct(m, n) / analytic_mmse(m, n, p)};
}

std::vector<ComplexityRow> complexity_report(const DdGrid& grid, const DelayProfile& profile,
                                             const ComplexityOptions& options) {
  const int m = grid.M();
  const int n = grid.N();
  const int p = profile.path_count();
  const PathRealization realization = draw_realization(profile, options.f_max_hz, options.seed);
  const TimeVaryingChannel channel = build_time_domain(realization, profile, grid);
  const EffectiveChannel effective = heff_rect_generators(channel);
  const DelayPattern& pattern = effective.pattern();

  CVector y(grid.size());
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = Complex(normal(rng), normal(rng));

  auto measure = [&](auto&& run) {
    std::uint64_t mults = 0;
    std::vector<double> times;
    for (int r = 0; r < options.repetitions; ++r) {
      const ops::ScopedCount count;
      const auto start = Clock::now();
      run();
      times.push_back(elapsed_ms(start));
      if (r == 0) mults = count.delta().mults;
    }
    std::nth_element(times.begin(), times.begin() + static_cast<long>(times.size() / 2), times.end());
    return std::pair{mults, times[times.size() / 2]};
  };

  std::vector<ComplexityRow> rows;
  auto add = [&](std::string scheme, double analytic, std::optional<std::pair<std::uint64_t, double>> measured) {
    ComplexityRow row{std::move(scheme), m, n, p, std::nullopt, std::nullopt, analytic};
    if (measured) {
      row.mult_count = measured->first;
      row.wall_ms = measured->second;
    }
    rows.push_back(std::move(row));
  };

  add("zf_structured", analytic_zf(m, n), measure([&] {
        const ZfEqualizer eq = zf_build(effective, pattern);
        (void)eq.apply(y);
      }));
  add("mmse_structured", analytic_mmse(m, n, p), measure([&] {
        const MmseEqualizer eq = mmse_build(effective, options.sigma2, pattern);
        (void)eq.apply(y);
      }));

  if (grid.size() <= options.dense_max_nm) {
    const CMatrix heff = effective.dense();
    add("zf_direct", analytic_direct(m, n), measure([&] { (void)direct_zf_build(heff).apply(y); }));
    add("mmse_direct", analytic_direct(m, n), measure([&] { (void)direct_mmse_build(heff, options.sigma2).apply(y); }));
  } else {
    add("zf_direct", analytic_direct(m, n), std::nullopt);
    add("mmse_direct", analytic_direct(m, n), std::nullopt);
  }
  return rows;
}

void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows) {
  out << "scheme,M,N,P,mult_count,wall_ms,analytic_formula_value\n";
  char buf[256];
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.m << ',' << r.n << ',' << r.p << ',';
    if (r.mult_count) {
      std::snprintf(buf, sizeof buf, "%llu,%.3f", static_cast<unsigned long long>(*r.mult_count), *r.wall_ms);
      out << buf;
    } else {
      out << "skipped (guard),skipped (guard)";
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", r.analytic);
    out << buf;
  }
}

}  // namespace otfs

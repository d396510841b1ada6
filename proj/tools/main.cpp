// otfs: command-line front end for the OTFS equalization library.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "otfs/channel_io.hpp"
#include "otfs/config.hpp"
#include "otfs/error.hpp"
#include "otfs/modem_sim.hpp"
#include "otfs/verify.hpp"

namespace {

enum ExitCode { kOk = 0, kPropertyFailure = 1, kUsageError = 2, kNumericalFailure = 3 };

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::optional<int> jobs;
  bool full_scale = false;
  bool list = false;
  bool verbose = false;
  std::uint64_t frame = 0;
};

const std::vector<std::string> kFullScalePreset = {
    "grid.M=64",           "grid.N=32",       "grid.delta_f=15000", "channel.profile=vehicular_b",
    "channel.cp_length=0", "channel.f_max=1000", "sim.frames=20000", "sim.qam_order=4",
};

otfs::SimConfig load_config(const Options& opt) {
  std::vector<std::string> overrides;
  if (opt.full_scale) overrides = kFullScalePreset;
  overrides.insert(overrides.end(), opt.overrides.begin(), opt.overrides.end());
  if (opt.seed) overrides.push_back("sim.seed=" + std::to_string(*opt.seed));
  if (opt.jobs) overrides.push_back("sim.jobs=" + std::to_string(*opt.jobs));
  return opt.config_path.empty() ? otfs::parse_config_text("", overrides)
                                 : otfs::parse_config(opt.config_path, overrides);
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw otfs::ConfigError(0, "--out", "cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void warn_if_heavy(const otfs::SimConfig& config, const Options& opt) {
  const double work = static_cast<double>(config.grid.size()) * config.frames * config.snr_db.size();
  if (opt.full_scale || work < 5e6) return;
  otfs::SimConfig probe = config;
  probe.frames = 1;
  const auto start = std::chrono::steady_clock::now();
  otfs::run_ber_sweep(probe);
  const double per_frame = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double minutes = per_frame * config.frames / config.jobs / 60.0;
  std::fprintf(stderr,
               "warning: %d frames on a %d x %d grid, estimated runtime %.1f min with %d job(s); "
               "pass --full-scale to acknowledge\n",
               config.frames, config.grid.M(), config.grid.N(), minutes, config.jobs);
}

int cmd_simulate(const Options& opt) {
  const otfs::SimConfig config = load_config(opt);
  warn_if_heavy(config, opt);
  const otfs::SweepResult result = otfs::run_ber_sweep(config);
  Output out(opt.out_path);
  otfs::write_ber_csv(out.stream(), config, result);
  if (opt.verbose) {
    for (const auto& r : result.records) {
      std::fprintf(stderr, "%-20s snr %5.1f dB  ber %.3e  skipped %llu\n",
                   std::string(otfs::equalizer_name(r.equalizer)).c_str(), r.snr_db, r.ber(),
                   static_cast<unsigned long long>(r.skipped));
    }
  }
  return kOk;
}

int cmd_bench(const Options& opt) {
  const otfs::SimConfig config = load_config(opt);
  otfs::ComplexityOptions copt;
  copt.repetitions = config.bench.repetitions;
  copt.dense_max_nm = config.bench.dense_max_nm;
  copt.sigma2 = config.bench.sigma2;
  copt.f_max_hz = config.f_max_hz;
  copt.seed = config.seed;

  std::vector<otfs::ComplexityRow> rows;
  for (int m : config.bench.sizes) {
    for (int n : config.bench.sizes) {
      const otfs::DdGrid grid(m, n, config.grid.subcarrier_spacing());
      otfs::DelayProfile profile = otfs::DelayProfile::vehicular_b();
      try {
        profile = config.profile.resolve(grid);
      } catch (const otfs::InvariantError& e) {
        std::fprintf(stderr, "skipping M=%d N=%d: %s\n", m, n, e.what());
        continue;
      }
      if (opt.verbose) std::fprintf(stderr, "bench M=%d N=%d P=%d\n", m, n, profile.path_count());
      auto report = otfs::complexity_report(grid, profile, copt);
      rows.insert(rows.end(), report.begin(), report.end());
    }
  }

  Output out(opt.out_path);
  std::ostream& os = out.stream();
  os << "# otfs bench\n";
  std::istringstream echo(otfs::to_config_text(config));
  for (std::string line; std::getline(echo, line);) os << "# " << line << '\n';
  otfs::write_complexity_csv(os, rows);

  int p32 = 6;
  try {
    p32 = config.profile.resolve(otfs::DdGrid(32, 32, config.grid.subcarrier_spacing())).path_count();
  } catch (const otfs::InvariantError&) {
  }
  const auto ratios = otfs::headline_ratios(32, 32, p32);
  char buf[160];
  std::snprintf(buf, sizeof buf, "# headline M=N=32 P=%d: analytic zf ratio %.1f, analytic mmse ratio %.1f\n", p32,
                ratios.zf, ratios.mmse);
  os << buf;
  return kOk;
}

int cmd_verify(const Options& opt) {
  if (opt.list) {
    for (const auto& name : otfs::property_names()) std::cout << name << '\n';
    return kOk;
  }
  const otfs::SimConfig config = load_config(opt);
  otfs::VerifyOptions vopt;
  vopt.seed = config.seed;
  vopt.inject_mmse_index_fault = config.verify.inject_mmse_index_fault;
  vopt.mismatch_frames = config.verify.mismatch_frames;
  bool all = true;
  otfs::run_verification(vopt, [&](const otfs::PropertyResult& r) {
    std::printf("%-32s %s  (%s, %.2f s)\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str(), r.seconds);
    std::fflush(stdout);
    all = all && r.passed;
  });
  return all ? kOk : kPropertyFailure;
}

int cmd_export_channel(const Options& opt) {
  const otfs::SimConfig config = load_config(opt);
  const otfs::TimeVaryingChannel channel = otfs::frame_channel(config, config.delay_profile(), opt.frame);
  Output out(opt.out_path);
  otfs::export_channel(out.stream(), channel);
  return kOk;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "Configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", opt.out_path, "Output file (default: stdout)");
  sub->add_option("--seed", opt.seed, "Override sim.seed");
  sub->add_option("--set", opt.overrides, "Override a config key, KEY=VALUE (repeatable)")->take_all();
  sub->add_flag("-v,--verbose", opt.verbose, "Progress on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OTFS low-complexity ZF/MMSE equalization: simulation, benchmarks and checks", "otfs"};
  app.require_subcommand(1);
  Options opt;

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo BER sweep, CSV output");
  add_common(simulate, opt);
  simulate->add_option("--jobs", opt.jobs, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  simulate->add_flag("--full-scale", opt.full_scale, "Use the 64 x 32 vehicular-B setup with 20000 frames");

  auto* bench = app.add_subcommand("bench", "Operation counts and timings, CSV output");
  add_common(bench, opt);
  bench->add_flag("--full-scale", opt.full_scale, "Start from the full-scale setup");

  auto* verify = app.add_subcommand("verify", "Run the equivalence and invariant properties");
  add_common(verify, opt);
  verify->add_flag("--list", opt.list, "Print property names and exit");

  auto* export_channel = app.add_subcommand("export-channel", "Write one channel realization as text");
  add_common(export_channel, opt);
  export_channel->add_option("--frame", opt.frame, "Frame index whose channel is exported");
  export_channel->add_flag("--full-scale", opt.full_scale, "Start from the full-scale setup");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (bench->parsed()) return cmd_bench(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (export_channel->parsed()) return cmd_export_channel(opt);
  } catch (const otfs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsageError;
  } catch (const otfs::InvariantError& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kUsageError;
  } catch (const otfs::Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalFailure;
  }
  return kUsageError;
}

#include "otfs/channel_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "otfs/error.hpp"

namespace otfs {

namespace {

constexpr const char* kMagic = "# otfs channel v1";

bool next_content_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos && line[line.find_first_not_of(" \t")] != '#') return true;
  }
  return false;
}

}  // namespace

void export_channel(std::ostream& out, const TimeVaryingChannel& channel) {
  const DdGrid& grid = channel.grid();
  const DelayPattern& pattern = channel.pattern();
  char buf[128];
  out << kMagic << '\n';
  std::snprintf(buf, sizeof buf, "%d %d %.17g %d %d", grid.M(), grid.N(), grid.subcarrier_spacing(),
                channel.cp_length(), pattern.path_count());
  out << buf;
  for (int d : pattern.offsets()) out << ' ' << d;
  out << '\n';
  for (int p = 0; p < grid.N(); ++p) {
    const CMatrix& taps = channel.taps()[static_cast<std::size_t>(p)];
    for (int m = 0; m < grid.M(); ++m) {
      for (int k = 0; k < pattern.path_count(); ++k) {
        const Complex v = taps(m, k);
        std::snprintf(buf, sizeof buf, "%d %d %d %.17g %.17g\n", p + 1, m + 1, k + 1, v.real(), v.imag());
        out << buf;
      }
    }
  }
}

TimeVaryingChannel import_channel(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ConfigError(1, "", "empty channel file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMagic) throw ConfigError(1, "", "missing '" + std::string(kMagic) + "' header");

  if (!next_content_line(in, line, line_no)) throw ConfigError(line_no, "", "missing dimension line");
  std::istringstream header(line);
  int m = 0, n = 0, cp = 0, paths = 0;
  double delta_f = 0.0;
  if (!(header >> m >> n >> delta_f >> cp >> paths) || paths < 1) {
    throw ConfigError(line_no, "", "expected 'M N delta_f L_cp P D_1 .. D_P'");
  }
  std::vector<int> offsets(static_cast<std::size_t>(paths));
  for (int& d : offsets) {
    if (!(header >> d)) throw ConfigError(line_no, "", "expected " + std::to_string(paths) + " delay offsets");
  }
  const DdGrid grid(m, n, delta_f);
  DelayPattern pattern(offsets, m);

  std::vector<CMatrix> taps(static_cast<std::size_t>(n), CMatrix::Zero(m, paths));
  std::vector<char> seen(static_cast<std::size_t>(n) * m * paths, 0);
  std::size_t count = 0;
  while (next_content_line(in, line, line_no)) {
    std::istringstream row(line);
    int p = 0, r = 0, k = 0;
    double re = 0.0, im = 0.0;
    std::string extra;
    if (!(row >> p >> r >> k >> re >> im) || (row >> extra)) throw ConfigError(line_no, "", "expected 'p m k re im'");
    if (p < 1 || p > n || r < 1 || r > m || k < 1 || k > paths) throw ConfigError(line_no, "", "index out of range");
    const auto slot = (static_cast<std::size_t>(p - 1) * m + (r - 1)) * paths + (k - 1);
    if (seen[slot]) throw ConfigError(line_no, "", "duplicate tap entry");
    seen[slot] = 1;
    ++count;
    taps[static_cast<std::size_t>(p - 1)](r - 1, k - 1) = Complex(re, im);
  }
  if (count != seen.size()) {
    throw ConfigError(line_no, "", "expected " + std::to_string(seen.size()) + " tap entries, found " +
                                       std::to_string(count));
  }
  return TimeVaryingChannel(grid, std::move(pattern), cp, std::move(taps));
}

}  // namespace otfs

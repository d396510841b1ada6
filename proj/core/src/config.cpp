#include "otfs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "otfs/error.hpp"

namespace otfs {

namespace {

struct RawValue {
  std::string text;
  int line = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  if (trim(text).empty()) return items;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    items.emplace_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

// Shortest text that reads back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Parsing helpers report the offending key and the line it came from.
class Reader {
 public:
  Reader(std::string key, const RawValue& raw) : key_(std::move(key)), raw_(raw) {}

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(raw_.line, key_, message); }

  template <class Int>
  Int integer(std::string_view text) const {
    Int value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) fail("expected an integer, got '" + std::string(text) + "'");
    return value;
  }

  double real(std::string_view text) const {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(value)) {
      fail("expected a finite number, got '" + std::string(text) + "'");
    }
    return value;
  }

  int as_int() const { return integer<int>(raw_.text); }
  std::uint64_t as_u64() const { return integer<std::uint64_t>(raw_.text); }
  double as_double() const { return real(raw_.text); }

  bool as_bool() const {
    if (raw_.text == "true" || raw_.text == "1") return true;
    if (raw_.text == "false" || raw_.text == "0") return false;
    fail("expected true or false, got '" + raw_.text + "'");
  }

  std::vector<int> as_int_list() const {
    std::vector<int> out;
    for (const auto& item : split_list(raw_.text)) out.push_back(integer<int>(item));
    return out;
  }

  std::vector<double> as_double_list() const {
    std::vector<double> out;
    for (const auto& item : split_list(raw_.text)) out.push_back(real(item));
    return out;
  }

  const std::string& text() const { return raw_.text; }
  int line() const { return raw_.line; }

 private:
  std::string key_;
  const RawValue& raw_;
};

struct Setter {
  const char* key;
  void (*apply)(SimConfig&, const Reader&, int& m, int& n, double& delta_f);
};

const std::vector<Setter>& setters() {
  static const std::vector<Setter> table = {
      {"grid.M", [](SimConfig&, const Reader& r, int& m, int&, double&) { m = r.as_int(); }},
      {"grid.N", [](SimConfig&, const Reader& r, int&, int& n, double&) { n = r.as_int(); }},
      {"grid.delta_f", [](SimConfig&, const Reader& r, int&, int&, double& df) { df = r.as_double(); }},
      {"channel.profile", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.profile.name = r.text(); }},
      {"channel.taps", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.profile.taps = r.as_int_list(); }},
      {"channel.powers_db",
       [](SimConfig& c, const Reader& r, int&, int&, double&) { c.profile.powers_db = r.as_double_list(); }},
      {"channel.f_max", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.f_max_hz = r.as_double(); }},
      {"channel.cp_length",
       [](SimConfig& c, const Reader& r, int&, int&, double&) { c.profile.cp_length = r.as_int(); }},
      {"sim.snr_db", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.snr_db = r.as_double_list(); }},
      {"sim.frames", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.frames = r.as_int(); }},
      {"sim.seed", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.seed = r.as_u64(); }},
      {"sim.equalizers",
       [](SimConfig& c, const Reader& r, int&, int&, double&) {
         c.equalizers.clear();
         for (const auto& name : split_list(r.text())) {
           const auto kind = parse_equalizer_name(name);
           if (!kind) r.fail("unknown equalizer '" + name + "'");
           if (std::find(c.equalizers.begin(), c.equalizers.end(), *kind) != c.equalizers.end()) {
             r.fail("equalizer '" + name + "' listed twice");
           }
           c.equalizers.push_back(*kind);
         }
       }},
      {"sim.qam_order", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.qam_order = r.as_int(); }},
      {"sim.check_oracles",
       [](SimConfig& c, const Reader& r, int&, int&, double&) { c.check_oracles = r.as_bool(); }},
      {"sim.jobs", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.jobs = r.as_int(); }},
      {"bench.sizes", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.bench.sizes = r.as_int_list(); }},
      {"bench.repetitions",
       [](SimConfig& c, const Reader& r, int&, int&, double&) { c.bench.repetitions = r.as_int(); }},
      {"bench.dense_max_nm",
       [](SimConfig& c, const Reader& r, int&, int&, double&) { c.bench.dense_max_nm = r.as_int(); }},
      {"bench.sigma2", [](SimConfig& c, const Reader& r, int&, int&, double&) { c.bench.sigma2 = r.as_double(); }},
      {"verify.inject_fault",
       [](SimConfig& c, const Reader& r, int&, int&, double&) {
         if (r.text() == "none") {
           c.verify.inject_mmse_index_fault = false;
         } else if (r.text() == "mmse_index") {
           c.verify.inject_mmse_index_fault = true;
         } else {
           r.fail("expected none or mmse_index, got '" + r.text() + "'");
         }
       }},
      {"verify.mismatch_frames",
       [](SimConfig& c, const Reader& r, int&, int&, double&) { c.verify.mismatch_frames = r.as_int(); }},
  };
  return table;
}

const Setter* find_setter(std::string_view key) {
  for (const auto& s : setters()) {
    if (key == s.key) return &s;
  }
  return nullptr;
}

// Resolves a bare key to its qualified form when it names exactly one entry.
std::string qualify(std::string_view key, std::string_view section, int line, bool allow_bare_search) {
  if (key.find('.') != std::string_view::npos) {
    if (!find_setter(key)) throw ConfigError(line, std::string(key), "unknown key");
    return std::string(key);
  }
  if (!section.empty()) {
    std::string full = std::string(section) + "." + std::string(key);
    if (!find_setter(full)) throw ConfigError(line, full, "unknown key");
    return full;
  }
  if (!allow_bare_search) throw ConfigError(line, std::string(key), "key outside a section must be qualified");
  std::string match;
  for (const auto& s : setters()) {
    const std::string_view qualified = s.key;
    const auto dot = qualified.find('.');
    if (qualified.size() - dot - 1 == key.size() && qualified.ends_with(key)) {
      if (!match.empty()) throw ConfigError(line, std::string(key), "ambiguous key, qualify it with a section");
      match = s.key;
    }
  }
  if (match.empty()) throw ConfigError(line, std::string(key), "unknown key");
  return match;
}

bool known_section(std::string_view name) {
  return std::any_of(setters().begin(), setters().end(), [&](const Setter& s) {
    const std::string_view key = s.key;
    return key.substr(0, key.find('.')) == name;
  });
}

SimConfig build(const std::map<std::string, RawValue>& values) {
  SimConfig config;
  int m = config.grid.M();
  int n = config.grid.N();
  double delta_f = config.grid.subcarrier_spacing();
  for (const auto& s : setters()) {
    const auto it = values.find(s.key);
    if (it != values.end()) s.apply(config, Reader(s.key, it->second), m, n, delta_f);
  }
  auto line_of = [&](const std::string& field) {
    const auto it = values.find(field);
    return it == values.end() ? 0 : it->second.line;
  };
  try {
    config.grid = DdGrid(m, n, delta_f);
    config.validate();
  } catch (const InvariantError& e) {
    std::string field = e.field();
    if (field == "M" || field == "N" || field == "delta_f") field = "grid." + field;
    std::string message = e.what();
    if (message.starts_with(e.field() + ": ")) message.erase(0, e.field().size() + 2);
    throw ConfigError(line_of(field), field, message);
  }
  return config;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& s : setters()) out.emplace_back(s.key);
    return out;
  }();
  return keys;
}

SimConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides) {
  std::map<std::string, RawValue> values;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const auto comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) throw ConfigError(line_no, section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
    const std::string full = qualify(key, section, line_no, false);
    if (values.count(full)) throw ConfigError(line_no, full, "duplicate key");
    values[full] = RawValue{std::string(trim(line.substr(eq + 1))), line_no};
  }

  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError(0, item, "override must have the form KEY=VALUE");
    const auto key = trim(std::string_view(item).substr(0, eq));
    const std::string full = qualify(key, "", 0, true);
    values[full] = RawValue{std::string(trim(std::string_view(item).substr(eq + 1))), 0};
  }
  return build(values);
}

SimConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), overrides);
}

std::string to_config_text(const SimConfig& c) {
  auto join_doubles = [](const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
    return out;
  };
  auto join_ints = [](const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
    return out;
  };
  std::ostringstream out;
  out << "[grid]\n"
      << "M = " << c.grid.M() << '\n'
      << "N = " << c.grid.N() << '\n'
      << "delta_f = " << format_double(c.grid.subcarrier_spacing()) << '\n'
      << "[channel]\n"
      << "profile = " << c.profile.name << '\n';
  if (c.profile.name == "custom") {
    out << "taps = " << join_ints(c.profile.taps) << '\n' << "powers_db = " << join_doubles(c.profile.powers_db) << '\n';
  }
  out << "f_max = " << format_double(c.f_max_hz) << '\n'
      << "cp_length = " << c.profile.cp_length << '\n'
      << "[sim]\n"
      << "snr_db = " << join_doubles(c.snr_db) << '\n'
      << "frames = " << c.frames << '\n'
      << "seed = " << c.seed << '\n'
      << "equalizers = ";
  for (std::size_t i = 0; i < c.equalizers.size(); ++i) out << (i ? ", " : "") << equalizer_name(c.equalizers[i]);
  out << '\n'
      << "qam_order = " << c.qam_order << '\n'
      << "check_oracles = " << (c.check_oracles ? "true" : "false") << '\n'
      << "[bench]\n"
      << "sizes = " << join_ints(c.bench.sizes) << '\n'
      << "repetitions = " << c.bench.repetitions << '\n'
      << "dense_max_nm = " << c.bench.dense_max_nm << '\n'
      << "sigma2 = " << format_double(c.bench.sigma2) << '\n'
      << "[verify]\n"
      << "inject_fault = " << (c.verify.inject_mmse_index_fault ? "mmse_index" : "none") << '\n'
      << "mismatch_frames = " << c.verify.mismatch_frames << '\n';
  return out.str();
}

}  // namespace otfs

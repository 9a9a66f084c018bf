#include "delaybs/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "delaybs/errors.hpp"

namespace delaybs::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_integer(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
  return v;
}

struct Entry {
  std::string value;
  int line;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"mu", "a", "b", "r", "K", "T"}},
      {"vol", {"g.form", "g.sigma0", "g.c0", "g.c1", "g.sigma_min", "g.sigma_max", "g.table", "g.floor"}},
      {"run",
       {"steps_per_l", "phi0", "segment", "history", "n_paths", "seed", "t0", "antithetic", "format",
        "measure", "workers"}},
  };
  return keys;
}

class Sections {
 public:
  explicit Sections(std::string_view text) { parse(text); }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const Entry& entry(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ValidationError("missing required key `" + key + "` in [" + section_of_.at(key) + "]");
    }
    return it->second;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ValidationError("`" + key + "`: " + msg);
    throw ValidationError("line " + std::to_string(it->second.line) + ": `" + key + "` " + msg);
  }

  // Accepts a decimal literal or a ratio p/q of two literals.
  double number(const std::string& key) const {
    const auto& e = entry(key);
    const std::string_view v = e.value;
    std::optional<double> x;
    if (const auto slash = v.find('/'); slash != std::string_view::npos) {
      const auto num = to_double(v.substr(0, slash));
      const auto den = to_double(v.substr(slash + 1));
      if (num && den && *den != 0.0) x = *num / *den;
    } else {
      x = to_double(v);
    }
    if (!x) {
      throw ParseError("line " + std::to_string(e.line) + ": `" + key + "` expects a number, got '" +
                       e.value + "'");
    }
    if (!std::isfinite(*x)) fail(key, "must be finite");
    return *x;
  }

  template <class Int>
  Int integer(const std::string& key) const {
    const auto& e = entry(key);
    const auto x = to_integer<Int>(e.value);
    if (!x) {
      throw ParseError("line " + std::to_string(e.line) + ": `" + key +
                       "` expects a non-negative integer, got '" + e.value + "'");
    }
    return *x;
  }

  bool boolean(const std::string& key) const {
    const auto& e = entry(key);
    const auto v = lower(e.value);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ParseError("line " + std::to_string(e.line) + ": `" + key + "` expects true/false, got '" +
                     e.value + "'");
  }

  const std::string& text(const std::string& key) const { return entry(key).value; }

 private:
  void parse(std::string_view text) {
    for (const auto& [section, keys] : known_keys()) {
      for (const auto& k : keys) section_of_[k] = section;
    }
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      const auto where = "line " + std::to_string(line_no) + ": ";

      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      const auto line = trim(raw);
      if (line.empty()) continue;

      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(where + "unterminated section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (!known_keys().count(section)) {
          throw ParseError(where + "unknown section [" + section + "]; expected [model], [vol] or [run]");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(where + "expected `key = value`");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw ParseError(where + "empty key");
      if (section.empty()) throw ParseError(where + "`" + key + "` appears before any section header");
      if (!known_keys().at(section).count(key)) {
        throw ParseError(where + "unknown key `" + key + "` in [" + section + "]");
      }
      if (value.empty()) throw ParseError(where + "`" + key + "` has an empty value");
      if (!entries_.emplace(key, Entry{value, line_no}).second) {
        throw ParseError(where + "duplicate key `" + key + "` (first set on line " +
                         std::to_string(entries_.at(key).line) + ")");
      }
    }
  }

  std::map<std::string, Entry> entries_;
  std::map<std::string, std::string> section_of_;
};

std::vector<VolatilityFunction::TablePoint> parse_table(const Sections& s) {
  const auto& e = s.entry("g.table");
  std::vector<VolatilityFunction::TablePoint> pts;
  std::string_view rest = e.value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto colon = item.find(':');
    const auto price = colon == std::string_view::npos ? std::nullopt : to_double(item.substr(0, colon));
    const auto vol = colon == std::string_view::npos ? std::nullopt : to_double(item.substr(colon + 1));
    if (!price || !vol) {
      throw ParseError("line " + std::to_string(e.line) + ": `g.table` entry '" + std::string(item) +
                       "' is not of the form price:vol");
    }
    pts.push_back({*price, *vol});
  }
  return pts;
}

VolatilityFunction parse_vol(const Sections& s) {
  const auto form = lower(s.text("g.form"));
  auto wrap = [&](auto&& make) -> VolatilityFunction {
    try {
      return make();
    } catch (const ValidationError& e) {
      s.fail("g.form", std::string("(") + form + "): " + e.what());
    }
  };
  if (form == "constant") {
    return wrap([&] { return VolatilityFunction::constant(s.number("g.sigma0")); });
  }
  if (form == "affine_clipped") {
    return wrap([&] {
      return VolatilityFunction::affine_clipped(s.number("g.c0"), s.number("g.c1"),
                                                s.number("g.sigma_min"), s.number("g.sigma_max"));
    });
  }
  if (form == "table") {
    return wrap([&] { return VolatilityFunction::table(parse_table(s), s.number("g.floor")); });
  }
  s.fail("g.form", "must be one of constant, affine_clipped, table; got '" + s.text("g.form") + "'");
}

}  // namespace

Command parse_command(std::string_view name) {
  const auto n = lower(trim(name));
  if (n == "simulate") return Command::Simulate;
  if (n == "price") return Command::Price;
  if (n == "hedge") return Command::Hedge;
  if (n == "validate") return Command::Validate;
  throw ParseError("unknown command '" + std::string(name) +
                   "'; expected simulate, price, hedge or validate");
}

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Price: return "price";
    case Command::Hedge: return "hedge";
    case Command::Validate: return "validate";
  }
  return "?";
}

OutputFormat parse_format(std::string_view name) {
  const auto n = lower(trim(name));
  if (n == "csv") return OutputFormat::Csv;
  if (n == "json") return OutputFormat::Json;
  throw ParseError("unknown format '" + std::string(name) + "'; expected csv or json");
}

OutputFormat default_format(Command c) noexcept {
  return c == Command::Simulate || c == Command::Hedge ? OutputFormat::Csv : OutputFormat::Json;
}

Measure parse_measure(std::string_view name) {
  const auto n = trim(name);
  if (n == "P" || n == "p") return Measure::P;
  if (n == "Q" || n == "q") return Measure::Q;
  throw ParseError("unknown measure '" + std::string(name) + "'; expected P or Q");
}

RunConfig parse_config(std::string_view text) {
  const Sections s(text);
  RunConfig cfg;

  auto& p = cfg.params;
  p.mu = s.number("mu");
  p.a = s.number("a");
  p.b = s.number("b");
  p.r = s.number("r");
  p.K = s.number("K");
  p.T = s.number("T");
  if (!(p.a > 0.0)) s.fail("a", "must be > 0");
  if (!(p.b > 0.0)) s.fail("b", "must be > 0");
  if (!(p.r >= 0.0)) s.fail("r", "must be >= 0");
  if (!(p.K > 0.0)) s.fail("K", "must be > 0");
  if (!(p.T > 0.0)) s.fail("T", "must be > 0");
  p.validate();

  cfg.g = parse_vol(s);

  const auto spl = s.integer<std::int64_t>("steps_per_l");
  if (spl < 1) s.fail("steps_per_l", "must be >= 1");
  cfg.steps_per_l = spl;
  cfg.grid = build_grid(p, spl);

  if (s.has("phi0") && s.has("segment")) s.fail("segment", "conflicts with `phi0`; give one of them");
  if (s.has("segment")) {
    cfg.segment_path = s.text("segment");
  } else if (s.has("phi0")) {
    cfg.phi0 = s.number("phi0");
    if (!(*cfg.phi0 > 0.0)) s.fail("phi0", "must be > 0");
  } else {
    throw ValidationError("missing required key `phi0` (or `segment`) in [run]");
  }
  if (s.has("history")) cfg.history_path = s.text("history");

  if (s.has("n_paths")) {
    cfg.n_paths = s.integer<std::size_t>("n_paths");
    if (cfg.n_paths < 2) s.fail("n_paths", "must be >= 2");
  }
  if (s.has("seed")) cfg.seed = s.integer<std::uint64_t>("seed");
  if (s.has("t0")) {
    cfg.t0 = s.number("t0");
    if (cfg.t0 < 0.0 || cfg.t0 > p.T) s.fail("t0", "must lie in [0, T]");
  }
  if (s.has("antithetic")) cfg.antithetic = s.boolean("antithetic");
  if (s.has("format")) cfg.format = parse_format(s.text("format"));
  if (s.has("measure")) cfg.measure = parse_measure(s.text("measure"));
  if (s.has("workers")) cfg.workers = s.integer<unsigned>("workers");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<TimedValue> parse_history_csv(std::string_view text, std::string_view source) {
  std::vector<TimedValue> out;
  const std::string src(source);
  int line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (!header_seen) {
      if (comma == std::string_view::npos || trim(line.substr(0, comma)) != "t" ||
          trim(line.substr(comma + 1)) != "S") {
        throw ParseError(src + ":" + std::to_string(line_no) + ": expected header `t,S`");
      }
      header_seen = true;
      continue;
    }
    const auto t = comma == std::string_view::npos ? std::nullopt : to_double(line.substr(0, comma));
    const auto v = comma == std::string_view::npos ? std::nullopt : to_double(line.substr(comma + 1));
    if (!t || !v) {
      throw ParseError(src + ":" + std::to_string(line_no) + ": expected `t,S` numbers, got '" +
                       std::string(line) + "'");
    }
    out.push_back({*t, *v});
  }
  if (!header_seen) throw ParseError(src + ": empty file, expected header `t,S`");
  return out;
}

std::vector<TimedValue> read_history_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_history_csv(buf.str(), path);
}

std::string schema_text() {
  std::ostringstream os;
  os << "delaybs config schema, version " << kSchemaVersion << R"(

Config file: one `key = value` per line, `#` starts a comment, sections
[model], [vol], [run]. Numbers are decimal literals or ratios such as 1/3.

[model]
  mu       drift coefficient (finite; drift rate is mu * S(t - a))
  a        drift delay, > 0
  b        volatility delay, > 0
  r        riskless rate, >= 0
  K        strike, > 0
  T        maturity, > 0

[vol]
  g.form        constant | affine_clipped | table
  g.sigma0      constant:        g(v) = sigma0, nonzero
  g.c0, g.c1    affine_clipped:  g(v) = clamp(c0 + c1 v, sigma_min, sigma_max)
  g.sigma_min   affine_clipped:  > 0
  g.sigma_max   affine_clipped:  >= sigma_min
  g.table       table:           "v1:g1, v2:g2, ..." strictly increasing v,
                                 linear between points, flat outside
  g.floor       table:           > 0, g(v) = max(floor, table(v))

[run]
  steps_per_l   grid steps per min(a, b); a, b and T must be whole multiples
                of the step
  phi0          constant initial segment, > 0           (one of phi0 ...
  segment       CSV `t,S` covering [-max(a, b), 0]       ... or segment)
  history       CSV `t,S` covering [t0 - max(a, b), t0]; needed when t0 > 0
  n_paths       default 100000
  seed          unsigned 64-bit, default 1
  t0            valuation time on the grid, default 0
  antithetic    true | false, default false
  format        csv | json (default: csv for simulate/hedge, json otherwise)
  measure       P | Q, default Q (simulate, hedge)
  workers       threads, 0 = all cores (results do not depend on it)

Command-line flags override [run] keys:
  --config PATH --command simulate|price|hedge|validate --paths N --seed U64
  --t0 REAL --history PATH --measure P|Q --out PATH --format csv|json
  --antithetic --workers N --schema

Outputs
  simulate  CSV path_index,t,S  | JSON {measure, seed, paths: [{path_index, t[], S[]}]}
  price     JSON {value, method, branch, t0, seed, n_paths, stderr, ci95_lo, ci95_hi}
            (n_paths, stderr and ci95_* only on the monte-carlo branch);
            CSV header + one row, empty cells when absent
  hedge     with history: one position t,S,pi_S,pi_B,V at t0
            otherwise: replication series of path 0
              t,S,pi_S,pi_B,model_value,portfolio_value
            and a report h, n_paths, rms_error, mean_error, stderr_mean_error,
              mean_initial_value
  validate  table check,statistic,target,tolerance,passed,detail

Exit codes
  0   success
  1   validate: at least one check failed
  2   command-line usage error
  3   ParseError
  4   ValidationError
  5   IncommensurableDelays
  6   WindowNotCovered
  7   OutOfWindow
  8   ZeroVolatility
  9   DegenerateVariance
  10  Overflow
  11  DomainError
  12  IoError
  70  internal error
)";
  return os.str();
}

}  // namespace delaybs::cli

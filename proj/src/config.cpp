#include "rotor/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "rotor/errors.hpp"

#ifndef ROTOR_DATA_DIR
#define ROTOR_DATA_DIR "data"
#endif

namespace rotor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct Entry {
  std::string value;
  std::string origin;
  int line = 0;
  int column = 0;  // of the value
  int key_column = 0;
};

using Section = std::map<std::string, Entry>;
using Document = std::map<std::string, Section>;

[[noreturn]] void fail(const std::string& origin, int line, int column, const std::string& message) {
  if (line > 0) throw ConfigError(fmt::format("{}:{}:{}: {}", origin, line, column, message));
  throw ConfigError(fmt::format("{}: {}", origin, message));
}

[[noreturn]] void fail(const Entry& e, const std::string& message) { fail(e.origin, e.line, e.column, message); }

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    if (lead) *lead = s.size();
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  if (lead) *lead = b;
  return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

Document parse_document(const std::string& text, const std::string& origin) {
  Document doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::size_t lead = 0;
    const std::string body = trim(line, &lead);
    if (body.empty()) continue;
    const int col = static_cast<int>(lead) + 1;
    if (body.front() == '[') {
      if (body.back() != ']') fail(origin, line_no, col, "unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_name(section)) fail(origin, line_no, col + 1, "invalid section name");
      if (doc.count(section)) fail(origin, line_no, col, "duplicate section [" + section + "]");
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, col, "expected 'key = value'");
    if (section.empty()) fail(origin, line_no, col, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_name(key)) fail(origin, line_no, col, "invalid key name");
    std::size_t vlead = 0;
    const std::string value = trim(line.substr(eq + 1), &vlead);
    const int vcol = static_cast<int>(eq + 1 + vlead) + 1;
    if (value.empty()) fail(origin, line_no, vcol, "missing value for '" + key + "'");
    auto& sec = doc[section];
    if (sec.count(key)) fail(origin, line_no, col, "duplicate key '" + key + "'");
    sec[key] = {value, origin, line_no, vcol, col};
  }
  return doc;
}

void apply_overrides(Document& doc, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override '" + o + "': expected section.key=value");
    }
    const std::string section = trim(o.substr(0, dot));
    const std::string key = trim(o.substr(dot + 1, eq - dot - 1));
    const std::string value = trim(o.substr(eq + 1));
    if (!valid_name(section) || !valid_name(key) || value.empty()) {
      throw ConfigError("override '" + o + "': expected section.key=value");
    }
    doc[section][key] = {value, "override '" + o + "'", 0, 0};
  }
}

// A number followed by an optional unit word.
struct Quantity {
  double value = 0.0;
  std::string unit;
};

Quantity split_quantity(const std::string& text, const Entry& where) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr == first) fail(where, "expected a number in '" + t + "'");
  if (!std::isfinite(v)) fail(where, "value is not finite");
  return {v, trim(std::string(ptr, last))};
}

double plain_number(const std::string& text, const Entry& where) {
  const auto q = split_quantity(text, where);
  if (!q.unit.empty()) fail(where, "unexpected unit '" + q.unit + "'");
  return q.value;
}

double temperature_value(const std::string& text, const Entry& where) {
  const auto q = split_quantity(text, where);
  if (q.unit != "K") fail(where, "temperature needs the unit K");
  if (!(q.value > 0.0)) fail(where, "temperature must be > 0 K");
  return q.value;
}

double angle_value(const std::string& text, const Entry& where) {
  const auto q = split_quantity(text, where);
  if (q.unit == "deg") return q.value * kPi / 180.0;
  if (q.unit == "rad") return q.value;
  fail(where, "angle needs a unit, deg or rad");
}

double time_value(const std::string& text, const Entry& where, double t_rev_ps) {
  const auto q = split_quantity(text, where);
  if (q.unit == "T_rev") return q.value * kTwoPi;
  if (q.unit == "ps") return q.value / t_rev_ps * kTwoPi;
  if (q.unit == "fs") return q.value * 1e-3 / t_rev_ps * kTwoPi;
  fail(where, "time needs a unit, T_rev, ps or fs");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// "a, b, c" or "start : stop : step"; `convert` maps one item to its internal value.
// Range arithmetic runs in the written unit so 45 deg in a range equals 45 deg written alone.
std::vector<double> value_list(const Entry& e, const std::function<double(const std::string&)>& convert) {
  if (e.value.find(':') != std::string::npos) {
    const auto parts = split(e.value, ':');
    if (parts.size() != 3) fail(e, "range must be 'start : stop : step'");
    const auto a = split_quantity(parts[0], e), b = split_quantity(parts[1], e), s = split_quantity(parts[2], e);
    if (a.unit != b.unit || a.unit != s.unit) fail(e, "range parts must share one unit");
    if (!(s.value > 0.0)) fail(e, "range step must be > 0");
    if (b.value < a.value) fail(e, "range stop is below its start");
    const double span = (b.value - a.value) / s.value;
    const auto n = static_cast<long>(std::llround(span));
    if (std::abs(span - static_cast<double>(n)) > 1e-6) fail(e, "range step does not divide stop - start");
    if (n > 100000) fail(e, "range has too many points");
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) {
      const double v = a.value + static_cast<double>(i) * s.value;
      out.push_back(convert(fmt::format("{:.17g} {}", v, a.unit)));
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(e.value, ',')) {
    if (item.empty()) fail(e, "empty list item");
    out.push_back(convert(item));
  }
  return out;
}

double fraction_value(const std::string& item, const Entry& where) {
  const auto slash = item.find('/');
  if (slash == std::string::npos) return plain_number(item, where);
  const double num = plain_number(item.substr(0, slash), where);
  const double den = plain_number(item.substr(slash + 1), where);
  if (den == 0.0) fail(where, "zero denominator");
  return num / den;
}

bool bool_value(const Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "no" || e.value == "off") return false;
  fail(e, "expected true or false");
}

int int_value(const Entry& e) {
  const double v = plain_number(e.value, e);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail(e, "expected an integer");
  return static_cast<int>(v);
}

// Hands out entries and remembers which were consumed, so leftovers are unknown keys.
class Reader {
 public:
  explicit Reader(Document doc) : doc_(std::move(doc)) {}

  const Entry* get(const std::string& section, const std::string& key) {
    auto s = doc_.find(section);
    if (s == doc_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    used_.insert(section + "." + key);
    return &k->second;
  }

  bool has_section(const std::string& section) const { return doc_.count(section) > 0; }

  void reject_unknown(const std::set<std::string>& sections) const {
    for (const auto& [name, sec] : doc_) {
      if (!sections.count(name)) {
        const Entry* any = sec.empty() ? nullptr : &sec.begin()->second;
        if (any) fail(*any, "unknown section [" + name + "]");
        throw ConfigError("unknown section [" + name + "]");
      }
      for (const auto& [key, e] : sec)
        if (!used_.count(name + "." + key)) fail(e.origin, e.line, e.key_column, "unknown key '" + key + "' in [" + name + "]");
    }
  }

 private:
  Document doc_;
  std::set<std::string> used_;
};

MoleculeSpec read_molecule_fields(Reader& r, const std::string& section, MoleculeSpec m) {
  if (auto e = r.get(section, "name")) m.name = e->value;
  if (auto e = r.get(section, "b")) {
    const auto q = split_quantity(e->value, *e);
    if (q.unit != "cm^-1") fail(*e, "rotational constant needs the unit cm^-1");
    if (!(q.value > 0.0)) fail(*e, "rotational constant must be > 0");
    m.b_wavenumber = q.value;
  }
  if (auto e = r.get(section, "delta_alpha")) {
    const auto q = split_quantity(e->value, *e);
    if (q.unit != "A^3") fail(*e, "polarizability anisotropy needs the unit A^3");
    m.delta_alpha = q.value;
  }
  if (auto e = r.get(section, "spin_even")) {
    m.spin_weight_even = plain_number(e->value, *e);
    if (m.spin_weight_even < 0.0) fail(*e, "spin weight must be >= 0");
  }
  if (auto e = r.get(section, "spin_odd")) {
    m.spin_weight_odd = plain_number(e->value, *e);
    if (m.spin_weight_odd < 0.0) fail(*e, "spin weight must be >= 0");
  }
  return m;
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::string join(const std::vector<double>& v, double scale, const std::string& unit) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += g17(v[i] * scale);
    if (!unit.empty()) out += " " + unit;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_string(ScanKind k) {
  switch (k) {
    case ScanKind::none:
      return "none";
    case ScanKind::angle:
      return "angle";
    case ScanKind::strengths:
      return "strengths";
    case ScanKind::budget:
      return "budget";
    case ScanKind::delay:
      return "delay";
  }
  return "none";
}

double parse_temperature(const std::string& text) { return temperature_value(text, {text, "value", 0, 0}); }
double parse_angle(const std::string& text) { return angle_value(text, {text, "value", 0, 0}); }
double parse_time(const std::string& text, double revival_time_ps) {
  return time_value(text, {text, "value", 0, 0}, revival_time_ps);
}

std::map<std::string, MoleculeSpec> parse_molecule_presets(const std::string& text, const std::string& origin) {
  const Document doc = parse_document(text, origin);
  Reader r(doc);
  std::map<std::string, MoleculeSpec> out;
  std::set<std::string> names;
  for (const auto& [name, sec] : doc) {
    names.insert(name);
    MoleculeSpec m;
    m.name = name;
    m = read_molecule_fields(r, name, m);
    if (!(m.b_wavenumber > 0.0)) fail(origin, 0, 0, "preset [" + name + "] has no rotational constant b");
    m.validate();
    out[name] = m;
  }
  r.reject_unknown(names);
  return out;
}

std::map<std::string, MoleculeSpec> load_molecule_presets(const std::filesystem::path& path) {
  return parse_molecule_presets(read_file(path), path.string());
}

std::filesystem::path default_preset_path() {
  if (const char* env = std::getenv("ROTOR_DATA_DIR")) return std::filesystem::path(env) / "molecules.ini";
  return std::filesystem::path(ROTOR_DATA_DIR) / "molecules.ini";
}

void RunConfig::validate() const {
  molecule.validate();
  if (!(ensemble.temperature_k > 0.0)) throw ConfigError("ensemble.temperature: must be > 0 K");
  if (!(ensemble.weight_cutoff > 0.0 && ensemble.weight_cutoff < 1.0)) {
    throw ConfigError("ensemble.weight_cutoff: must lie in (0, 1)");
  }
  protocol.validate();
  if (options.l_headroom < 0) throw ConfigError("engine.l_headroom: must be >= 0");
  switch (scan.kind) {
    case ScanKind::none:
      break;
    case ScanKind::angle:
      if (scan.angles.empty()) throw ConfigError("scan.angles: required for an angle scan");
      for (double a : scan.angles)
        if (std::abs(a) > kPi / 2 + 1e-12) throw ConfigError("scan.angles: must lie in [-90, 90] deg");
      break;
    case ScanKind::strengths:
      if (scan.p1_values.empty() || scan.p2_values.empty()) {
        throw ConfigError("scan.p1_values and scan.p2_values: required for a strengths scan");
      }
      for (double p : scan.p1_values)
        if (!(p > 0.0)) throw ConfigError("scan.p1_values: must be > 0");
      for (double p : scan.p2_values)
        if (p < 0.0) throw ConfigError("scan.p2_values: must be >= 0");
      break;
    case ScanKind::budget:
      if (!(scan.budget > 0.0)) throw ConfigError("scan.budget: must be > 0");
      if (scan.differences.empty()) throw ConfigError("scan.differences: required for a budget scan");
      for (double d : scan.differences)
        if (!(std::abs(d) < scan.budget)) throw ConfigError("scan.differences: need |P1 - P2| < budget");
      break;
    case ScanKind::delay:
      if (scan.delay_points < 2) throw ConfigError("scan.points: need at least 2");
      if (!(scan.delay_halfwidth > 0.0)) throw ConfigError("scan.halfwidth: must be > 0");
      if (!(scan.delay_center - scan.delay_halfwidth > 0.0) || !(scan.delay_center + scan.delay_halfwidth < kTwoPi)) {
        throw ConfigError("scan.center: window must lie inside one revival");
      }
      break;
  }
  if (is_scan() && protocol.engine == Engine::fdtd) throw ConfigError("engine.type: scans run on the spectral engine");
  if (analysis.compare_engines && protocol.engine != Engine::fdtd) {
    throw ConfigError("analysis.compare_engines: needs engine.type = fdtd");
  }
  if (analysis.density_n_theta < 2 || analysis.density_n_phi < 4) throw ConfigError("analysis.density_*: grid too small");
  for (double f : analysis.fractions)
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("analysis.fractions: must lie in (0, 1)");
  if (!valid_name(output.stem)) throw ConfigError("output.stem: letters, digits, '_' and '-' only");
  if (!output.csv && !output.json && !output.svg) throw ConfigError("output.formats: choose at least one format");
}

RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::map<std::string, MoleculeSpec>& presets, const std::vector<std::string>& overrides) {
  Document doc = parse_document(text, origin);
  apply_overrides(doc, overrides);
  Reader r(std::move(doc));
  RunConfig c;

  // molecule first: times in ps need its revival period
  MoleculeSpec m;
  if (auto e = r.get("molecule", "preset")) {
    auto it = presets.find(e->value);
    if (it == presets.end()) fail(*e, "unknown molecule preset '" + e->value + "'");
    m = it->second;
  }
  m = read_molecule_fields(r, "molecule", m);
  if (!(m.b_wavenumber > 0.0)) fail(origin, 0, 0, "[molecule] needs a preset or a rotational constant b");
  c.molecule = m;
  c.molecule.validate();
  const double t_rev = c.molecule.revival_time_ps();

  if (auto e = r.get("ensemble", "temperature")) {
    c.ensemble.temperature_k = temperature_value(e->value, *e);
    if (!(c.ensemble.temperature_k > 0.0)) fail(*e, "temperature must be > 0 K");
  } else {
    fail(origin, 0, 0, "missing required key ensemble.temperature");
  }
  if (auto e = r.get("ensemble", "weight_cutoff")) {
    c.ensemble.weight_cutoff = plain_number(e->value, *e);
    if (!(c.ensemble.weight_cutoff > 0.0 && c.ensemble.weight_cutoff < 1.0)) fail(*e, "weight cutoff must lie in (0, 1)");
  }
  c.ensemble.molecule = c.molecule;

  auto& p = c.protocol;
  p.pol_angle = kPi / 4.0;
  auto strength = [&](const char* key, double& out, bool required) {
    if (auto e = r.get("protocol", key)) {
      out = plain_number(e->value, *e);
      if (out < 0.0) fail(*e, std::string(key) + " must be >= 0");
    } else if (required) {
      fail(origin, 0, 0, std::string("missing required key protocol.") + key);
    }
  };
  if (auto e = r.get("protocol", "angle")) {
    p.pol_angle = angle_value(e->value, *e);
    if (std::abs(p.pol_angle) > kPi / 2 + 1e-12) fail(*e, "angle must lie in [-90, 90] deg");
  }
  if (auto e = r.get("protocol", "delay")) {
    if (e->value == "auto_peak") {
      p.delay_mode = DelayMode::auto_peak;
    } else if (e->value == "auto_quarter") {
      p.delay_mode = DelayMode::auto_quarter;
    } else {
      p.delay_mode = DelayMode::explicit_delay;
      p.delay = time_value(e->value, *e, t_rev);
      if (!(p.delay > 0.0)) fail(*e, "delay must be > 0");
    }
  }

  if (auto e = r.get("sampling", "samples_per_revival")) {
    p.sampling.samples_per_revival = int_value(*e);
    if (p.sampling.samples_per_revival < 4) fail(*e, "need at least 4 samples per revival");
  }
  if (auto e = r.get("sampling", "revivals")) {
    p.sampling.revivals = plain_number(e->value, *e);
    if (!(p.sampling.revivals > 0.0)) fail(*e, "revivals must be > 0");
  }

  if (auto e = r.get("engine", "type")) {
    if (e->value == "spectral") {
      p.engine = Engine::spectral;
    } else if (e->value == "fdtd") {
      p.engine = Engine::fdtd;
    } else {
      fail(*e, "engine type must be spectral or fdtd");
    }
  }
  if (auto e = r.get("engine", "fold_mirror")) c.options.fold_mirror = bool_value(*e);
  if (auto e = r.get("engine", "l_headroom")) {
    c.options.l_headroom = int_value(*e);
    if (c.options.l_headroom < 0) fail(*e, "l_headroom must be >= 0");
  }
  if (auto e = r.get("engine", "n_theta")) p.grid.n_theta = int_value(*e);
  if (auto e = r.get("engine", "n_phi")) p.grid.n_phi = int_value(*e);
  if (auto e = r.get("engine", "m_max")) p.grid.m_max = int_value(*e);
  if (auto e = r.get("engine", "delta_tau")) p.grid.delta_tau = time_value(e->value, *e, t_rev);

  auto& s = c.scan;
  const Entry* kind = r.get("scan", "kind");
  if (kind) {
    static const std::map<std::string, ScanKind> kinds{{"angle", ScanKind::angle},
                                                       {"strengths", ScanKind::strengths},
                                                       {"budget", ScanKind::budget},
                                                       {"delay", ScanKind::delay}};
    auto it = kinds.find(kind->value);
    if (it == kinds.end()) fail(*kind, "scan kind must be angle, strengths, budget or delay");
    s.kind = it->second;
  } else if (r.has_section("scan")) {
    fail(origin, 0, 0, "[scan] needs a kind");
  }
  auto number_list = [&](const Entry& e) { return value_list(e, [&](const std::string& t) { return plain_number(t, e); }); };
  if (auto e = r.get("scan", "angles")) s.angles = value_list(*e, [&](const std::string& t) { return angle_value(t, *e); });
  if (auto e = r.get("scan", "p1_values")) s.p1_values = number_list(*e);
  if (auto e = r.get("scan", "p2_values")) s.p2_values = number_list(*e);
  if (auto e = r.get("scan", "budget")) s.budget = plain_number(e->value, *e);
  if (auto e = r.get("scan", "differences")) s.differences = number_list(*e);
  if (auto e = r.get("scan", "center")) s.delay_center = time_value(e->value, *e, t_rev);
  if (auto e = r.get("scan", "halfwidth")) s.delay_halfwidth = time_value(e->value, *e, t_rev);
  if (auto e = r.get("scan", "points")) s.delay_points = int_value(*e);

  const bool scan_sets_strengths = s.kind == ScanKind::strengths || s.kind == ScanKind::budget;
  strength("p1", p.p1, !scan_sets_strengths);
  strength("p2", p.p2, !scan_sets_strengths);
  if (scan_sets_strengths && (p.p1 > 0.0 || p.p2 > 0.0)) {
    fail(origin, 0, 0, "protocol.p1/p2 must be omitted when the scan sets the strengths");
  }

  auto& a = c.analysis;
  if (auto e = r.get("analysis", "density")) a.density = bool_value(*e);
  if (auto e = r.get("analysis", "density_n_theta")) a.density_n_theta = int_value(*e);
  if (auto e = r.get("analysis", "density_n_phi")) a.density_n_phi = int_value(*e);
  if (auto e = r.get("analysis", "fractions")) {
    a.fractions = value_list(*e, [&](const std::string& t) { return fraction_value(t, *e); });
  }
  if (auto e = r.get("analysis", "compare_engines")) a.compare_engines = bool_value(*e);

  auto& o = c.output;
  if (auto e = r.get("output", "directory")) o.directory = e->value;
  if (auto e = r.get("output", "stem")) {
    o.stem = e->value;
    if (!valid_name(o.stem)) fail(*e, "stem may contain letters, digits, '_' and '-' only");
  }
  if (auto e = r.get("output", "formats")) {
    o.csv = o.json = o.svg = false;
    for (const auto& f : split(e->value, ',')) {
      if (f == "csv") {
        o.csv = true;
      } else if (f == "json") {
        o.json = true;
      } else if (f == "svg") {
        o.svg = true;
      } else {
        fail(*e, "unknown format '" + f + "'");
      }
    }
  }
  if (auto e = r.get("output", "title")) o.title = e->value;
  if (auto e = r.get("output", "reference_line")) o.reference_line = plain_number(e->value, *e);

  r.reject_unknown({"molecule", "ensemble", "protocol", "sampling", "engine", "scan", "analysis", "output"});
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::map<std::string, MoleculeSpec>& presets,
                      const std::vector<std::string>& overrides) {
  return parse_config(read_file(path), path.string(), presets, overrides);
}

std::string canonical_text(const RunConfig& c) {
  const auto& p = c.protocol;
  const double to_trev = 1.0 / kTwoPi;
  Document doc;
  auto put = [&](const std::string& section, const std::string& key, const std::string& value) {
    doc[section][key].value = value;
  };
  put("molecule", "name", c.molecule.name.empty() ? "unnamed" : c.molecule.name);
  put("molecule", "b", g17(c.molecule.b_wavenumber) + " cm^-1");
  put("molecule", "delta_alpha", g17(c.molecule.delta_alpha) + " A^3");
  put("molecule", "spin_even", g17(c.molecule.spin_weight_even));
  put("molecule", "spin_odd", g17(c.molecule.spin_weight_odd));
  put("ensemble", "temperature", g17(c.ensemble.temperature_k) + " K");
  put("ensemble", "weight_cutoff", g17(c.ensemble.weight_cutoff));
  const bool scan_sets_strengths = c.scan.kind == ScanKind::strengths || c.scan.kind == ScanKind::budget;
  if (!scan_sets_strengths) {
    put("protocol", "p1", g17(p.p1));
    put("protocol", "p2", g17(p.p2));
  }
  put("protocol", "angle", g17(p.pol_angle) + " rad");
  switch (p.delay_mode) {
    case DelayMode::auto_peak:
      put("protocol", "delay", "auto_peak");
      break;
    case DelayMode::auto_quarter:
      put("protocol", "delay", "auto_quarter");
      break;
    case DelayMode::explicit_delay:
      put("protocol", "delay", g17(p.delay * to_trev) + " T_rev");
      break;
  }
  put("sampling", "samples_per_revival", std::to_string(p.sampling.samples_per_revival));
  put("sampling", "revivals", g17(p.sampling.revivals));
  put("engine", "type", to_string(p.engine));
  put("engine", "fold_mirror", c.options.fold_mirror ? "true" : "false");
  put("engine", "l_headroom", std::to_string(c.options.l_headroom));
  put("engine", "n_theta", std::to_string(p.grid.n_theta));
  put("engine", "n_phi", std::to_string(p.grid.n_phi));
  put("engine", "m_max", std::to_string(p.grid.m_max));
  put("engine", "delta_tau", g17(p.grid.delta_tau * to_trev) + " T_rev");
  const auto& s = c.scan;
  if (s.kind != ScanKind::none) put("scan", "kind", to_string(s.kind));
  switch (s.kind) {
    case ScanKind::none:
      break;
    case ScanKind::angle:
      put("scan", "angles", join(s.angles, 1.0, "rad"));
      break;
    case ScanKind::strengths:
      put("scan", "p1_values", join(s.p1_values, 1.0, ""));
      put("scan", "p2_values", join(s.p2_values, 1.0, ""));
      break;
    case ScanKind::budget:
      put("scan", "budget", g17(s.budget));
      put("scan", "differences", join(s.differences, 1.0, ""));
      break;
    case ScanKind::delay:
      put("scan", "center", g17(s.delay_center * to_trev) + " T_rev");
      put("scan", "halfwidth", g17(s.delay_halfwidth * to_trev) + " T_rev");
      put("scan", "points", std::to_string(s.delay_points));
      break;
  }
  const auto& a = c.analysis;
  put("analysis", "density", a.density ? "true" : "false");
  put("analysis", "density_n_theta", std::to_string(a.density_n_theta));
  put("analysis", "density_n_phi", std::to_string(a.density_n_phi));
  if (!a.fractions.empty()) put("analysis", "fractions", join(a.fractions, 1.0, ""));
  put("analysis", "compare_engines", a.compare_engines ? "true" : "false");
  const auto& o = c.output;
  put("output", "stem", o.stem);
  std::vector<std::string> formats;
  if (o.csv) formats.push_back("csv");
  if (o.json) formats.push_back("json");
  if (o.svg) formats.push_back("svg");
  std::string f;
  for (std::size_t i = 0; i < formats.size(); ++i) f += (i ? ", " : "") + formats[i];
  put("output", "formats", f);
  if (!o.title.empty()) put("output", "title", o.title);
  if (o.reference_line) put("output", "reference_line", g17(*o.reference_line));

  std::string out;
  for (const auto& [name, sec] : doc) {
    out += "[" + name + "]\n";
    for (const auto& [key, e] : sec) out += key + " = " + e.value + "\n";
  }
  return out;
}

}  // namespace rotor

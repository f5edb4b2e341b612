#include "lse/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <json.hpp>
#include <sstream>
#include <system_error>

#include "lse/error.hpp"
#include "lse/reference.hpp"

namespace lse {

namespace {

using json = nlohmann::json;

enum class Range { Any, NonNegative, Positive };

struct NumberField {
  std::string base;
  std::string suffix;  // empty for dimensionless
  Range range;
  double& (*ref)(RunConfig&);
  bool required = true;

  std::string key() const { return suffix.empty() ? base : base + "_" + suffix; }
};

struct BoolField {
  std::string base;
  bool& (*ref)(RunConfig&);
};

struct Section {
  std::string name;
  bool required = true;
  std::vector<NumberField> numbers;
  std::vector<BoolField> bools;
  std::vector<Section> children;
  // fields that need custom handling: key, parse, write
  struct Custom {
    std::string key;
    bool required;
    std::function<void(RunConfig&, const json&, const std::string&)> parse;
    std::function<json(const RunConfig&)> write;
  };
  std::vector<Custom> custom;
};

#define NUM(base, suffix, range, expr) \
  NumberField { base, suffix, Range::range, [](RunConfig& r) -> double& { return expr; } }
#define BOOL(base, expr) \
  BoolField { base, [](RunConfig& r) -> bool& { return expr; } }

Section phonon_section(const std::string& name, bool optical) {
  Section s;
  s.name = name;
  if (optical) {
    s.numbers = {NUM("energy_hw", "eV", Positive, r.model.branches.optical.energy_hw),
                 NUM("base_width", "per_ps", NonNegative, r.model.branches.optical.base_width),
                 NUM("spontaneous_floor", "per_ps", NonNegative,
                     r.model.branches.optical.spontaneous_floor)};
  } else {
    s.numbers = {NUM("energy_hw", "eV", Positive, r.model.branches.acoustic.energy_hw),
                 NUM("base_width", "per_ps", NonNegative, r.model.branches.acoustic.base_width),
                 NUM("spontaneous_floor", "per_ps", NonNegative,
                     r.model.branches.acoustic.spontaneous_floor)};
  }
  return s;
}

const Section& schema() {
  static const Section root = [] {
    Section root;
    root.name = "";

    Section laws;
    laws.name = "rate_laws";
    laws.numbers = {
        NUM("gamma_L0", "per_ps", NonNegative, r.model.laws.gamma_L0),
        NUM("gamma_R0", "per_ps", NonNegative, r.model.laws.gamma_R0),
        NUM("gamma_P0", "per_ps", NonNegative, r.model.laws.gamma_P0),
        NUM("beta_ee", "", Any, r.model.laws.beta_ee),
        NUM("C", "per_ps", NonNegative, r.model.laws.C),
        NUM("E_a", "eV", Any, r.model.laws.E_a),
        NUM("E_F_launch", "eV", Any, r.model.laws.E_F_launch),
        NUM("E_F_receive", "eV", Any, r.model.laws.E_F_receive),
        NUM("re_excite_base", "", NonNegative, r.model.laws.re_excite_base),
        NUM("re_excite_kappa", "", NonNegative, r.model.laws.re_excite_kappa),
    };

    Section phonons;
    phonons.name = "phonons";
    phonons.children = {phonon_section("optical", true), phonon_section("acoustic", false)};

    Section dos;
    dos.name = "dos";
    dos.numbers = {NUM("center_E0", "eV", Any, r.model.dos.center_E0),
                   NUM("variance_sigma2", "eV2", NonNegative, r.model.dos.variance_sigma2),
                   NUM("density_Nl", "", Positive, r.model.dos.density_Nl)};

    Section path;
    path.name = "path";
    path.numbers = {NUM("n_tr", "", NonNegative, r.model.path.n_tr),
                    NUM("n_sc", "", NonNegative, r.model.path.n_sc),
                    NUM("n_p", "", NonNegative, r.model.path.n_p),
                    NUM("n_re", "", NonNegative, r.model.path.n_re),
                    NUM("t_tr", "ps", NonNegative, r.model.path.t_tr),
                    NUM("t_sc", "ps", NonNegative, r.model.path.t_sc),
                    NUM("t_p", "ps", NonNegative, r.model.path.t_p),
                    NUM("t_re", "ps", NonNegative, r.model.path.t_re)};

    Section gel;
    gel.name = "gel";
    gel.numbers = {NUM("t_lsc", "ps", Positive, r.model.gel.t_lsc_fixed),
                   NUM("alpha", "", Positive, r.model.gel.alpha)};
    gel.custom.push_back(
        {"mode", true,
         [](RunConfig& r, const json& v, const std::string& where) {
           if (!v.is_string()) fail(ErrorKind::ParseError, where + ": expected string");
           const auto s = v.get<std::string>();
           if (s == "fixed")
             r.model.gel.mode = GelMode::Fixed;
           else if (s == "self_consistent")
             r.model.gel.mode = GelMode::SelfConsistent;
           else
             fail(ErrorKind::OutOfRange, where);
         },
         [](const RunConfig& r) -> json {
           return r.model.gel.mode == GelMode::Fixed ? "fixed" : "self_consistent";
         }});

    Section toggles;
    toggles.name = "toggles";
    toggles.required = false;
    toggles.bools = {BOOL("include_gel", r.model.toggles.include_gel),
                     BOOL("include_ep", r.model.toggles.include_ep),
                     BOOL("vary_ee", r.model.toggles.vary_ee)};

    Section grid;
    grid.name = "grid";
    grid.required = false;
    grid.numbers = {NUM("mu_half_width_sigmas", "", Positive, r.model.grid.half_width_sigmas)};
    grid.custom.push_back(
        {"mu_points", true,
         [](RunConfig& r, const json& v, const std::string& where) {
           if (!v.is_number_unsigned()) fail(ErrorKind::ParseError, where + ": expected integer");
           const auto n = v.get<std::uint64_t>();
           if (n < 16 || n > 10'000'000) fail(ErrorKind::OutOfRange, where);
           r.model.grid.points = static_cast<std::size_t>(n);
         },
         [](const RunConfig& r) -> json { return static_cast<std::uint64_t>(r.model.grid.points); }});

    Section output;
    output.name = "output";
    output.required = false;
    output.bools = {BOOL("normalize", r.normalize)};

    root.children = {laws, phonons, dos, path, gel, toggles, grid, output};
    root.custom.push_back(
        {"units", false,
         [](RunConfig& r, const json& v, const std::string& where) {
           if (!v.is_string()) fail(ErrorKind::ParseError, where + ": expected string");
           const auto s = v.get<std::string>();
           if (s == "si")
             r.model.natural_units = false;
           else if (s == "natural")
             r.model.natural_units = true;
           else
             fail(ErrorKind::OutOfRange, where);
         },
         [](const RunConfig& r) -> json { return r.model.natural_units ? "natural" : "si"; }});
    root.custom.push_back(
        {"temperatures_K", false,
         [](RunConfig& r, const json& v, const std::string& where) {
           if (!v.is_array()) fail(ErrorKind::ParseError, where + ": expected array");
           r.temperatures.clear();
           for (const auto& t : v) {
             if (!t.is_number()) fail(ErrorKind::ParseError, where + ": expected numbers");
             const double T = t.get<double>();
             if (!std::isfinite(T) || T < 0.0) fail(ErrorKind::OutOfRange, where);
             if (!r.temperatures.empty() && !(T > r.temperatures.back()))
               fail(ErrorKind::OutOfRange, where);
             r.temperatures.push_back(T);
           }
         },
         [](const RunConfig& r) -> json { return r.temperatures; }});
    return root;
  }();
  return root;
}

#undef NUM
#undef BOOL

std::string join(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

void check_range(double v, Range range, const std::string& where) {
  if (!std::isfinite(v)) fail(ErrorKind::OutOfRange, where);
  if (range == Range::NonNegative && v < 0.0) fail(ErrorKind::OutOfRange, where);
  if (range == Range::Positive && !(v > 0.0)) fail(ErrorKind::OutOfRange, where);
}

/// Field base whose unit suffix differs from the given key, if any.
const NumberField* unit_variant(const Section& s, const std::string& key) {
  for (const auto& f : s.numbers) {
    if (key == f.key()) continue;
    if (key == f.base) return &f;
    if (key.size() > f.base.size() && key.compare(0, f.base.size(), f.base) == 0 &&
        key[f.base.size()] == '_')
      return &f;
  }
  return nullptr;
}

void parse_section(const Section& s, const json& obj, const std::string& where, RunConfig& out) {
  if (!obj.is_object()) fail(ErrorKind::ParseError, (where.empty() ? "root" : where) + ": expected object");

  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const auto& f : s.numbers) known |= key == f.key();
    for (const auto& f : s.bools) known |= key == f.base;
    for (const auto& c : s.children) known |= key == c.name;
    for (const auto& c : s.custom) known |= key == c.key;
    if (known) continue;
    if (const NumberField* f = unit_variant(s, key))
      fail(ErrorKind::UnitMismatch, join(where, f->base));
    fail(ErrorKind::UnknownKey, join(where, key));
  }

  for (const auto& f : s.numbers) {
    const std::string name = join(where, f.base);
    const auto it = obj.find(f.key());
    if (it == obj.end()) {
      if (f.required) fail(ErrorKind::MissingKey, name);
      continue;
    }
    if (!it->is_number()) fail(ErrorKind::ParseError, name + ": expected number");
    const double v = it->get<double>();
    check_range(v, f.range, name);
    f.ref(out) = v;
  }
  for (const auto& f : s.bools) {
    const std::string name = join(where, f.base);
    const auto it = obj.find(f.base);
    if (it == obj.end()) fail(ErrorKind::MissingKey, name);
    if (!it->is_boolean()) fail(ErrorKind::ParseError, name + ": expected boolean");
    f.ref(out) = it->get<bool>();
  }
  for (const auto& c : s.custom) {
    const std::string name = join(where, c.key);
    const auto it = obj.find(c.key);
    if (it == obj.end()) {
      if (c.required) fail(ErrorKind::MissingKey, name);
      continue;
    }
    c.parse(out, *it, name);
  }
  for (const auto& c : s.children) {
    const std::string name = join(where, c.name);
    const auto it = obj.find(c.name);
    if (it == obj.end()) {
      if (c.required) fail(ErrorKind::MissingKey, name);
      continue;
    }
    parse_section(c, *it, name, out);
  }
}

json write_section(const Section& s, const RunConfig& in) {
  json obj = json::object();
  auto& mut = const_cast<RunConfig&>(in);
  for (const auto& f : s.numbers) obj[f.key()] = f.ref(mut);
  for (const auto& f : s.bools) obj[f.base] = f.ref(mut);
  for (const auto& c : s.custom) obj[c.key] = c.write(in);
  for (const auto& c : s.children) obj[c.name] = write_section(c, in);
  return obj;
}

void check_number(std::string_view field, std::size_t line) {
  fail(ErrorKind::ParseError,
       "line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
}

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [p, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) check_number(field, line);
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, "byte " + std::to_string(e.byte));
  }
  RunConfig cfg;
  parse_section(schema(), doc, "", cfg);
  if (!(cfg.model.path.total_time() > 0.0)) fail(ErrorKind::OutOfRange, "path");
  validate(cfg.model);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string serialize_config(const RunConfig& config) {
  return write_section(schema(), config).dump(2) + "\n";
}

RunConfig reference_run_config() {
  RunConfig r;
  r.model = reference_config();
  r.temperatures = reference_temperatures();
  return r;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) fail(ErrorKind::Io, "number formatting failed");
  return std::string(buf.data(), p);
}

std::string format_csv(const CsvTable& t) {
  std::string out;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j) out += ',';
    out += t.header[j];
  }
  out += '\n';
  if (t.columns.size() != t.header.size()) fail(ErrorKind::InvalidInput, "column count mismatch");
  const std::size_t rows = t.columns.empty() ? 0 : t.columns[0].size();
  for (const auto& c : t.columns)
    if (c.size() != rows) fail(ErrorKind::InvalidInput, "ragged CSV columns");
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      if (!std::isfinite(t.columns[j][i]))
        fail(ErrorKind::InvalidInput, "non-finite value in column " + t.header[j]);
      if (j) out += ',';
      out += format_number(t.columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) fail(ErrorKind::EmptyFile, lines.empty() ? "no header" : "no data rows");

  CsvTable t;
  for (auto h : split(lines[0], ',')) {
    if (h.empty()) fail(ErrorKind::ParseError, "line 1: empty column name");
    t.header.emplace_back(h);
  }
  t.columns.assign(t.header.size(), {});
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != t.header.size())
      fail(ErrorKind::ParseError, "line " + std::to_string(i + 1) + ": expected " +
                                      std::to_string(t.header.size()) + " fields");
    for (std::size_t j = 0; j < fields.size(); ++j)
      t.columns[j].push_back(parse_number(fields[j], i + 1));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

ObservedCurve parse_observed_csv(std::string_view text, CurveKind kind) {
  const CsvTable t = parse_csv(text);
  std::size_t col = 1;
  if (t.header.size() < 2) fail(ErrorKind::ParseError, "line 1: need at least two columns");
  if (t.header.size() > 2) {
    const char* want = "intensity_au";
    switch (kind) {
      case CurveKind::Peak:
        want = "peak_eV";
        break;
      case CurveKind::Fwhm:
        want = "fwhm_eV";
        break;
      case CurveKind::Lifetime:
        want = "lifetime_ps";
        break;
      case CurveKind::Intensity:
      case CurveKind::SpectrumAtT:
        break;
    }
    const auto it = std::find(t.header.begin(), t.header.end(), want);
    if (it == t.header.end()) fail(ErrorKind::ParseError, std::string("line 1: no column ") + want);
    col = static_cast<std::size_t>(it - t.header.begin());
  }
  const auto& x = t.columns[0];
  const auto& y = t.columns[col];
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  ObservedCurve c;
  c.kind = kind;
  for (std::size_t i : idx) {
    if (!c.abscissa.empty() && x[i] == c.abscissa.back())
      fail(ErrorKind::DuplicateAbscissa, format_number(x[i]));
    c.abscissa.push_back(x[i]);
    c.values.push_back(y[i]);
  }
  return c;
}

ObservedCurve load_observed_csv(const std::filesystem::path& path, CurveKind kind) {
  ObservedCurve c = parse_observed_csv(read_file(path), kind);
  c.source = path.string();
  return c;
}

CsvTable spectrum_table(const Spectrum& s) {
  return {{"energy_eV", "intensity_au"}, {s.energy, s.intensity}};
}

CsvTable observables_table(const SweepResult& sweep) {
  CsvTable t{{"T_K", "peak_eV", "fwhm_eV", "intensity_au", "lifetime_ps"}, {{}, {}, {}, {}, {}}};
  for (const auto& o : sweep.observables) {
    if (!o.ok) continue;
    t.columns[0].push_back(o.temperature);
    t.columns[1].push_back(o.peak_E);
    t.columns[2].push_back(o.fwhm);
    t.columns[3].push_back(o.integrated_intensity);
    t.columns[4].push_back(o.decay_time);
  }
  return t;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "cannot read " + path.string());
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot create " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      fail(ErrorKind::Io, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot rename onto " + path.string());
  }
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

}  // namespace lse

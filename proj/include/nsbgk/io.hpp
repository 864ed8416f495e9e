#pragma once
/// @file io.hpp
/// @brief Configuration parsing, snapshot directories and CSV writers.

#include <zlib.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nsbgk/core.hpp"
#include "nsbgk/diagnostics.hpp"
#include "nsbgk/initial_data.hpp"
#include "nsbgk/stepper.hpp"

namespace nsbgk {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSnapshotSchemaVersion = 1;

/// 17 significant digits, enough to read back the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ValidationError(where + ": cannot parse number '" + std::string(s) + "'");
  return x;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot open file " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot write file " + p.string());
  out << text;
  if (!out) throw ValidationError("write failed for " + p.string());
}

inline std::string crc32_hex(const std::string& bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  c = crc32(c, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(c));
  return buf;
}

// ---------------------------------------------------------------------------------------------------------------
// Configuration

namespace detail {

struct ConfigKey {
  const char* name;
  std::function<void(SimConfig&, const json&, const std::string&)> set;
  std::function<json(const SimConfig&)> get;
};

inline double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ValidationError("key '" + key + "' expects a number, got " + j.dump());
  return j.get<double>();
}

inline long long as_integer(const json& j, const std::string& key) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
  }
  throw ValidationError("key '" + key + "' expects an integer, got " + j.dump());
}

inline bool as_bool(const json& j, const std::string& key) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer() && (j.get<int>() == 0 || j.get<int>() == 1)) return j.get<int>() == 1;
  throw ValidationError("key '" + key + "' expects true or false, got " + j.dump());
}

/// Scalar (applied to every axis) or a list of one to three values.
template <class T, class Conv>
std::array<T, 3> as_axes(const json& j, const std::string& key, std::array<T, 3> cur, Conv conv) {
  if (!j.is_array()) {
    const T x = conv(j, key);
    return {x, x, x};
  }
  if (j.empty() || j.size() > 3) throw ValidationError("key '" + key + "' expects 1 to 3 values, got " + j.dump());
  for (std::size_t a = 0; a < j.size(); ++a) cur[a] = conv(j[a], key);
  for (std::size_t a = j.size(); a < 3; ++a) cur[a] = cur[j.size() - 1];
  return cur;
}

#define NSBGK_NUM(field) \
  ConfigKey { #field, [](SimConfig& c, const json& j, const std::string& k) { c.field = as_number(j, k); }, \
              [](const SimConfig& c) { return json(c.field); } }
#define NSBGK_BOOL(field) \
  ConfigKey { #field, [](SimConfig& c, const json& j, const std::string& k) { c.field = as_bool(j, k); }, \
              [](const SimConfig& c) { return json(c.field); } }

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    auto to_int = [](const json& j, const std::string& k) { return static_cast<int>(as_integer(j, k)); };
    std::vector<ConfigKey> v = {
        {"dim", [=](SimConfig& c, const json& j, const std::string& k) { c.grid.dim = to_int(j, k); },
         [](const SimConfig& c) { return json(c.grid.dim); }},
        {"period",
         [](SimConfig& c, const json& j, const std::string& k) { c.grid.period = as_axes(j, k, c.grid.period, as_number); },
         [](const SimConfig& c) { return json(c.grid.period); }},
        {"cells",
         [=](SimConfig& c, const json& j, const std::string& k) { c.grid.cells = as_axes(j, k, c.grid.cells, to_int); },
         [](const SimConfig& c) { return json(c.grid.cells); }},
        {"vmax",
         [](SimConfig& c, const json& j, const std::string& k) { c.grid.vmax = as_axes(j, k, c.grid.vmax, as_number); },
         [](const SimConfig& c) { return json(c.grid.vmax); }},
        {"vcells",
         [=](SimConfig& c, const json& j, const std::string& k) { c.grid.vcells = as_axes(j, k, c.grid.vcells, to_int); },
         [](const SimConfig& c) { return json(c.grid.vcells); }},
        {"quadrature",
         [](SimConfig& c, const json& j, const std::string& k) {
           const std::string s = j.is_string() ? j.get<std::string>() : j.dump();
           if (s == "midpoint") c.grid.rule = Quadrature::midpoint;
           else if (s == "trapezoid") c.grid.rule = Quadrature::trapezoid;
           else throw ValidationError("key '" + k + "' must be midpoint or trapezoid, got " + s);
         },
         [](const SimConfig& c) { return json(to_string(c.grid.rule)); }},
        NSBGK_BOOL(vmax_auto),
        NSBGK_NUM(gamma),
        NSBGK_NUM(mu),
        NSBGK_NUM(alpha),
        NSBGK_NUM(k),
        NSBGK_NUM(epsilon),
        NSBGK_NUM(delta),
        NSBGK_NUM(dt),
        NSBGK_NUM(t_final),
        NSBGK_NUM(cfl),
        NSBGK_NUM(t_ref),
        NSBGK_NUM(moment_floor),
        NSBGK_NUM(cold_factor),
        NSBGK_NUM(lemma_tol),
        NSBGK_NUM(eps1),
        NSBGK_NUM(lower_a),
        NSBGK_NUM(monitor_m),
        NSBGK_NUM(theta1),
        NSBGK_BOOL(implicit_viscosity),
        NSBGK_BOOL(mass_fix),
        NSBGK_NUM(cg_tol),
        {"picard_max_iters",
         [=](SimConfig& c, const json& j, const std::string& k) { c.picard_max_iters = to_int(j, k); },
         [](const SimConfig& c) { return json(c.picard_max_iters); }},
        NSBGK_NUM(picard_tol),
        NSBGK_NUM(picard_horizon),
        NSBGK_NUM(cauchy_c),
        NSBGK_NUM(memory_cap_mb),
        {"snapshot_every",
         [=](SimConfig& c, const json& j, const std::string& k) { c.snapshot_every = to_int(j, k); },
         [](const SimConfig& c) { return json(c.snapshot_every); }},
        {"init",
         [](SimConfig& c, const json& j, const std::string& k) {
           if (!j.is_string()) throw ValidationError("key '" + k + "' expects a name, got " + j.dump());
           c.init = j.get<std::string>();
         },
         [](const SimConfig& c) { return json(c.init); }},
        NSBGK_NUM(init_rho),
        NSBGK_NUM(init_u),
        NSBGK_NUM(init_rho_f),
        NSBGK_NUM(init_u_f),
        NSBGK_NUM(init_T),
        NSBGK_NUM(amp_rho),
        NSBGK_NUM(amp_u),
        NSBGK_NUM(amp_f),
        NSBGK_NUM(amp_uf),
        NSBGK_NUM(amp_T),
        {"init_mode", [=](SimConfig& c, const json& j, const std::string& k) { c.init_mode = to_int(j, k); },
         [](const SimConfig& c) { return json(c.init_mode); }},
        {"seed",
         [](SimConfig& c, const json& j, const std::string& k) {
           const long long s = as_integer(j, k);
           if (s < 0) throw ValidationError("key 'seed' must be >= 0");
           c.seed = static_cast<std::uint64_t>(s);
         },
         [](const SimConfig& c) { return json(c.seed); }},
    };
    return v;
  }();
  return keys;
}

#undef NSBGK_NUM
#undef NSBGK_BOOL

/// INI value text to JSON: numbers, booleans, comma lists, otherwise a bare string.
inline json ini_value(std::string s) {
  auto trim = [](std::string t) {
    const auto b = t.find_first_not_of(" \t\r");
    const auto e = t.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
  };
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return json(s.substr(1, s.size() - 2));
  if (s.find(',') != std::string::npos) {
    if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    json arr = json::array();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(ini_value(item));
    return arr;
  }
  if (s == "true" || s == "false") return json(s == "true");
  json j = json::parse(s, nullptr, false);
  if (!j.is_discarded() && (j.is_number() || j.is_array())) return j;
  return json(s);
}

}  // namespace detail

/// Names of all accepted configuration keys.
inline std::vector<std::string> config_key_names() {
  std::vector<std::string> out;
  for (const auto& k : detail::config_keys()) out.emplace_back(k.name);
  return out;
}

/// Applies key/value pairs to a config. Unknown keys throw.
inline void apply_config_value(SimConfig& cfg, const std::string& key, const json& value) {
  for (const auto& k : detail::config_keys())
    if (key == k.name) {
      k.set(cfg, value, key);
      return;
    }
  throw ValidationError("unknown config key '" + key + "'");
}

/// Parses flat JSON (text starting with '{') or INI-style `key = value` lines, then validates.
inline SimConfig parse_config_text(const std::string& text, const std::string& source = "<config>") {
  SimConfig cfg;
  auto prefix = [&](const std::string& m) { return "config " + source + ": " + m; };
  std::vector<std::pair<std::string, json>> items;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError(prefix("malformed JSON"));
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_object()) throw ValidationError(prefix("key '" + it.key() + "' must not be nested"));
      items.emplace_back(it.key(), it.value());
    }
  } else {
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      const auto c = line.find_first_of("#;");
      if (c != std::string::npos) line = line.substr(0, c);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ValidationError(prefix("line " + std::to_string(ln) + ": expected key = value"));
      std::string key = line.substr(0, eq);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      if (key.empty()) throw ValidationError(prefix("line " + std::to_string(ln) + ": empty key"));
      items.emplace_back(key, detail::ini_value(line.substr(eq + 1)));
    }
  }
  std::vector<std::string> seen;
  for (const auto& [key, value] : items) {
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw ValidationError(prefix("duplicate key '" + key + "'"));
    seen.push_back(key);
    try {
      apply_config_value(cfg, key, value);
    } catch (const ValidationError& e) {
      throw ValidationError(prefix(e.what()));
    }
  }
  try {
    cfg.validate();
    make_grid(cfg);
  } catch (const ValidationError& e) {
    throw ValidationError(prefix(e.what()));
  }
  return cfg;
}

inline SimConfig parse_config(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("config file not found: " + path.string());
  return parse_config_text(read_file(path), path.string());
}

/// Every key with its current value, as a flat JSON object.
inline json config_to_json(const SimConfig& cfg) {
  json j = json::object();
  for (const auto& k : detail::config_keys()) j[k.name] = k.get(cfg);
  return j;
}

inline SimConfig config_from_json(const json& j, const std::string& source) {
  return parse_config_text(j.dump(), source);
}

// ---------------------------------------------------------------------------------------------------------------
// Snapshots

/// A state read back from disk together with the metadata of its manifest.
struct Snapshot {
  SimConfig cfg;
  KineticState f;
  FluidState fluid;
  double time = 0.0;
  long step = 0;
  int schema_version = kSnapshotSchemaVersion;
  std::string created;
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

/// Row-major CSV: `rows` lines of `cols` values, with a header naming axes and shape.
inline std::string array_csv(const std::string& name, const std::vector<std::string>& axes,
                             const std::vector<int>& shape, const std::vector<double>& data, std::size_t cols) {
  std::vector<std::string> sh;
  for (int n : shape) sh.push_back(std::to_string(n));
  std::string out = "# array=" + name + " axes=" + join(axes) + " shape=" + join(sh) + " order=row-major\n";
  out.reserve(out.size() + data.size() * 24);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += format_double(data[i]);
    out += (i + 1) % cols == 0 ? '\n' : ',';
  }
  return out;
}

inline std::vector<double> parse_array_csv(const std::string& text, const std::string& file,
                                           const std::string& expected_shape, std::size_t rows, std::size_t cols) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# array=", 0) != 0)
    throw ValidationError(file + ": missing array header");
  const auto sp = line.find(" shape=");
  const auto se = line.find(' ', sp + 1);
  const std::string shape = sp == std::string::npos ? "" : line.substr(sp + 7, se - sp - 7);
  if (shape != expected_shape)
    throw ValidationError(file + ": shape mismatch (file " + shape + ", grid " + expected_shape + ")");
  std::vector<double> data;
  data.reserve(rows * cols);
  std::size_t r = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++r;
    std::size_t c = 0, pos = 0;
    while (true) {
      const auto e = line.find(',', pos);
      data.push_back(parse_double(std::string_view(line).substr(pos, e == std::string::npos ? e : e - pos),
                                  file + " row " + std::to_string(r)));
      ++c;
      if (e == std::string::npos) break;
      pos = e + 1;
    }
    if (c != cols)
      throw ValidationError(file + ": shape mismatch at row " + std::to_string(r) + " (" + std::to_string(c) +
                            " values, expected " + std::to_string(cols) + ")");
  }
  if (r != rows)
    throw ValidationError(file + ": shape mismatch (" + std::to_string(r) + " rows, expected " +
                          std::to_string(rows) + ")");
  return data;
}

struct ArrayLayout {
  std::string file;
  std::vector<std::string> axes;
  std::vector<int> shape;
  std::size_t rows, cols;

  std::string shape_text() const {
    std::vector<std::string> sh;
    for (int n : shape) sh.push_back(std::to_string(n));
    return join(sh);
  }
};

inline std::vector<ArrayLayout> snapshot_layout(const PhaseGrid& g) {
  const char* xs[3] = {"x", "y", "z"};
  const char* vs[3] = {"vx", "vy", "vz"};
  std::vector<std::string> sx, sv;
  std::vector<int> nx, nv;
  for (int a = 0; a < g.dim(); ++a) {
    sx.push_back(xs[a]);
    sv.push_back(vs[a]);
    nx.push_back(g.nx(a));
    nv.push_back(g.nv(a));
  }
  std::vector<std::string> fax = sx, uax = sx;
  fax.insert(fax.end(), sv.begin(), sv.end());
  uax.push_back("component");
  std::vector<int> fsh = nx, ush = nx;
  fsh.insert(fsh.end(), nv.begin(), nv.end());
  ush.push_back(g.dim());
  const std::size_t ns = g.n_space();
  return {{"f.csv", fax, fsh, ns, g.n_vel()},
          {"rho.csv", sx, nx, ns, 1},
          {"h.csv", sx, nx, ns, 1},
          {"u.csv", uax, ush, ns, static_cast<std::size_t>(g.dim())}};
}

}  // namespace detail

/// Writes f, rho, h, u as CSV plus manifest.json into `dir`. Returns the manifest.
inline json write_snapshot(const fs::path& dir, const KineticState& f, const FluidState& fluid, const PhaseGrid& g,
                           const SimConfig& cfg, double time, long step = 0) {
  if (f.f.size() != g.size() || fluid.rho.size() != g.n_space() || fluid.h.size() != g.n_space() ||
      fluid.u.size() != g.n_space() * g.dim())
    throw ValidationError("write_snapshot: state does not match the grid");
  fs::create_directories(dir);
  const auto layout = detail::snapshot_layout(g);
  const std::vector<const std::vector<double>*> data = {&f.f, &fluid.rho, &fluid.h, &fluid.u};
  json files = json::object();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& l = layout[i];
    const std::string text = detail::array_csv(l.file.substr(0, l.file.size() - 4), l.axes, l.shape, *data[i], l.cols);
    write_file(dir / l.file, text);
    files[l.file] = {{"crc32", crc32_hex(text)}, {"bytes", text.size()}, {"shape", l.shape}};
  }
  SimConfig echo = cfg;
  echo.grid = g.spec();
  echo.vmax_auto = false;
  json m = {{"format", "nsbgk-snapshot"},
            {"schema_version", kSnapshotSchemaVersion},
            {"created", detail::utc_timestamp()},
            {"time", time},
            {"step", step},
            {"grid",
             {{"dim", g.dim()},
              {"period", g.spec().period},
              {"cells", g.spec().cells},
              {"vmax", g.spec().vmax},
              {"vcells", g.spec().vcells},
              {"quadrature", to_string(g.rule())}}},
            {"config", config_to_json(echo)},
            {"files", files}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");
  return m;
}

inline json write_snapshot(const fs::path& dir, const SystemState& st, const PhaseGrid& g, const SimConfig& cfg,
                           long step = 0) {
  return write_snapshot(dir, st.f, st.fluid, g, cfg, st.time, step);
}

/// Reads a snapshot directory, verifying version, checksums and shapes.
inline Snapshot read_snapshot(const fs::path& dir) {
  const fs::path mp = dir / "manifest.json";
  if (!fs::exists(mp)) throw ValidationError("snapshot manifest not found: " + mp.string());
  const json m = json::parse(read_file(mp), nullptr, false);
  if (m.is_discarded() || !m.is_object()) throw ValidationError("malformed manifest " + mp.string());
  if (!m.contains("schema_version") || !m["schema_version"].is_number_integer())
    throw ValidationError("manifest " + mp.string() + " has no schema_version");
  const int ver = m["schema_version"].get<int>();
  if (ver > kSnapshotSchemaVersion)
    throw ValidationError("unsupported snapshot schema version " + std::to_string(ver) + " in " + mp.string() +
                          " (this binary reads up to " + std::to_string(kSnapshotSchemaVersion) + ")");
  if (ver < 1) throw ValidationError("invalid snapshot schema version " + std::to_string(ver));
  Snapshot s;
  s.schema_version = ver;
  try {
    s.cfg = config_from_json(m.at("config"), mp.string());
    s.time = m.at("time").get<double>();
    s.step = m.at("step").get<long>();
    s.created = m.value("created", "");
  } catch (const json::exception& e) {
    throw ValidationError("manifest " + mp.string() + ": " + e.what());
  }
  const PhaseGrid g = make_grid(s.cfg);
  std::vector<std::vector<double>> arrays;
  for (const auto& l : detail::snapshot_layout(g)) {
    const fs::path p = dir / l.file;
    if (!m["files"].contains(l.file)) throw ValidationError("manifest " + mp.string() + " does not list " + l.file);
    if (!fs::exists(p)) throw ValidationError("snapshot array file missing: " + p.string());
    const std::string text = read_file(p);
    const std::string want = m["files"][l.file].value("crc32", "");
    if (crc32_hex(text) != want)
      throw ValidationError("checksum mismatch for " + p.string() + " (manifest " + want + ", file " +
                            crc32_hex(text) + ")");
    arrays.push_back(detail::parse_array_csv(text, p.string(), l.shape_text(), l.rows, l.cols));
  }
  s.f = KineticState(std::move(arrays[0]), s.time);
  s.fluid.rho = std::move(arrays[1]);
  s.fluid.h = std::move(arrays[2]);
  s.fluid.u = std::move(arrays[3]);
  s.fluid.time = s.time;
  return s;
}

/// Snapshot as a refreshed SystemState.
inline SystemState snapshot_state(const Snapshot& s, const PhaseGrid& g) {
  return make_state(s.f, s.fluid, g, s.cfg, s.time);
}

// ---------------------------------------------------------------------------------------------------------------
// Tabular output

inline std::string diagnostics_header() {
  return detail::join(diagnostics_columns()) + "\n";
}

inline std::string format_diagnostics_row(const DiagnosticsRow& r) {
  std::vector<std::string> c;
  c.reserve(diagnostics_columns().size());
  c.push_back(std::to_string(r.step));
  for (double x : {r.t, r.f_l2k, r.f_h2k, r.f_linfk, r.f_w1infk, r.fluid_h3, r.inf_sym_density, r.inf_rho_f,
                   r.inf_T_f, r.inf_f_l2v, r.L})
    c.push_back(format_double(x));
  for (double x : r.L_terms) c.push_back(format_double(x));
  for (double x : r.v_c) c.push_back(format_double(x));
  for (double x : r.m_c) c.push_back(format_double(x));
  c.push_back(format_double(r.rho_c));
  c.push_back(format_double(r.totals.particle_mass));
  c.push_back(format_double(r.totals.fluid_mass));
  for (double x : r.totals.momentum) c.push_back(format_double(x));
  c.push_back(format_double(r.drift.particle_mass));
  c.push_back(format_double(r.drift.fluid_mass));
  c.push_back(format_double(r.drift.momentum));
  c.push_back(format_double(r.h3_monitor_ratio));
  c.push_back(to_string(r.monitor));
  return detail::join(c) + "\n";
}

inline std::string diagnostics_csv(std::span<const DiagnosticsRow> rows) {
  std::string out = diagnostics_header();
  for (const auto& r : rows) out += format_diagnostics_row(r);
  return out;
}

/// One line per iterate: n, sup_t E, sup_t D, r^n = sup E^n / sup E^{n-1}.
inline std::string iteration_trace_csv(const IterationTrace& tr) {
  std::string out = "n,sup_E,sup_D,r\n";
  for (const auto& it : tr.iterates) {
    const double supD = it.D.empty() ? 0.0 : *std::max_element(it.D.begin(), it.D.end());
    out += std::to_string(it.n) + "," + format_double(it.sup_E) + "," + format_double(supD) + "," +
           format_double(it.ratio) + "\n";
  }
  return out;
}

/// Long-format table of E and D at every time sample of every iterate.
inline std::string cauchy_samples_csv(const IterationTrace& tr) {
  std::string out = "n,t,E,D\n";
  for (const auto& it : tr.iterates)
    for (std::size_t i = 0; i < it.E.size() && i < tr.times.size(); ++i)
      out += std::to_string(it.n) + "," + format_double(tr.times[i]) + "," + format_double(it.E[i]) + "," +
             format_double(i < it.D.size() ? it.D[i] : 0.0) + "\n";
  return out;
}

}  // namespace nsbgk

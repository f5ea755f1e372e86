#pragma once

// Sweep configuration and its flat "key = value" file format.
//
//   protocol        classical | quantum | attach-FM | attach-AFM
//   n               comma-separated chain lengths
//   delta           comma-separated dimerizations (attach: 0 only)
//   t_max           fixed window end; if absent the window is window_per_site * N
//   window_per_site default 3 (attach: 4)
//   dt              grid step, default 0.05
//   gs_tol          Lanczos residual tolerance, default 1e-10
//   krylov_tol      propagator local error tolerance, default 1e-10
//   krylov_dim      propagator subspace size, default 30
//   init            gs | singlets
//   out             output directory
//   jobs            worker threads, default 1
//
// '#' starts a comment. Unknown or repeated keys are errors.

#include <charconv>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spinlink/csv.hpp"
#include "spinlink/initial.hpp"
#include "spinlink/krylov.hpp"

namespace spinlink {

enum class Protocol { Classical, Quantum, AttachFM, AttachAFM };

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Classical: return "classical";
    case Protocol::Quantum: return "quantum";
    case Protocol::AttachFM: return "attach-FM";
    case Protocol::AttachAFM: return "attach-AFM";
  }
  return "?";
}

inline Protocol parse_protocol(const std::string& s) {
  for (auto p : {Protocol::Classical, Protocol::Quantum, Protocol::AttachFM, Protocol::AttachAFM})
    if (s == to_string(p)) return p;
  throw Error("unknown protocol '" + s + "' (classical, quantum, attach-FM, attach-AFM)");
}

inline InitKind parse_init(const std::string& s) {
  if (s == "gs") return InitKind::GroundState;
  if (s == "singlets") return InitKind::SingletProduct;
  throw Error("unknown init '" + s + "' (gs, singlets)");
}

inline bool is_attach(Protocol p) { return p == Protocol::AttachFM || p == Protocol::AttachAFM; }

struct SweepConfig {
  Protocol protocol = Protocol::Quantum;
  std::vector<int> lengths;
  std::vector<double> deltas;
  std::optional<double> t_max;
  std::optional<double> window_per_site;
  double dt = 0.05;
  double gs_tol = 1e-10;
  double krylov_tol = 1e-10;
  int krylov_dim = 30;
  InitKind init = InitKind::GroundState;
  std::string out_dir = "out";
  int jobs = 1;

  double window_for(int n) const {
    if (t_max) return *t_max;
    return window_per_site.value_or(is_attach(protocol) ? 4.0 : 3.0) * n;
  }

  PropagatorConfig propagator() const {
    PropagatorConfig p;
    p.krylov_dim = krylov_dim;
    p.tol = krylov_tol;
    return p;
  }

  void validate() const {
    require(!lengths.empty(), "config: chain length list is empty");
    require(!deltas.empty(), "config: delta list is empty");
    require(dt > 0.0, "config: dt must be positive");
    require(!t_max || *t_max > 0.0, "config: t_max must be positive");
    require(!window_per_site || *window_per_site > 0.0, "config: window_per_site must be positive");
    require(gs_tol > 0.0 && krylov_tol > 0.0, "config: tolerances must be positive");
    require(krylov_dim >= 2, "config: krylov_dim must be at least 2");
    require(jobs >= 1, "config: jobs must be at least 1");
    const int min_n = protocol == Protocol::Quantum ? 3 : 2;
    for (int n : lengths) {
      require(n >= min_n && n <= kMaxQubits, "config: chain length " + std::to_string(n) + " out of range");
      require(is_attach(protocol) || n % 2 == 0, "config: dimerized chains need even N");
    }
    for (double d : deltas) {
      require(d >= 0.0 && d <= 1.0, "config: delta must lie in [0, 1]");
      require(!is_attach(protocol) || d == 0.0, "config: attaching baselines use uniform chains (delta = 0)");
    }
    require(!is_attach(protocol) || init == InitKind::GroundState, "config: attaching baselines have no init choice");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_scalar(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc{} && ptr == s.data() + s.size() && !s.empty(),
          "config: bad value '" + s + "' for '" + key + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_scalar<T>(key, item));
  require(!out.empty(), "config: empty list for '" + key + "'");
  return out;
}

}  // namespace detail

/// Applies one key/value pair; shared by the file parser and the CLI.
inline void apply_config_key(SweepConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_list;
  using detail::parse_scalar;
  if (key == "protocol") c.protocol = parse_protocol(detail::trim(value));
  else if (key == "n") c.lengths = parse_list<int>(key, value);
  else if (key == "delta") c.deltas = parse_list<double>(key, value);
  else if (key == "t_max") c.t_max = parse_scalar<double>(key, value);
  else if (key == "window_per_site") c.window_per_site = parse_scalar<double>(key, value);
  else if (key == "dt") c.dt = parse_scalar<double>(key, value);
  else if (key == "gs_tol") c.gs_tol = parse_scalar<double>(key, value);
  else if (key == "krylov_tol") c.krylov_tol = parse_scalar<double>(key, value);
  else if (key == "krylov_dim") c.krylov_dim = parse_scalar<int>(key, value);
  else if (key == "init") c.init = parse_init(detail::trim(value));
  else if (key == "out") c.out_dir = detail::trim(value);
  else if (key == "jobs") c.jobs = parse_scalar<int>(key, value);
  else throw Error("config: unknown key '" + key + "'");
}

inline SweepConfig parse_config(const std::string& text, SweepConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, int> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = " (line " + std::to_string(lineno) + ")";
    require(eq != std::string::npos, "config: expected 'key = value'" + where);
    const std::string key = detail::trim(line.substr(0, eq));
    require(seen.emplace(key, lineno).second, "config: repeated key '" + key + "'" + where);
    try {
      apply_config_key(base, key, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.what() + where);
    }
  }
  return base;
}

inline SweepConfig load_config(const std::string& path, SweepConfig base = {}) {
  return parse_config(read_file(path), std::move(base));
}

/// Canonical text form; parse_config(to_text(c)) reproduces c.
inline std::string to_text(const SweepConfig& c) {
  std::ostringstream o;
  auto list = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, int>) s += std::to_string(v[i]);
      else s += format_number(v[i]);
    }
    return s;
  };
  o << "protocol = " << to_string(c.protocol) << '\n'
    << "n = " << list(c.lengths) << '\n'
    << "delta = " << list(c.deltas) << '\n';
  if (c.t_max) o << "t_max = " << format_number(*c.t_max) << '\n';
  if (c.window_per_site) o << "window_per_site = " << format_number(*c.window_per_site) << '\n';
  o << "dt = " << format_number(c.dt) << '\n'
    << "gs_tol = " << format_number(c.gs_tol) << '\n'
    << "krylov_tol = " << format_number(c.krylov_tol) << '\n'
    << "krylov_dim = " << c.krylov_dim << '\n'
    << "init = " << to_string(c.init) << '\n'
    << "out = " << c.out_dir << '\n'
    << "jobs = " << c.jobs << '\n';
  return o.str();
}

}  // namespace spinlink

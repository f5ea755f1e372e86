#pragma once

// Sweeps over (N, delta) cells for one protocol. Each finished cell is
// checkpointed under <out>/cells/, so a rerun with the same config only
// computes what is missing. Outputs:
//   series.csv    one row per (cell, t)
//   summary.csv   one row per cell (t*, peak, flags, residual, drifts)
//   fig*.csv      figure tables derived from the summary / series
//   manifest.json config snapshot, version, timestamps, residuals, digests

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "spinlink/attaching.hpp"
#include "spinlink/classical.hpp"
#include "spinlink/config.hpp"
#include "spinlink/digest.hpp"
#include "spinlink/fit.hpp"
#include "spinlink/quantum.hpp"

#ifndef SPINLINK_VERSION
#define SPINLINK_VERSION "0.1.0"
#endif

namespace spinlink {

inline constexpr const char* kVersion = SPINLINK_VERSION;

/// Runs fn(0..count-1) on at most `jobs` threads.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::vector<std::string> series_header(Protocol p) {
  std::vector<std::string> h{"protocol", "n", "delta", "init", "t"};
  switch (p) {
    case Protocol::Classical: h.insert(h.end(), {"F_I", "F_x", "F_y", "F_z", "F_mean", "holevo_bits"}); break;
    case Protocol::Quantum: h.insert(h.end(), {"F1", "F2", "F3", "F_av"}); break;
    default: h.push_back("F_av");
  }
  h.push_back("residual");
  return h;
}

inline const std::vector<std::string>& summary_header() {
  static const std::vector<std::string> h{"protocol", "n",         "delta",       "init",
                                          "window",   "t_star",    "peak",        "on_boundary",
                                          "window_exhausted", "residual", "norm_drift", "energy_drift",
                                          "status"};
  return h;
}

inline std::size_t summary_column(const std::string& name) {
  const auto& h = summary_header();
  const auto it = std::find(h.begin(), h.end(), name);
  require(it != h.end(), "no summary column " + name);
  return static_cast<std::size_t>(it - h.begin());
}

/// Everything a cell contributes to the outputs, already formatted.
struct CellOutput {
  int n = 0;
  double delta = 0.0;
  std::vector<std::vector<std::string>> series;
  std::vector<std::string> summary;
  bool ok = false;
  bool resumed = false;
};

inline std::string cell_key(Protocol p, int n, double delta) {
  return to_string(p) + "_N" + std::to_string(n) + "_d" + format_number(delta);
}

/// F_av^M trajectory of one dimerized chain.
inline QuantumProtocolResult quantum_cell(const SweepConfig& cfg, int n, double delta, double* residual = nullptr) {
  const auto h = build_chain(dimerized_chain(n, delta));
  const auto init = prepare_initial_state(h, cfg.init, cfg.gs_tol);
  if (residual) *residual = init.residual;
  QuantumOptions opts;
  opts.propagator = cfg.propagator();
  const auto grid = make_time_grid(cfg.window_for(n), cfg.dt);
  return run_quantum(h, init, grid, opts);
}

inline ClassicalProtocolResult classical_cell(const SweepConfig& cfg, int n, double delta,
                                              double* residual = nullptr) {
  const auto h = build_chain(dimerized_chain(n, delta));
  const auto init = prepare_initial_state(h, cfg.init, cfg.gs_tol);
  if (residual) *residual = init.residual;
  ClassicalOptions opts;
  opts.propagator = cfg.propagator();
  const auto grid = make_time_grid(cfg.window_for(n), cfg.dt);
  return run_classical(h, init.state, grid, opts);
}

/// The peak is unusable: on the window edge, or (fidelities) below the classical threshold.
inline bool window_exhausted(Protocol p, const OptimalTime& pk) {
  if (pk.on_boundary) return true;
  return p != Protocol::Classical && pk.peak < 2.0 / 3.0;
}

inline CellOutput compute_cell(const SweepConfig& cfg, int n, double delta) {
  CellOutput out;
  out.n = n;
  out.delta = delta;
  const std::string init = is_attach(cfg.protocol) ? "ref" : to_string(cfg.init);
  auto prefix = [&](CsvRow& r) { r << to_string(cfg.protocol) << n << delta << init; };
  auto summarize = [&](const OptimalTime& pk, double residual, const ConservationLog& c) {
    CsvRow r;
    prefix(r);
    r << cfg.window_for(n) << pk.t_star << pk.peak << pk.on_boundary << window_exhausted(cfg.protocol, pk)
      << residual << c.norm_drift << c.energy_drift << "ok";
    out.summary = r.take();
    out.ok = true;
  };
  try {
    double residual = 0.0;
    switch (cfg.protocol) {
      case Protocol::Classical: {
        const auto res = classical_cell(cfg, n, delta, &residual);
        for (std::size_t k = 0; k < res.holevo.size(); ++k) {
          CsvRow r;
          prefix(r);
          r << res.holevo.t[k];
          for (const auto& f : res.bell_fidelity) r << f.value[k];
          r << res.mean_fidelity.value[k] << res.holevo.value[k] << residual;
          out.series.push_back(r.take());
        }
        summarize(res.capacity_peak, residual, res.conservation);
        break;
      }
      case Protocol::Quantum: {
        const auto res = quantum_cell(cfg, n, delta, &residual);
        for (std::size_t k = 0; k < res.average_fidelity.size(); ++k) {
          CsvRow r;
          prefix(r);
          r << res.average_fidelity.t[k] << res.f1.value[k] << res.f2.value[k] << res.f3.value[k]
            << res.average_fidelity.value[k] << residual;
          out.series.push_back(r.take());
        }
        summarize(res.peak, residual, res.conservation);
        break;
      }
      case Protocol::AttachFM:
      case Protocol::AttachAFM: {
        AttachingOptions opts;
        opts.propagator = cfg.propagator();
        opts.gs_tol = cfg.gs_tol;
        const auto scheme = cfg.protocol == Protocol::AttachFM ? AttachScheme::FM : AttachScheme::AFM;
        const auto res = run_attaching(scheme, n, make_time_grid(cfg.window_for(n), cfg.dt), opts);
        for (std::size_t k = 0; k < res.average_fidelity.size(); ++k) {
          CsvRow r;
          prefix(r);
          r << res.average_fidelity.t[k] << res.average_fidelity.value[k] << res.reference_residual;
          out.series.push_back(r.take());
        }
        summarize(res.peak, res.reference_residual, res.conservation);
        break;
      }
    }
  } catch (const std::exception& e) {
    std::string msg = std::string("error: ") + e.what();
    for (char& ch : msg)
      if (ch == ',' || ch == '"' || ch == '\n' || ch == '\r') ch = ';';
    const double nan = std::nan("");
    CsvRow r;
    prefix(r);
    r << cfg.window_for(n) << nan << nan << false << false << nan << nan << nan << msg;
    out.series.clear();
    out.summary = r.take();
    out.ok = false;
  }
  return out;
}

struct CellRecord {
  std::string key;
  int n;
  double delta;
  std::string status;
  double residual;
  bool resumed;
};

struct RunManifest {
  std::string config;
  std::string version;
  std::string started;
  std::string finished;
  std::vector<CellRecord> cells;
  std::map<std::string, std::string> digests;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "spinlink";
    j["version"] = version;
    j["started"] = started;
    j["finished"] = finished;
    j["config"] = nlohmann::ordered_json::object();
    std::istringstream lines(config);
    for (std::string line; std::getline(lines, line);) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) j["config"][line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : cells)
      j["cells"].push_back({{"key", c.key}, {"n", c.n}, {"delta", c.delta}, {"status", c.status},
                            {"residual", c.residual}, {"resumed", c.resumed}});
    j["files"] = nlohmann::ordered_json::object();
    for (const auto& [name, d] : digests) j["files"][name] = {{"sha256", d}};
    return j;
  }
};

/// Writes the named tables into `dir` and records their digests in `m`.
inline void emit_files(const std::filesystem::path& dir, const std::vector<std::pair<std::string, CsvTable>>& files,
                       RunManifest& m) {
  for (const auto& [name, table] : files) {
    const std::string text = to_csv(table);
    write_file_atomic(dir / name, text);
    m.digests[name] = sha256_hex(text);
  }
}

inline void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  write_file_atomic(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

namespace detail {

/// Fingerprint of the settings that determine cell contents.
inline std::string checkpoint_fingerprint(const SweepConfig& cfg) {
  SweepConfig c = cfg;
  c.out_dir = "";
  c.jobs = 1;
  c.lengths = {2};
  c.deltas = {0.0};
  return to_text(c);
}

inline std::optional<CellOutput> load_checkpoint(const std::filesystem::path& dir, const std::string& key,
                                                 Protocol p, int n, double delta) {
  const auto summary = dir / (key + ".summary.csv");
  const auto series = dir / (key + ".series.csv");
  if (!std::filesystem::exists(summary) || !std::filesystem::exists(series)) return std::nullopt;
  const auto s = read_csv(summary);
  const auto t = read_csv(series);
  if (s.header != summary_header() || s.rows.size() != 1 || t.header != series_header(p)) return std::nullopt;
  CellOutput out;
  out.n = n;
  out.delta = delta;
  out.summary = s.rows[0];
  out.series = t.rows;
  out.ok = true;
  out.resumed = true;
  return out;
}

inline void save_checkpoint(const std::filesystem::path& dir, const std::string& key, Protocol p,
                            const CellOutput& c) {
  write_csv(dir / (key + ".series.csv"), {series_header(p), c.series});
  // The summary marks the cell complete, so it goes last.
  write_csv(dir / (key + ".summary.csv"), {summary_header(), {c.summary}});
}

}  // namespace detail

/// Figure tables derived from a sweep, keyed by file name.
inline std::vector<std::pair<std::string, CsvTable>> figure_tables(const SweepConfig& cfg,
                                                                   const std::vector<CellOutput>& cells) {
  std::vector<std::pair<std::string, CsvTable>> files;
  const std::size_t c_t = summary_column("t_star"), c_peak = summary_column("peak"),
                    c_ex = summary_column("window_exhausted");
  auto ok_cells = [&](double delta) {
    std::vector<const CellOutput*> v;
    for (const auto& c : cells)
      if (c.ok && c.delta == delta) v.push_back(&c);
    return v;
  };
  // Per-delta linear fit of `y` against N, evaluated at each N (nan if under 3 points).
  auto fitted = [&](const std::vector<const CellOutput*>& v, std::size_t y_col) {
    std::vector<double> x, y;
    for (const auto* c : v) {
      x.push_back(c->n);
      y.push_back(std::stod(c->summary[y_col]));
    }
    std::vector<double> out(v.size(), std::nan(""));
    if (x.size() >= 3) {
      const auto fit = fit_linear(x, y);
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = fit.at(x[i]);
    }
    return out;
  };

  if (cfg.protocol == Protocol::Classical) {
    CsvTable f1b{{"delta", "n", "t_star", "capacity", "t_star_fit"}, {}};
    for (double d : cfg.deltas) {
      const auto v = ok_cells(d);
      const auto fit = fitted(v, c_t);
      for (std::size_t i = 0; i < v.size(); ++i) {
        CsvRow r;
        r << d << v[i]->n << std::stod(v[i]->summary[c_t]) << std::stod(v[i]->summary[c_peak]) << fit[i];
        f1b.rows.push_back(r.take());
      }
    }
    files.emplace_back("fig1b.csv", std::move(f1b));
    // Fig. 1(a): Bell fidelities of the longest chain at the first delta.
    const CellOutput* longest = nullptr;
    for (const auto* c : ok_cells(cfg.deltas.front()))
      if (!longest || c->n > longest->n) longest = c;
    if (longest) {
      CsvTable f1a{{"n", "delta", "t", "F_I", "F_x", "F_y", "F_z", "holevo_bits"}, {}};
      for (const auto& row : longest->series) {
        std::vector<std::string> r{row[1], row[2], row[4], row[5], row[6], row[7], row[8], row[10]};
        f1a.rows.push_back(std::move(r));
      }
      files.emplace_back("fig1a.csv", std::move(f1a));
    }
  } else if (cfg.protocol == Protocol::Quantum) {
    CsvTable f2a{{"delta", "n", "t_star", "fidelity", "fit"}, {}};
    for (double d : cfg.deltas) {
      const auto v = ok_cells(d);
      const auto fit = fitted(v, c_peak);
      for (std::size_t i = 0; i < v.size(); ++i) {
        CsvRow r;
        r << d << v[i]->n << std::stod(v[i]->summary[c_t]) << std::stod(v[i]->summary[c_peak]) << fit[i];
        f2a.rows.push_back(r.take());
      }
    }
    files.emplace_back("fig2a.csv", std::move(f2a));
    CsvTable f2b{{"n", "delta", "t_star", "fidelity", "window_exhausted"}, {}};
    for (int n : cfg.lengths)
      for (const auto& c : cells)
        if (c.ok && c.n == n) {
          CsvRow r;
          r << n << c.delta << std::stod(c.summary[c_t]) << std::stod(c.summary[c_peak]);
          f2b.rows.push_back(r.take());
          f2b.rows.back().push_back(c.summary[c_ex]);
        }
    files.emplace_back("fig2b.csv", std::move(f2b));
  }
  return files;
}

struct SweepResult {
  std::vector<CellOutput> cells;
  RunManifest manifest;
};

/// Runs every (N, delta) cell of `cfg`, resuming from checkpoints, and writes all outputs.
inline SweepResult run_sweep(const SweepConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  for (int n : cfg.lengths) require(!make_time_grid(cfg.window_for(n), cfg.dt).empty(), "config: empty time grid");
  const std::filesystem::path out(cfg.out_dir);
  const auto cell_dir = out / "cells";
  std::filesystem::create_directories(cell_dir);

  const auto fp_path = cell_dir / "config.txt";
  const std::string fp = detail::checkpoint_fingerprint(cfg);
  if (std::filesystem::exists(fp_path))
    require(read_file(fp_path) == fp, "checkpoints in " + cell_dir.string() + " come from a different config");
  else
    write_file_atomic(fp_path, fp);

  SweepResult res;
  res.manifest.config = to_text(cfg);
  res.manifest.version = kVersion;
  res.manifest.started = utc_timestamp();

  std::vector<std::pair<int, double>> plan;
  for (int n : cfg.lengths)
    for (double d : cfg.deltas) plan.emplace_back(n, d);
  res.cells.resize(plan.size());
  std::mutex log_mutex;
  parallel_for(plan.size(), cfg.jobs, [&](std::size_t i) {
    const auto [n, d] = plan[i];
    const std::string key = cell_key(cfg.protocol, n, d);
    if (auto c = detail::load_checkpoint(cell_dir, key, cfg.protocol, n, d)) {
      res.cells[i] = std::move(*c);
    } else {
      res.cells[i] = compute_cell(cfg, n, d);
      if (res.cells[i].ok) detail::save_checkpoint(cell_dir, key, cfg.protocol, res.cells[i]);
    }
    if (log) {
      std::lock_guard lk(log_mutex);
      *log << key << ": " << res.cells[i].summary.back() << (res.cells[i].resumed ? " (resumed)" : "") << '\n';
    }
  });

  CsvTable series{series_header(cfg.protocol), {}};
  CsvTable summary{summary_header(), {}};
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& c = res.cells[i];
    series.rows.insert(series.rows.end(), c.series.begin(), c.series.end());
    summary.rows.push_back(c.summary);
    res.manifest.cells.push_back({cell_key(cfg.protocol, c.n, c.delta), c.n, c.delta, c.summary.back(),
                                  c.ok ? std::stod(c.summary[summary_column("residual")]) : std::nan(""), c.resumed});
  }
  std::vector<std::pair<std::string, CsvTable>> files{{"series.csv", std::move(series)},
                                                      {"summary.csv", std::move(summary)}};
  for (auto& f : figure_tables(cfg, res.cells)) files.push_back(std::move(f));
  emit_files(out, files, res.manifest);
  res.manifest.finished = utc_timestamp();
  write_manifest(out, res.manifest);
  return res;
}

}  // namespace spinlink

#pragma once

// Composite experiments built on the sweep machinery: the strategy table,
// the dimerization sweep and the length scalings.

#include <filesystem>

#include "spinlink/sweep.hpp"

namespace spinlink {

struct Table1Row {
  int n;
  OptimalTime fm;
  OptimalTime afm;
  OptimalTime measurement;
  /// F_av^M > AFM > FM at this N.
  bool ordered;
};

/// Baselines on [0, 4N], the measurement protocol on [0, 3N], in parallel over all cells.
inline std::vector<Table1Row> run_table1(const std::vector<int>& lengths, double delta, const SweepConfig& base) {
  std::vector<Table1Row> rows(lengths.size());
  parallel_for(3 * lengths.size(), base.jobs, [&](std::size_t i) {
    const int n = lengths[i / 3];
    Table1Row& row = rows[i / 3];
    row.n = n;
    AttachingOptions opts;
    opts.propagator = base.propagator();
    opts.gs_tol = base.gs_tol;
    const auto grid = make_time_grid(4.0 * n, base.dt);
    switch (i % 3) {
      case 0: row.fm = run_attaching(AttachScheme::FM, n, grid, opts).peak; break;
      case 1: row.afm = run_attaching(AttachScheme::AFM, n, grid, opts).peak; break;
      default: {
        SweepConfig c = base;
        c.protocol = Protocol::Quantum;
        c.t_max.reset();
        c.window_per_site = 3.0;
        row.measurement = quantum_cell(c, n, delta).peak;
      }
    }
  });
  for (auto& r : rows) r.ordered = strategy_ordering(r.measurement.peak, r.afm.peak, r.fm.peak);
  return rows;
}

inline CsvTable table1_csv(const std::vector<Table1Row>& rows) {
  CsvTable t{{"n", "fm", "fm_t_star", "afm", "afm_t_star", "measurement", "measurement_t_star", "ordered"}, {}};
  for (const auto& r : rows) {
    CsvRow c;
    c << r.n << r.fm.peak << r.fm.t_star << r.afm.peak << r.afm.t_star << r.measurement.peak
      << r.measurement.t_star << r.ordered;
    t.rows.push_back(c.take());
  }
  return t;
}

/// Writes table1.csv and its manifest into cfg.out_dir.
inline RunManifest write_table1(const SweepConfig& cfg, const std::vector<Table1Row>& rows, std::string started) {
  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);
  RunManifest m;
  m.config = to_text(cfg);
  m.version = kVersion;
  m.started = std::move(started);
  emit_files(out, {{"table1.csv", table1_csv(rows)}}, m);
  m.finished = utc_timestamp();
  write_manifest(out, m);
  return m;
}

struct DeltaPoint {
  double delta;
  OptimalTime peak;
  bool exhausted;
};

struct DeltaSweepResult {
  int n;
  std::vector<DeltaPoint> points;
  /// Delta of the largest F_av^M(t*) among points whose window was not exhausted.
  double argmax_delta;
};

inline DeltaSweepResult delta_sweep(int n, const std::vector<double>& deltas, const SweepConfig& base) {
  require(!deltas.empty(), "delta sweep needs at least one delta");
  DeltaSweepResult r{n, std::vector<DeltaPoint>(deltas.size()), std::nan("")};
  parallel_for(deltas.size(), base.jobs, [&](std::size_t i) {
    SweepConfig c = base;
    c.protocol = Protocol::Quantum;
    const auto pk = quantum_cell(c, n, deltas[i]).peak;
    r.points[i] = {deltas[i], pk, window_exhausted(Protocol::Quantum, pk)};
  });
  double best = -1.0;
  for (const auto& p : r.points)
    if (!p.exhausted && p.peak.peak > best) {
      best = p.peak.peak;
      r.argmax_delta = p.delta;
    }
  return r;
}

/// F_av^M(t*) against N with its least-squares line, cells in parallel.
inline ScalingResult fidelity_scaling(const std::vector<int>& lengths, double delta, const SweepConfig& base) {
  std::vector<ScalingPoint> points(lengths.size());
  parallel_for(lengths.size(), base.jobs, [&](std::size_t i) {
    SweepConfig c = base;
    c.protocol = Protocol::Quantum;
    const auto pk = quantum_cell(c, lengths[i], delta).peak;
    points[i] = {lengths[i], pk.t_star, pk.peak, pk.on_boundary};
  });
  return fit_fidelity_scaling(std::move(points));
}

struct CapacityPoint {
  int n;
  OptimalTime peak;
  double capacity_at_zero;
  double max_capacity;
  ConservationLog conservation;
  double max_xyz_spread;
};

struct CapacityScaling {
  std::vector<CapacityPoint> points;
  /// t* against N.
  LinearFit t_star_fit;
};

inline CapacityScaling capacity_scaling(const std::vector<int>& lengths, double delta, const SweepConfig& base) {
  CapacityScaling out{std::vector<CapacityPoint>(lengths.size()), {}};
  parallel_for(lengths.size(), base.jobs, [&](std::size_t i) {
    SweepConfig c = base;
    c.protocol = Protocol::Classical;
    const auto res = classical_cell(c, lengths[i], delta);
    double spread = 0.0;
    for (std::size_t k = 0; k < res.holevo.size(); ++k) {
      const double fx = res.bell_fidelity[1].value[k], fy = res.bell_fidelity[2].value[k],
                   fz = res.bell_fidelity[3].value[k];
      spread = std::max({spread, std::abs(fx - fy), std::abs(fx - fz), std::abs(fy - fz)});
    }
    out.points[i] = {lengths[i], res.capacity_peak, res.holevo.value.front(),
                     *std::max_element(res.holevo.value.begin(), res.holevo.value.end()), res.conservation, spread};
  });
  if (lengths.size() >= 3) {
    std::vector<double> x, y;
    for (const auto& p : out.points) {
      x.push_back(p.n);
      y.push_back(p.peak.t_star);
    }
    out.t_star_fit = fit_linear(x, y);
  }
  return out;
}

}  // namespace spinlink

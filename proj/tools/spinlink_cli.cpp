#include <CLI11.hpp>

#include <iostream>

#include "spinlink/experiments.hpp"

using namespace spinlink;

namespace {

struct CommonFlags {
  std::string n, delta, init, out, config, protocol, scheme = "FM";
  std::optional<double> t_max, dt;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--n", f.n, "chain lengths, comma separated");
  cmd->add_option("--delta", f.delta, "dimerizations, comma separated");
  cmd->add_option("--t-max", f.t_max, "end of the time window (default: per-site window times N)");
  cmd->add_option("--dt", f.dt, "time grid step");
  cmd->add_option("--init", f.init, "initial state")->check(CLI::IsMember({"gs", "singlets"}));
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--config", f.config, "flat key = value config file")->check(CLI::ExistingFile);
}

/// Config file first, then explicit flags on top.
SweepConfig resolve(const CommonFlags& f, SweepConfig base) {
  if (!f.config.empty()) base = load_config(f.config, std::move(base));
  if (!f.protocol.empty()) apply_config_key(base, "protocol", f.protocol);
  if (!f.n.empty()) apply_config_key(base, "n", f.n);
  if (!f.delta.empty()) apply_config_key(base, "delta", f.delta);
  if (f.t_max) base.t_max = *f.t_max;
  if (f.dt) base.dt = *f.dt;
  if (!f.init.empty()) base.init = parse_init(f.init);
  if (!f.out.empty()) base.out_dir = f.out;
  if (f.jobs) base.jobs = *f.jobs;
  return base;
}

int report(const SweepResult& r) {
  std::cout << to_csv({summary_header(), [&] {
                         std::vector<std::vector<std::string>> rows;
                         for (const auto& c : r.cells) rows.push_back(c.summary);
                         return rows;
                       }()});
  for (const auto& c : r.cells)
    if (!c.ok) return 3;
  return 0;
}

int cmd_ground_state(const SweepConfig& cfg, bool write) {
  CsvTable t{{"n", "delta", "sector", "energy", "gap", "residual", "werner_p", "werner_distance"}, {}};
  for (int n : cfg.lengths)
    for (double d : cfg.deltas) {
      const auto gs = ground_state(build_chain(dimerized_chain(n, d)), cfg.gs_tol);
      const auto w = werner_p(partial_trace(gs.state, {1, 2}));
      CsvRow r;
      r << n << d << gs.state.sector().value_or(0) << gs.energy << gs.gap << gs.residual << w.p << w.distance;
      t.rows.push_back(r.take());
    }
  const std::string text = to_csv(t);
  std::cout << text;
  if (write) {
    std::filesystem::create_directories(cfg.out_dir);
    write_file_atomic(std::filesystem::path(cfg.out_dir) / "ground_state.csv", text);
  }
  return 0;
}

int cmd_table1(const SweepConfig& cfg) {
  const std::string started = utc_timestamp();
  const auto rows = run_table1(cfg.lengths, cfg.deltas.front(), cfg);
  write_table1(cfg, rows, started);
  std::cout << to_csv(table1_csv(rows));
  for (const auto& r : rows)
    if (!r.ordered) {
      std::cerr << "ordering F_av^M > AFM > FM violated at N=" << r.n << '\n';
      return 2;
    }
  return 0;
}

int cmd_fit(const std::string& input, const std::string& x, const std::string& y) {
  const auto t = read_csv(input);
  const auto fit = fit_linear(t.numbers(x), t.numbers(y));
  CsvTable out{{"x", "y", "slope", "intercept", "r_squared", "threshold_crossing"}, {}};
  CsvRow r;
  r << x << y << fit.slope << fit.intercept << fit.r_squared << fit.crossing(2.0 / 3.0);
  out.rows.push_back(r.take());
  std::cout << to_csv(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement-assisted communication through dimerized Heisenberg chains"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonFlags gs_f, cl_f, qu_f, at_f, t1_f, sw_f;
  auto* gs = app.add_subcommand("ground-state", "ground-state energy, gap and Werner weight of sites (1,2)");
  auto* cl = app.add_subcommand("classical", "Bell-encoding protocol: F^a(t) and Holevo information");
  auto* qu = app.add_subcommand("quantum", "rotation-encoding protocol: average measurement fidelity");
  auto* at = app.add_subcommand("attach", "attach-a-qubit baselines on uniform chains");
  auto* t1 = app.add_subcommand("table1", "strategy comparison table (FM, AFM, measurement protocol)");
  auto* sw = app.add_subcommand("sweep", "checkpointed sweep over chain lengths and dimerizations");
  auto* ft = app.add_subcommand("fit", "least-squares line through two columns of a CSV file");
  for (auto [cmd, f] : {std::pair{gs, &gs_f}, {cl, &cl_f}, {qu, &qu_f}, {at, &at_f}, {t1, &t1_f}, {sw, &sw_f}})
    add_common(cmd, *f);
  at->add_option("--scheme", at_f.scheme, "baseline")->check(CLI::IsMember({"FM", "AFM"}));
  sw->add_option("--protocol", sw_f.protocol, "classical, quantum, attach-FM or attach-AFM");

  std::string fit_input, fit_x = "n", fit_y = "peak";
  ft->add_option("--input", fit_input, "CSV file (e.g. a sweep's summary.csv)")->required()->check(CLI::ExistingFile);
  ft->add_option("--x", fit_x, "abscissa column");
  ft->add_option("--y", fit_y, "ordinate column");

  CLI11_PARSE(app, argc, argv);

  SweepConfig defaults;
  defaults.lengths = {8};
  defaults.deltas = {0.7};
  try {
    if (*gs) {
      auto c = resolve(gs_f, defaults);
      c.validate();
      return cmd_ground_state(c, !gs_f.out.empty());
    }
    if (*cl) {
      auto c = defaults;
      c.protocol = Protocol::Classical;
      return report(run_sweep(resolve(cl_f, c), &std::cerr));
    }
    if (*qu) {
      auto c = defaults;
      c.protocol = Protocol::Quantum;
      return report(run_sweep(resolve(qu_f, c), &std::cerr));
    }
    if (*at) {
      auto c = defaults;
      c.deltas = {0.0};
      c.protocol = at_f.scheme == "FM" ? Protocol::AttachFM : Protocol::AttachAFM;
      return report(run_sweep(resolve(at_f, c), &std::cerr));
    }
    if (*t1) {
      auto c = defaults;
      c.lengths = {6, 8, 10, 12};
      c = resolve(t1_f, c);
      c.validate();
      return cmd_table1(c);
    }
    if (*sw) return report(run_sweep(resolve(sw_f, defaults), &std::cerr));
    if (*ft) return cmd_fit(fit_input, fit_x, fit_y);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <path to spinlink_cli>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "oracle/dense.hpp"
#include "spinlink/experiments.hpp"
#include "test_util.hpp"

using namespace spinlink;
namespace fs = std::filesystem;

namespace {

constexpr double kDelta = 0.7;

// Tabulated reference values, N = 6, 8, 10, 12.
constexpr std::array<int, 4> kTableN{6, 8, 10, 12};
constexpr std::array<double, 4> kMeasurementRef{0.993, 0.980, 0.967, 0.961};
constexpr std::array<double, 4> kFmRef{0.820, 0.787, 0.763, 0.745};
constexpr std::array<double, 4> kAfmRef{0.954, 0.935, 0.919, 0.906};
constexpr double kMeasurementTol = 0.005;
constexpr double kBaselineTol = 0.02;

constexpr double kSlopeRef = -0.0062;
constexpr double kSlopeRelTol = 0.15;
constexpr double kInterceptRef = 1.03;
constexpr double kInterceptTol = 0.03;

constexpr double kCapacityFloor = 1.0;
constexpr double kCapacityAtZeroTol = 1e-8;
constexpr double kCapacityCeiling = 2.0;
constexpr double kCapacityRounding = 1e-9;

constexpr double kQuadratureTol = 1e-6;
constexpr double kWernerDistanceTol = 1e-8;
constexpr double kWernerWeightFloor = 0.99;
constexpr double kOracleTol = 1e-8;
constexpr double kNormDriftTol = 1e-10;
constexpr double kEnergyDriftTol = 1e-8;
constexpr double kEncodingSpreadTol = 1e-8;
constexpr double kSingletCapacityTol = 0.05;
constexpr double kSingletFidelityTol = 0.02;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

/// Dense two-site Werner fit, independent of the library's.
std::pair<double, double> dense_werner(const oracle::Mat& rho) {
  oracle::Vec psi = oracle::Vec::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  const double f = psi.dot(rho * psi).real();
  const double p = (4.0 * f - 1.0) / 3.0;
  const oracle::Mat w = p * psi * psi.adjoint() + (1.0 - p) / 4.0 * oracle::Mat::Identity(4, 4);
  return {p, (rho - w).norm()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <spinlink_cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  SweepConfig base;
  base.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  // [1] [2] measurement protocol and both baselines.
  const auto table = run_table1({kTableN.begin(), kTableN.end()}, kDelta, base);
  {
    bool ok = true;
    std::string d;
    for (std::size_t i = 0; i < table.size(); ++i) {
      ok = ok && std::abs(table[i].measurement.peak - kMeasurementRef[i]) <= kMeasurementTol;
      d += "N=" + std::to_string(table[i].n) + " " + fmt(table[i].measurement.peak) + " (ref " +
           fmt(kMeasurementRef[i]) + ") ";
    }
    report(1, "measurement fidelity at t* (tol " + fmt(kMeasurementTol) + ")", ok, d);
  }
  {
    bool ok = true;
    std::string d;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto& r = table[i];
      ok = ok && std::abs(r.fm.peak - kFmRef[i]) <= kBaselineTol && std::abs(r.afm.peak - kAfmRef[i]) <= kBaselineTol &&
           r.ordered;
      d += "N=" + std::to_string(r.n) + " FM " + fmt(r.fm.peak, 4) + " AFM " + fmt(r.afm.peak, 4) +
           (r.ordered ? " ordered; " : " NOT ordered; ");
    }
    report(2, "attaching baselines and ordering (tol " + fmt(kBaselineTol) + ")", ok, d);
  }

  // [3] scaling fit over N = 6..14.
  const auto q14 = quantum_cell(base, 14, kDelta);
  {
    std::vector<ScalingPoint> pts;
    for (const auto& r : table) pts.push_back({r.n, r.measurement.t_star, r.measurement.peak, r.measurement.on_boundary});
    pts.push_back({14, q14.peak.t_star, q14.peak.peak, q14.peak.on_boundary});
    const auto s = fit_fidelity_scaling(pts);
    const bool ok = std::abs(s.fit.slope - kSlopeRef) <= kSlopeRelTol * std::abs(kSlopeRef) &&
                    std::abs(s.fit.intercept - kInterceptRef) <= kInterceptTol;
    report(3, "linear fit of F_av^M(t*) over N=6..14", ok,
           "slope " + fmt(s.fit.slope) + " (ref " + fmt(kSlopeRef) + " +-" + fmt(100 * kSlopeRelTol) +
               "%), intercept " + fmt(s.fit.intercept) + " (ref " + fmt(kInterceptRef) + " +-" +
               fmt(kInterceptTol) + "), N=14 value " + fmt(q14.peak.peak));
  }

  // [4] [8] classical capacity, conservation and encoding symmetry.
  const auto cap = capacity_scaling({6, 8, 10, 12, 14}, kDelta, base);
  {
    bool ok = true;
    std::string d;
    for (const auto& p : cap.points) {
      ok = ok && p.peak.peak > kCapacityFloor && std::abs(p.capacity_at_zero) < kCapacityAtZeroTol &&
           p.max_capacity <= kCapacityCeiling + kCapacityRounding;
      d += "N=" + std::to_string(p.n) + " C(t*)=" + fmt(p.peak.peak, 4) + " C(0)=" + fmt(p.capacity_at_zero, 2) +
           " max=" + fmt(p.max_capacity, 4) + "; ";
    }
    report(4, "classical capacity bounds", ok, d);
  }

  // [5] closed-form average against product quadrature.
  {
    std::mt19937_64 rng(20240607);
    const std::array<int, 4> ns{4, 6, 8, 10};
    const std::array<double, 3> deltas{0.3, 0.7, 0.9};
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const int n = ns[rng() % ns.size()];
      const double d = deltas[rng() % deltas.size()];
      const auto grid = make_time_grid(3.0 * n, base.dt);
      const double t = grid[rng() % grid.size()];
      const auto h = build_chain(dimerized_chain(n, d));
      const auto init = prepare_initial_state(h, InitKind::GroundState);
      const double analytic = average_fidelity_analytic(h, init, t);
      const double quad = average_fidelity_quadrature(h, init, t, SphereRule(16, 32)).value;
      worst = std::max(worst, std::abs(analytic - quad));
    }
    report(5, "closed-form F_av^M vs 16x32 quadrature, 10 random (N, delta, t)", worst < kQuadratureTol,
           "max |diff| " + fmt(worst, 3) + " (tol " + fmt(kQuadratureTol) + ")");
  }

  // [6] ground-state pair (1, 2) is a Werner state.
  {
    bool ok = true;
    std::string d;
    for (double delta : {0.6, 0.7, 0.9}) {
      const auto gs = ground_state(build_chain(dimerized_chain(12, delta))).state;
      const auto rho = oracle::reduced_pair(12, testutil::to_dense(gs), 1, 2);
      const auto [p, dist] = dense_werner(rho);
      const auto lib = werner_p(partial_trace(gs, std::array{1, 2}));
      ok = ok && p > kWernerWeightFloor && std::abs(lib.p - p) < kWernerDistanceTol;
      if (delta == kDelta) ok = ok && dist < kWernerDistanceTol && lib.distance < kWernerDistanceTol;
      d += "delta=" + fmt(delta, 2) + " p=" + fmt(p) + " dist=" + fmt(dist, 2) + "; ";
    }
    report(6, "Werner form of the sender pair, N=12", ok, d);
  }

  // [7] matrix-free kernels against dense oracles at N = 8.
  {
    constexpr int n = 8;
    const auto h = build_chain(dimerized_chain(n, kDelta));
    const oracle::Mat hd = oracle::heisenberg(n, oracle::dimer_bonds(n, kDelta));
    const auto sp = oracle::diagonalize(hd);
    double worst_h = 0.0, worst_t = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto psi = testutil::random_state(n, seed);
      worst_h = std::max(worst_h, testutil::max_abs_diff(testutil::to_dense(h.apply(psi)), hd * testutil::to_dense(psi)));
    }
    const auto gs = ground_state(h);
    const double e_err = std::abs(gs.energy - sp.energies(0));
    const double v_err = testutil::phase_free_distance(testutil::to_dense(gs.state), oracle::ground_vector(sp));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0 * n);
    const auto psi = apply_rotation(gs.state, 1, 1.1, 0.4);
    const oracle::Vec psi_d = testutil::to_dense(psi);
    for (int k = 0; k < 20; ++k) {
      const double t = u(rng);
      worst_t = std::max(worst_t, testutil::max_abs_diff(testutil::to_dense(evolve(h, psi, t)),
                                                         oracle::expm_apply(sp, psi_d, t)));
    }
    const bool ok = worst_h < kOracleTol && e_err < kOracleTol && v_err < kOracleTol && worst_t < kOracleTol;
    report(7, "H, Lanczos and Krylov vs dense at N=8", ok,
           "H " + fmt(worst_h, 2) + ", E0 " + fmt(e_err, 2) + ", |gs| " + fmt(v_err, 2) + ", U(t) over 20 times " +
               fmt(worst_t, 2));
  }

  {
    bool ok = true;
    double norm = 0.0, energy = 0.0, spread = 0.0;
    for (const auto& p : cap.points) {
      norm = std::max(norm, p.conservation.norm_drift);
      energy = std::max(energy, p.conservation.energy_drift);
      spread = std::max(spread, p.max_xyz_spread);
    }
    for (const auto* q : {&q14.conservation}) {
      norm = std::max(norm, q->norm_drift);
      energy = std::max(energy, q->energy_drift);
    }
    ok = norm < kNormDriftTol && energy < kEnergyDriftTol && spread < kEncodingSpreadTol;
    report(8, "conservation over [0,3N] and F^x=F^y=F^z", ok,
           "norm drift " + fmt(norm, 2) + ", energy drift " + fmt(energy, 2) + ", max |F^a-F^b| " + fmt(spread, 2));
  }

  // [9] dimerization sweep at N = 12.
  {
    const std::vector<double> deltas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 0.99};
    const auto s = delta_sweep(12, deltas, base);
    bool monotone = true;
    double prev = -1.0;
    std::string d;
    for (const auto& p : s.points) {
      d += fmt(p.delta, 2) + ":" + fmt(p.peak.peak, 4) + "@" + fmt(p.peak.t_star, 4) + (p.exhausted ? "(x) " : " ");
      if (p.delta >= 0.8 - 1e-12 && !p.exhausted) {
        monotone = monotone && p.peak.t_star > prev;
        prev = p.peak.t_star;
      }
    }
    const bool ok = s.argmax_delta >= 0.6 && s.argmax_delta <= 0.8 && monotone && s.points.back().exhausted;
    report(9, "dimerization sweep at N=12", ok,
           "argmax " + fmt(s.argmax_delta, 2) + (monotone ? ", t* monotone" : ", t* NOT monotone") +
               (s.points.back().exhausted ? ", 0.99 exhausted; " : ", 0.99 NOT flagged; ") + d);
  }

  // [10] singlet-product initialization at N = 10.
  {
    SweepConfig c = base;
    c.init = InitKind::SingletProduct;
    const auto qs = quantum_cell(c, 10, kDelta);
    const auto cs = classical_cell(c, 10, kDelta);
    const double f_gs = table[2].measurement.peak;
    const double c_gs = cap.points[2].peak.peak;
    const double dc = std::abs(cs.capacity_peak.peak - c_gs), df = std::abs(qs.peak.peak - f_gs);
    report(10, "singlet-product start vs ground state, N=10", dc < kSingletCapacityTol && df < kSingletFidelityTol,
           "C " + fmt(cs.capacity_peak.peak) + " vs " + fmt(c_gs) + ", F_av^M " + fmt(qs.peak.peak) + " vs " +
               fmt(f_gs));
  }

  // [11] byte-identical table1.csv from two CLI runs.
  {
    const fs::path root = fs::temp_directory_path() / "spinlink_acceptance_repro";
    fs::remove_all(root);
    bool ok = true;
    std::array<std::string, 2> bodies;
    for (int k = 0; k < 2; ++k) {
      const fs::path out = root / std::to_string(k);
      const std::string cmd = "\"" + cli + "\" table1 --jobs " + std::to_string(k + 1) + " --out \"" + out.string() +
                              "\" > /dev/null";
      ok = ok && std::system(cmd.c_str()) == 0;
      if (ok) bodies[k] = read_file(out / "table1.csv");
    }
    ok = ok && !bodies[0].empty() && bodies[0] == bodies[1];
    report(11, "reproducible table1.csv", ok, ok ? "sha256 " + sha256_hex(bodies[0]) : "outputs differ or run failed");
    fs::remove_all(root);
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

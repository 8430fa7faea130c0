// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <atomic>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <mutex>
#include <random>
#include <thread>

#include "ramem/fitting.hpp"
#include "ramem/io.hpp"
#include "ramem/scans.hpp"

using namespace ramem;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[%d] %s %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

double wall_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr int kWorkers = 8;

// ---------------------------------------------------------------------------

void criterion_1_and_2_and_3() {
  const Preset& p = preset("sim-750pJ");

  // single-run check at the pinned laptop grid
  auto t0 = std::chrono::steady_clock::now();
  const MemoryResult rb = memory_run(p.medium, DetuningConfig::bns(p.medium), p.seq, p.grid, p.opts);
  const double single_run_s = wall_since(t0);
  SolverOptions off = p.opts;
  off.fwm_enabled = false;
  const MemoryResult ri = memory_run(p.medium, DetuningConfig::bns(p.medium), p.seq, p.grid, off);
  const double rel = std::abs(rb.eta_total - ri.eta_total) / ri.eta_total;
  report(1, rel <= 0.01 && single_run_s < 30.0,
         fmt("BNS matches ideal on the 750 pJ preset: |eta_BNS - eta_off|/eta_off = %.3e <= 1e-2; "
             "single run %.2f s < 30 s (eta = %.4f)",
             rel, single_run_s, rb.eta_total));

  // detuning scans, 101 points per side, 8 workers
  t0 = std::chrono::steady_clock::now();
  ScanSpec spec;
  spec.variable = ScanVariable::detuning;
  spec.lo = 2 * p.medium.Delta_hf - ghz_to_angular(5.0);
  spec.hi = 2 * p.medium.Delta_hf + ghz_to_angular(5.0);
  spec.n_points = 101;
  spec.outputs = {"eta", "eta_minus_ideal"};
  spec.workers = kWorkers;
  spec.cases = {CaseKind::BNS};
  const auto red = run_scan(spec);
  spec.cases = {CaseKind::STD};
  const auto blue = run_scan(spec);
  const double scan_s = wall_since(t0);

  const int center = 50;  // grid includes the exact condition at the midpoint
  bool all_ok = true;
  for (const auto& r : red) all_ok = all_ok && r.ok;
  for (const auto& r : blue) all_ok = all_ok && r.ok;
  const double db = red[center].values.at("eta_minus_ideal");
  const double ds = blue[center].values.at("eta_minus_ideal");
  const double ratio = std::abs(db / ds);
  // the suppression is deepest at the exact absorption condition
  int min_idx = 0;
  double min_val = 1e300;
  for (int i = 0; i < 101; ++i) {
    const double v = std::abs(red[i].values.at("eta_minus_ideal"));
    if (v < min_val) {
      min_val = v;
      min_idx = i;
    }
  }
  report(2, all_ok && ratio <= 1e-4 && min_idx == center && scan_s < 1800.0,
         fmt("gain suppression at the exact condition: |(eta_BNS-eta_ideal)/(eta_STD-eta_ideal)| = "
             "%.3e <= 1e-4 (db = %+.3e, ds = %+.3e); min |db| at grid point %d (=50); "
             "2x101-point scan %.0f s < 1800 s",
             ratio, db, ds, min_idx, scan_s));

  bool gain_everywhere = true;
  double worst = 1e300;
  for (const auto& r : blue) {
    const double d = r.values.at("eta_minus_ideal");
    worst = std::min(worst, d);
    gain_everywhere = gain_everywhere && d > 0.0;
  }
  report(3, gain_everywhere,
         fmt("STD gain on the blue side: eta_STD > eta_ideal at all 101 detunings "
             "(smallest excess %+.3e)",
             worst));
}

void criterion_4() {
  const G2Preset& gp = g2_preset("g2-bns-fit");
  const G2Model m = G2Model::fock(gp.N_SRS, gp.N_F);
  const auto thr = heralding_threshold(m, gp.eta);
  const double closed = nonclassical_crossing_photon_number(gp.N_SRS, gp.N_F);
  // independent numeric root of g2_out(N) = 1 by bisection
  double lo = 1e-6, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g2_out(m, mid) > 1.0 ? lo : hi) = mid;
  }
  const double numeric = 0.5 * (lo + hi);
  const bool agree = std::abs(numeric - closed) <= 1e-10;
  const bool in_band = thr.has_value() && *thr >= 0.259 && *thr <= 0.269;
  report(4, agree && in_band,
         fmt("heralding threshold: eta_h = %.4f in [0.259, 0.269]; closed form vs numeric root "
             "|%.3e| <= 1e-10",
             thr.value_or(-1.0), numeric - closed));
}

void criterion_5() {
  const G2Preset& gp = g2_preset("g2-bns-optimized");
  const G2Model m = G2Model::fock(gp.N_SRS, gp.N_F);
  const auto thr = heralding_threshold(m, gp.eta);
  const double g2_unit = g2_out(m, gp.eta);
  const bool thr_ok = thr.has_value() && *thr >= 0.059 && *thr <= 0.071;
  const bool g2_ok = g2_unit >= 0.12 && g2_unit <= 0.16;
  report(5, thr_ok && g2_ok,
         fmt("optimized scenario: threshold %.4f in [0.059, 0.071], g2(eta_h = 1) = %.4f in "
             "[0.12, 0.16]",
             thr.value_or(-1.0), g2_unit));
}

void criterion_6() {
  const G2Preset& gp = g2_preset("g2-std-fit");
  const auto curve = fock_prediction(G2Model::fock(gp.N_SRS, gp.N_F), gp.eta,
                                     ArrayXd::LinSpaced(5001, 0.0, 1.0));
  double mn = 1e300;
  for (const auto& pt : curve) mn = std::min(mn, pt.g2);
  report(6, mn >= 1.0,
         fmt("STD fitted parameters never non-classical: min g2_out over eta_h in [0,1] = %.4f >= 1",
             mn));
}

// --- criterion 7: property suite --------------------------------------------

bool prop_linearity(std::string& msg) {
  const MediumParams m = MediumParams::simulation_default();
  const SimGrid grid{60, 1200, 0.106, 1e-11, 300};
  const SolverOptions opts;
  const PulseSequence seq = build_sequence(60.0, 60.0, 0.070, 1.0);
  const auto cfg = DetuningConfig::bns(m);
  const ArrayXd t = grid.times();
  ArrayXcd omega(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i)
    omega[i] = envelope(seq.read_in, t[i]) + envelope(seq.read_out, t[i]);
  std::mt19937 rng(71);
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int k = 0; k < 5; ++k) {
    ArrayXcd s1(t.size()), s2(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double env = gaussian_envelope(t[i], 0.018, 0.013);
      s1[i] = Complex(nd(rng), nd(rng)) * env;
      s2[i] = Complex(nd(rng), nd(rng)) * env;
    }
    const ArrayXcd zt = ArrayXcd::Zero(t.size()), zz = ArrayXcd::Zero(grid.n_z);
    const auto r1 = evolve_raw(m, cfg, omega, grid, opts, s1, zt, zz);
    const auto r2 = evolve_raw(m, cfg, omega, grid, opts, s2, zt, zz);
    const auto r12 = evolve_raw(m, cfg, omega, grid, opts, s1 + s2, zt, zz);
    worst = std::max(worst,
                     (r12.S - r1.S - r2.S).abs().maxCoeff() / r12.S.abs().maxCoeff());
  }
  msg = fmt("linearity residual %.2e <= 1e-10", worst);
  return worst <= 1e-10;
}

bool prop_passivity(std::string& msg) {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> umag(1.0, 4.0), ue(50.0, 1000.0), uu(0.0, 1.0);
  struct Draw { double delta, energy; };
  std::vector<Draw> draws;
  const MediumParams m = MediumParams::simulation_default();
  for (int k = 0; k < 100; ++k) {
    const double sign = uu(rng) < 0.5 ? -1.0 : 1.0;
    draws.push_back({sign * umag(rng) * m.Delta_hf, ue(rng)});
  }
  std::atomic<int> bad{0};
  std::atomic<size_t> next{0};
  double worst = 0;
  std::mutex mu;
  auto worker = [&] {
    SolverOptions off;
    off.fwm_enabled = false;
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= draws.size()) return;
      const SimGrid grid{60, 2400, 0.106, 1e-9, 200};
      const PulseSequence seq = build_sequence(draws[i].energy, draws[i].energy, 0.070, 1.0);
      const auto r = memory_run(m, DetuningConfig::from_signal(draws[i].delta, m), seq, grid, off);
      const double tot = r.eta_total + r.leakage;
      if (!(tot <= 1.0 + 1e-6) || !(r.eta_total <= 1.0)) ++bad;
      std::lock_guard<std::mutex> lk(mu);
      worst = std::max(worst, tot);
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < kWorkers; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  msg = fmt("FWM-off passivity over 100 draws: max(eta + leakage) = %.6f <= 1 + 1e-6", worst);
  return bad == 0;
}

bool prop_oracle_equivalence(std::string& msg) {
  const MediumParams m = MediumParams::simulation_default();
  const SimGrid grid{40, 480, 0.106, 1e-11, 300};
  const SolverOptions opts;
  const PulseSequence seq = build_sequence(40.0, 40.0, 0.070, 1.0);
  const auto cfg = DetuningConfig::bns(m);
  const GreensFunctionSet g = extract_greens(m, cfg, seq, grid, opts, kWorkers);
  const ArrayXd t = g.t;
  ArrayXcd omega(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i)
    omega[i] = envelope(seq.read_in, t[i]) + envelope(seq.read_out, t[i]);
  std::mt19937 rng(29);
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    ArrayXcd sin_(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
      sin_[i] = Complex(nd(rng), nd(rng)) * gaussian_envelope(t[i], 0.012 + 0.001 * k, 0.012);
    const auto st = evolve_raw(m, cfg, omega, grid, opts, sin_, ArrayXcd::Zero(t.size()),
                               ArrayXcd::Zero(grid.n_z));
    const ArrayXcd direct = st.S.row(grid.n_z - 1).transpose();
    worst = std::max(worst, (direct - g.apply_ss(sin_)).abs().maxCoeff() / direct.abs().maxCoeff());
  }
  msg = fmt("Green's/solver equivalence on 20 envelopes: max rel %.2e <= 1e-8", worst);
  return worst <= 1e-8;
}

bool prop_eq1_identity(std::string& msg) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    const double g2in = 2.0 * u(rng);
    const double eta = 0.05 + 0.9 * u(rng);
    const double gss = eta * eta * (0.5 + u(rng));
    const double nin = 10.0 * u(rng) + 1e-3;
    const double ns = 0.2 * u(rng) + 1e-4;
    const double nf = 0.2 * u(rng) + 1e-4;
    G2Model m;
    m.a = g2in * gss / (eta * eta) - 1.0;
    m.N_SRS = ns;
    m.N_F = nf;
    m.g2_in = g2in;
    const double lhs = g2_out(m, eta * nin);
    const double rhs =
        incoherent_sum(eta * nin + ns, g2_signal_only(g2in, eta, gss, nin, ns), nf, 2.0);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  msg = fmt("Eq.-1 vs incoherent-sum identity on 50 draws: max |diff| %.2e <= 1e-12", worst);
  return worst <= 1e-12;
}

bool prop_alpha_linearity(std::string& msg) {
  const MediumParams m = MediumParams::simulation_default();
  const SimGrid grid{30, 480, 0.106, 1e-10, 300};
  const PulseSequence seq = build_sequence(40.0, 40.0, 0.070, 1.0);
  const GreensFunctionSet g =
      extract_greens(m, DetuningConfig::bns(m), seq, grid, SolverOptions{}, kWorkers);
  const double n1 = noise_numbers(g, 1e-3).N_SRS_P;
  const double n3 = noise_numbers(g, 3e-3).N_SRS_P;
  const double n0 = noise_numbers(g, 0.0).N_SRS_P;
  msg = fmt("N_SRS_P linear in alpha: N(0) = %g, N(3a) - 3N(a) = %.2e", n0, n3 - 3 * n1);
  return n0 == 0.0 && std::abs(n3 - 3 * n1) <= 1e-14 * std::max(1.0, n3);
}

bool prop_noise_ratio(std::string& msg) {
  // matched coupling at the 930 pJ operating point; anti-Stokes vacuum input only
  const Preset& p = preset("exp-930pJ-70ns-bns");
  SimGrid ng = p.grid;
  ng.n_z = 80;
  auto n_as = [&](const DetuningConfig& cfg) {
    const GreensFunctionSet g = extract_greens(p.medium, cfg, p.seq, ng, p.opts, kWorkers,
                                               GreensInputs::a_dag_only);
    return noise_numbers(g, p.medium.alpha).N_SRS_AS;
  };
  const double nb = n_as(DetuningConfig::bns(p.medium));
  const double ns = n_as(DetuningConfig::std_raman(p.medium));
  msg = fmt("SFWM noise suppression: N_SRS_AS(STD)/N_SRS_AS(BNS) = %.1f >= 10 "
            "(STD %.4f, BNS %.6f)",
            ns / nb, ns, nb);
  return ns / nb >= 10.0;
}

bool run_prop(bool (*prop)(std::string&), std::string& msg) {
  try {
    return prop(msg);
  } catch (const std::exception& e) {
    msg = std::string("exception: ") + e.what();
    return false;
  }
}

void criterion_7() {
  std::string msgs;
  bool all = true;
  for (auto prop : {prop_linearity, prop_passivity, prop_oracle_equivalence, prop_eq1_identity,
                    prop_alpha_linearity, prop_noise_ratio}) {
    std::string m;
    const bool ok = run_prop(prop, m);
    all = all && ok;
    msgs += std::string("\n      ") + (ok ? "ok: " : "FAILED: ") + m;
  }
  report(7, all, "property suite:" + msgs);
}

void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();

  // Eq.-1 Monte Carlo: 100 trials, all three parameters inside their 95% CIs
  auto model = [](double N, double a, double ns, double nf) {
    const double D = N + ns + nf;
    return 1.0 + (a * N * N + 2 * ns * N + ns * ns + nf * nf) / (D * D);
  };
  const double a0 = 0.5, ns0 = 0.081, nf0 = 0.009;
  std::mt19937 rng(20240);
  std::normal_distribution<double> nd;
  // coverage is counted per parameter: each 95% interval must contain its
  // true value in at least 90 of 100 replications
  int okA = 0, okS = 0, okF = 0, ok_joint = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<StatPoint> pts;
    pts.push_back({0.0, 0.0, 0.0});
    for (int i = 0; i < 23; ++i) pts.push_back({0.01 * std::pow(8.0 / 0.01, i / 22.0), 0.0, 0.0});
    for (auto& p : pts) {
      const double y0 = model(p.N_out, a0, ns0, nf0);
      p.g2_err = 0.01 * y0;
      p.g2 = y0 + p.g2_err * nd(rng);
    }
    const FitResult r = fit_g2_model(pts);
    const bool inA = a0 >= r.ci95[0].first && a0 <= r.ci95[0].second;
    const bool inS = ns0 >= r.ci95[1].first && ns0 <= r.ci95[1].second;
    const bool inF = nf0 >= r.ci95[2].first && nf0 <= r.ci95[2].second;
    okA += inA;
    okS += inS;
    okF += inF;
    ok_joint += (inA && inS && inF) ? 1 : 0;
  }
  const int ok = std::min({okA, okS, okF});

  // exponential lifetime recovery at 2% noise
  std::mt19937 rng2(77);
  int tau_ok = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ArrayXd t = ArrayXd::LinSpaced(12, 50.0, 900.0), y(12);
    for (int i = 0; i < 12; ++i) y[i] = std::exp(-t[i] / 625.0) * (1.0 + 0.02 * nd(rng2));
    const FitResult r = fit_exponential(t, y);
    if (std::abs(r.param("tau_ns") - 625.0) / 625.0 <= 0.05) ++tau_ok;
  }

  // linear offset: exact on noiseless data
  ArrayXd x(6), y(6);
  for (int i = 0; i < 6; ++i) {
    x[i] = 0.002 + 0.003 * i;
    y[i] = 0.71 * x[i] + 4.4e-3;
  }
  const FitResult lin = fit_linear(x, y);
  const bool lin_ok = std::abs(lin.param("offset") - 4.4e-3) < 1e-12 &&
                      std::abs(lin.param("slope") - 0.71) < 1e-12;

  const double secs = wall_since(t0);
  report(8, ok >= 90 && tau_ok == 20 && lin_ok && secs < 120.0,
         fmt("fit recovery: Eq.-1 MC per-parameter coverage a %d / N_SRS %d / N_F %d of 100 "
             "within 95%% CI (all >= 90; jointly %d); tau within 5%% in %d/20 trials; linear "
             "offset exact; suite %.1f s < 120 s",
             okA, okS, okF, ok_joint, tau_ok, secs));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1_and_2_and_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("%s (%d/8 criteria, %.0f s total)\n", failures == 0 ? "ALL PASS" : "FAILURES",
              8 - failures, wall_since(t0));
  return failures == 0 ? 0 : 1;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ramem/greens.hpp"
#include "ramem/presets.hpp"

using namespace ramem;

namespace {

// coarse but resolved setup so kernel extraction stays cheap
struct Setup {
  MediumParams m = MediumParams::simulation_default();
  SimGrid grid{40, 480, 0.106, 1e-11, 300};
  SolverOptions opts;
  PulseSequence seq = build_sequence(40.0, 40.0, 0.070, 1.0);
};

GreensFunctionSet manual_identity(int n, double w) {
  GreensFunctionSet g;
  g.t = ArrayXd::LinSpaced(n, 0.0, (n - 1) * w);
  g.z = ArrayXd::LinSpaced(4, 0.0, 1.0);
  g.wt = w;
  g.wz = 1.0 / 3.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      g.G[i][j].setZero(i == 2 ? 4 : n, j == 2 ? 4 : n);
  g.G[0][0] = MatrixXcd::Identity(n, n);
  return g;
}

}  // namespace

TEST_CASE("identity kernel when couplings and signal losses vanish") {
  Setup s;
  s.m.alpha = 0.0;
  s.opts.signal_coupling = SignalCoupling::storage_line_only;
  PulseSequence seq = build_sequence(0.0, 0.0, 0.070, 1.0);
  const GreensFunctionSet g = extract_greens(s.m, DetuningConfig::bns(s.m), seq, s.grid, s.opts);
  const MatrixXcd expect = MatrixXcd::Identity(s.grid.n_t, s.grid.n_t) / g.wt;
  CHECK((g.G[0][0] - expect).cwiseAbs().maxCoeff() < 1e-10 / g.wt);
  CHECK(g.G[0][1].cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.G[0][2].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("FWM-off decouples the anti-Stokes block") {
  Setup s;
  s.opts.fwm_enabled = false;
  const GreensFunctionSet g =
      extract_greens(s.m, DetuningConfig::bns(s.m), s.seq, s.grid, s.opts, 4);
  CHECK(g.G[0][1].cwiseAbs().maxCoeff() == 0.0);  // G_{s a^dag} == 0
  const NoiseBudget nb = noise_numbers(g, s.m.alpha);
  CHECK(nb.N_SRS_AS == 0.0);

  SUBCASE("alpha = 0 kills the population term") {
    CHECK(noise_numbers(g, 0.0).N_SRS_P == 0.0);
  }
}

TEST_CASE("kernel application reproduces the direct solver") {
  Setup s;
  const auto cfg = DetuningConfig::bns(s.m);
  const GreensFunctionSet g = extract_greens(s.m, cfg, s.seq, s.grid, s.opts, 4);

  SUBCASE("preset Gaussian input") {
    const MemoryResult mr = memory_run(s.m, cfg, s.seq, s.grid, s.opts);
    const ArrayXcd mode = signal_envelope(s.seq, g.t);
    const ArrayXcd out = g.apply_ss(mode);
    double err = 0, scale = 0;
    for (Eigen::Index i = 0; i < g.t.size(); ++i) {
      err = std::max(err, std::abs(std::norm(out[i]) - mr.abs2_S_out[i]));
      scale = std::max(scale, mr.abs2_S_out[i]);
    }
    CHECK(err < 1e-8 * scale);
    CHECK(efficiency_from_greens(g, mode) == doctest::Approx(mr.eta_total).epsilon(1e-8));
  }

  SUBCASE("random envelopes (oracle equivalence)") {
    std::mt19937 rng(23);
    std::normal_distribution<double> nd;
    const ArrayXd t = g.t;
    ArrayXcd omega(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
      omega[i] = envelope(s.seq.read_in, t[i]) + envelope(s.seq.read_out, t[i]);
    for (int k = 0; k < 3; ++k) {
      ArrayXcd sin_(t.size());
      for (Eigen::Index i = 0; i < t.size(); ++i)
        sin_[i] = Complex(nd(rng), nd(rng)) * gaussian_envelope(t[i], 0.018, 0.014);
      const auto st = evolve_raw(s.m, cfg, omega, s.grid, s.opts, sin_,
                                 ArrayXcd::Zero(t.size()), ArrayXcd::Zero(s.grid.n_z));
      const ArrayXcd direct = st.S.row(s.grid.n_z - 1).transpose();
      const ArrayXcd via_g = g.apply_ss(sin_);
      CHECK((direct - via_g).abs().maxCoeff() < 1e-8 * direct.abs().maxCoeff());
    }
  }
}

TEST_CASE("window additivity of noise sums") {
  Setup s;
  const GreensFunctionSet g =
      extract_greens(s.m, DetuningConfig::bns(s.m), s.seq, s.grid, s.opts, 4);
  const double a = 0.0, b = 0.05, c = 0.106 + 1e-9;
  const NoiseBudget n_ab = noise_numbers_window(g, s.m.alpha, a, b);
  const NoiseBudget n_bc = noise_numbers_window(g, s.m.alpha, b, c);
  const NoiseBudget n_ac = noise_numbers_window(g, s.m.alpha, a, c);
  CHECK(n_ab.N_SRS_AS + n_bc.N_SRS_AS == doctest::Approx(n_ac.N_SRS_AS).epsilon(1e-14));
  CHECK(n_ab.N_SRS_P + n_bc.N_SRS_P == doctest::Approx(n_ac.N_SRS_P).epsilon(1e-14));
}

TEST_CASE("N_SRS_P is linear in alpha with zero intercept") {
  Setup s;
  const GreensFunctionSet g =
      extract_greens(s.m, DetuningConfig::bns(s.m), s.seq, s.grid, s.opts, 4);
  const double n1 = noise_numbers(g, 1e-3).N_SRS_P;
  const double n2 = noise_numbers(g, 2e-3).N_SRS_P;
  const double n0 = noise_numbers(g, 0.0).N_SRS_P;
  CHECK(n0 == 0.0);
  CHECK(n2 == doctest::Approx(2 * n1).epsilon(1e-14));
}

TEST_CASE("quartic integrals") {
  SUBCASE("identity kernel on n bins: curly-G = sum w^2") {
    const int n = 7;
    const double w = 0.3;
    const GreensFunctionSet g = manual_identity(n, w);
    const QuarticIntegrals q = quartic_integrals(g);
    CHECK(q.value[0][0] == doctest::Approx(n * w * w).epsilon(1e-14));
  }
  SUBCASE("scaling by lambda scales curly-G by lambda^4") {
    GreensFunctionSet g = manual_identity(5, 0.2);
    const double q1 = quartic_integrals(g).value[0][0];
    g.G[0][0] *= 3.0;
    CHECK(quartic_integrals(g).value[0][0] == doctest::Approx(81.0 * q1).epsilon(1e-14));
    // second-power variant scales by lambda^2
    GreensFunctionSet h = manual_identity(5, 0.2);
    const double p1 = quartic_integrals(h, QuarticVariant::second_power).value[0][0];
    h.G[0][0] *= 3.0;
    CHECK(quartic_integrals(h, QuarticVariant::second_power).value[0][0] ==
          doctest::Approx(9.0 * p1).epsilon(1e-14));
  }
  SUBCASE("a = curlyG_ss/eta^2 - 1 is finite and > -1 on a driven run") {
    Setup s;
    const auto cfg = DetuningConfig::std_raman(s.m);
    const GreensFunctionSet g = extract_greens(s.m, cfg, s.seq, s.grid, s.opts, 4);
    const double eta = efficiency_from_greens(g, signal_envelope(s.seq, g.t));
    const double a = quartic_integrals(g).value[0][0] / (eta * eta) - 1.0;
    CHECK(std::isfinite(a));
    CHECK(a > -1.0);
  }
}

TEST_CASE("zero-norm input rejected") {
  const GreensFunctionSet g = manual_identity(5, 0.2);
  CHECK_THROWS_AS(efficiency_from_greens(g, ArrayXcd::Zero(5)), std::invalid_argument);
}

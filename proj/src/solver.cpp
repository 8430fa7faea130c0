#include "ramem/solver.hpp"

#include <array>
#include <cmath>

namespace ramem {
namespace {

// M_k = int_0^h e^{-kap(h-u)} u^k du for k = 0..3, complex kap.
std::array<Complex, 4> exp_moments(Complex kap, double h) {
  const Complex kh = kap * h;
  std::array<Complex, 4> M;
  if (std::abs(kh) < 1e-4) {
    // series in kh to avoid cancellation
    M[0] = h * (1.0 - kh / 2.0 + kh * kh / 6.0 - kh * kh * kh / 24.0);
    M[1] = h * h * (0.5 - kh / 3.0 + kh * kh / 8.0 - kh * kh * kh / 30.0);
    M[2] = h * h * h * (1.0 / 3.0 - kh / 4.0 + kh * kh / 10.0 - kh * kh * kh / 36.0);
    M[3] = h * h * h * h * (0.25 - kh / 5.0 + kh * kh / 12.0 - kh * kh * kh / 42.0);
    return M;
  }
  const Complex E = std::exp(-kh);
  M[0] = (1.0 - E) / kap;
  for (int k = 1; k < 4; ++k) M[k] = (std::pow(h, k) - double(k) * M[k - 1]) / kap;
  return M;
}

// Quadrature weights w_j such that int_0^h e^{-kap(h-u)} f(u) du ~ sum w_j f(o_j)
// with f interpolated by the Lagrange polynomial on the given offsets.
template <int N>
std::array<Complex, N> lagrange_exp_weights(Complex kap, double h, const std::array<double, N>& o) {
  const auto M = exp_moments(kap, h);
  std::array<Complex, N> w;
  for (int j = 0; j < N; ++j) {
    // expand prod_{i != j} (u - o_i) into monomial coefficients
    std::array<double, N> coef{};  // coef[k] multiplies u^k
    coef[0] = 1.0;
    int deg = 0;
    double den = 1.0;
    for (int i = 0; i < N; ++i) {
      if (i == j) continue;
      den *= (o[j] - o[i]);
      for (int k = deg; k >= 0; --k) {
        coef[k + 1] += coef[k];
        coef[k] *= -o[i];
      }
      ++deg;
    }
    Complex acc = 0.0;
    for (int k = 0; k <= deg; ++k) acc += coef[k] * M[k];
    w[j] = acc / den;
  }
  return w;
}

struct Coefs {
  Complex Gs, Ga, Gv;       // complex detunings: signal, anti-Stokes, FWM vertex
  Complex ks, kac;          // scaled linear response per unit zeta (kac = conj(kappa_a))
  Complex cS;               // i g / Gs
  Complex cA;               // -i g / conj(Gv)
  Complex Ws, Wa;           // population-weighted Raman denominators
  Complex lam_e;            // |Omega|^2 multiplier of the B self-energy
  double g = 0.0;           // sqrt(d gamma / 2)
  double phi_c = 0.0;       // control dispersion phase rate per unit zeta
  bool fwm = true;
};

Coefs make_coefs(const MediumParams& m, const DetuningConfig& cfg, const SolverOptions& opts) {
  Coefs c;
  c.fwm = opts.fwm_enabled;
  c.Gs = complex_detuning(m, cfg.Delta_s);
  c.Ga = complex_detuning(m, cfg.Delta_a);
  c.Gv = complex_detuning(m, cfg.Delta_c(m));
  const double scale = m.L / m.c;  // rad/us -> per unit zeta
  c.ks = kappa_of(m, cfg.Delta_s, opts.signal_coupling) * scale;
  c.kac = std::conj(kappa_of(m, cfg.Delta_a) * scale);
  c.g = std::sqrt(0.5 * m.broadened_depth() * m.gamma());
  c.cS = Complex(0, 1) * c.g / c.Gs;
  c.cA = Complex(0, -1) * c.g / std::conj(c.Gv);
  const double al = m.alpha;
  c.Ws = (1.0 - al) / c.Gs + al / std::conj(c.Gs);
  c.Wa = (1.0 - al) / c.Gv + al / std::conj(c.Gv);
  // anti-Stokes channel self-energy, tied to the coupling and absorption so
  // that local emission is exactly balanced by the re-absorbed field
  const Complex Da = c.g * c.g * c.Wa / (std::conj(c.Gv) * c.kac);
  c.lam_e = 1.0 / c.Gs + (c.fwm ? Da : Complex(0.0));
  c.phi_c = opts.control_dispersion_phase ? -(kappa_of(m, cfg.Delta_c(m)) * scale).imag() : 0.0;
  return c;
}

}  // namespace

double window_photons(const ArrayXd& t, const ArrayXd& abs2, double t_lo, double t_hi) {
  const double dt = t.size() > 1 ? t[1] - t[0] : 1.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (t[i] >= t_lo && t[i] < t_hi) acc += abs2[i] * dt;
  return acc;
}

FieldState evolve_raw(const MediumParams& m, const DetuningConfig& cfg, const ArrayXcd& omega_t,
                      const SimGrid& grid, const SolverOptions& opts, const ArrayXcd& s_in,
                      const ArrayXcd& ad_in, const ArrayXcd& b_init) {
  m.validate();
  grid.validate();
  opts.validate();
  const int nz = grid.n_z, nt = grid.n_t;
  if (omega_t.size() != nt || s_in.size() != nt || ad_in.size() != nt || b_init.size() != nz)
    throw std::invalid_argument("evolve_raw: array sizes do not match the grid");
  const double dt = grid.dt(), h = grid.dz();
  const double om_max = omega_t.abs().maxCoeff();
  if (om_max * dt > 0.1)
    throw std::invalid_argument("evolve_raw: unresolved grid (dt * max|Omega| > 0.1)");

  const Coefs co = make_coefs(m, cfg, opts);
  const ArrayXd om2 = omega_t.abs2();

  // B-equation diagonal and its exact integrating factor
  ArrayXcd lam(nt);
  for (int i = 0; i < nt; ++i)
    lam[i] = om2[i] * co.lam_e + 0.5 * opts.spinwave_decay_rate;
  ArrayXcd P(nt);
  P[0] = 0.0;
  for (int i = 1; i < nt; ++i) P[i] = P[i - 1] + 0.5 * (lam[i] + lam[i - 1]) * dt;

  // per-step factors e^{-(P[n+1]-P[idx_j])} for the four stencil nodes
  ArrayXcd Eb(nt - 1), e0(nt - 1), e1(nt - 1), e2(nt - 1), e3(nt - 1);
  const std::array<double, 4> toff_i{-dt, 0.0, dt, 2 * dt};
  const std::array<double, 4> toff_l{0.0, dt, 2 * dt, 3 * dt};
  const std::array<double, 4> toff_r{-2 * dt, -dt, 0.0, dt};
  auto poly_w = [&](const std::array<double, 4>& o) { return lagrange_exp_weights<4>(0.0, dt, o); };
  const auto wt_i = poly_w(toff_i), wt_l = poly_w(toff_l), wt_r = poly_w(toff_r);
  auto idx4 = [&](int n, std::array<int, 4>& idx, const std::array<Complex, 4>** w) {
    if (n == 0) { idx = {0, 1, 2, 3}; *w = &wt_l; }
    else if (n == nt - 2) { idx = {nt - 4, nt - 3, nt - 2, nt - 1}; *w = &wt_r; }
    else { idx = {n - 1, n, n + 1, n + 2}; *w = &wt_i; }
  };
  for (int n = 0; n < nt - 1; ++n) {
    std::array<int, 4> idx; const std::array<Complex, 4>* w;
    idx4(n, idx, &w);
    Eb[n] = std::exp(-(P[n + 1] - P[n]));
    e0[n] = std::exp(-(P[n + 1] - P[idx[0]]));
    e1[n] = std::exp(-(P[n + 1] - P[idx[1]]));
    e2[n] = std::exp(-(P[n + 1] - P[idx[2]]));
    e3[n] = std::exp(-(P[n + 1] - P[idx[3]]));
  }

  // z-step quadrature weights for the field equations
  const std::array<double, 4> zoff_b{-2 * h, -h, 0.0, h};
  const std::array<double, 3> zoff_3{-h, 0.0, h};
  const std::array<double, 2> zoff_2{0.0, h};
  const auto wS4 = lagrange_exp_weights<4>(co.ks, h, zoff_b);
  const auto wS3 = lagrange_exp_weights<3>(co.ks, h, zoff_3);
  const auto wS2 = lagrange_exp_weights<2>(co.ks, h, zoff_2);
  const auto wA4 = lagrange_exp_weights<4>(co.kac, h, zoff_b);
  const auto wA3 = lagrange_exp_weights<3>(co.kac, h, zoff_3);
  const auto wA2 = lagrange_exp_weights<2>(co.kac, h, zoff_2);
  const Complex Es = std::exp(-co.ks * h), Ea = std::exp(-co.kac * h);

  // control with medium dispersion phase, per z node
  ArrayXcd cph(nz);
  for (int iz = 0; iz < nz; ++iz) cph[iz] = std::polar(1.0, co.phi_c * iz * h);

  FieldState st;
  st.S.setZero(nz, nt);
  st.A_dag.setZero(nz, nt);
  st.B.setZero(nz, nt);
  st.t = grid.times();
  st.z = grid.zs();

  ArrayXcd G(nt), Bcol(nt);
  // integrate the spin wave over retarded time at one z node
  auto b_march = [&](int iz, const ArrayXcd& Srow, const ArrayXcd& Arow, Complex b0, ArrayXcd& out) {
    const Complex phz = cph[iz];
    for (int i = 0; i < nt; ++i) {
      const Complex om = omega_t[i] * phz;
      Complex gi = -Complex(0, 1) * co.g * std::conj(om) * co.Ws * Srow[i];
      if (co.fwm) gi += Complex(0, 1) * co.g * om * co.Wa * Arow[i];
      G[i] = gi;
    }
    out[0] = b0;
    for (int n = 0; n < nt - 1; ++n) {
      std::array<int, 4> idx; const std::array<Complex, 4>* w;
      idx4(n, idx, &w);
      const Complex acc = (*w)[0] * e0[n] * G[idx[0]] + (*w)[1] * e1[n] * G[idx[1]] +
                          (*w)[2] * e2[n] * G[idx[2]] + (*w)[3] * e3[n] * G[idx[3]];
      out[n + 1] = Eb[n] * out[n] + acc;
    }
  };

  auto fs_at = [&](const ArrayZT& B, const ArrayZT& Bprev, int row, int cur_max, int i) -> Complex {
    const Complex b = row <= cur_max ? B(row, i) : Bprev(row, i);
    return co.cS * (omega_t[i] * cph[row]) * b;
  };
  auto fa_at = [&](const ArrayZT& B, const ArrayZT& Bprev, int row, int cur_max, int i) -> Complex {
    if (!co.fwm) return Complex(0.0);
    const Complex b = row <= cur_max ? B(row, i) : Bprev(row, i);
    return co.cA * std::conj(omega_t[i] * cph[row]) * b;
  };

  ArrayZT Bprev = st.B;
  double residual = 1.0;
  int iter = 0;
  for (iter = 1; iter <= grid.max_iter; ++iter) {
    ArrayZT Sp = st.S, Ap = st.A_dag;
    Bprev = st.B;
    st.S.row(0) = s_in.transpose();
    st.A_dag.row(0) = ad_in.transpose();
    b_march(0, st.S.row(0).transpose(), st.A_dag.row(0).transpose(), b_init[0], Bcol);
    st.B.row(0) = Bcol.transpose();
    for (int mz = 0; mz + 1 < nz; ++mz) {
      // advance the fields to node mz+1; B at node mz+1 comes from the previous sweep
      for (int i = 0; i < nt; ++i) {
        Complex accS, accA;
        if (mz >= 2) {
          const int j0 = mz - 2;
          accS = wS4[0] * fs_at(st.B, Bprev, j0, mz, i) + wS4[1] * fs_at(st.B, Bprev, j0 + 1, mz, i) +
                 wS4[2] * fs_at(st.B, Bprev, j0 + 2, mz, i) + wS4[3] * fs_at(st.B, Bprev, j0 + 3, mz, i);
          accA = wA4[0] * fa_at(st.B, Bprev, j0, mz, i) + wA4[1] * fa_at(st.B, Bprev, j0 + 1, mz, i) +
                 wA4[2] * fa_at(st.B, Bprev, j0 + 2, mz, i) + wA4[3] * fa_at(st.B, Bprev, j0 + 3, mz, i);
        } else if (mz == 1) {
          accS = wS3[0] * fs_at(st.B, Bprev, 0, mz, i) + wS3[1] * fs_at(st.B, Bprev, 1, mz, i) +
                 wS3[2] * fs_at(st.B, Bprev, 2, mz, i);
          accA = wA3[0] * fa_at(st.B, Bprev, 0, mz, i) + wA3[1] * fa_at(st.B, Bprev, 1, mz, i) +
                 wA3[2] * fa_at(st.B, Bprev, 2, mz, i);
        } else {
          accS = wS2[0] * fs_at(st.B, Bprev, 0, mz, i) + wS2[1] * fs_at(st.B, Bprev, 1, mz, i);
          accA = wA2[0] * fa_at(st.B, Bprev, 0, mz, i) + wA2[1] * fa_at(st.B, Bprev, 1, mz, i);
        }
        st.S(mz + 1, i) = Es * st.S(mz, i) + accS;
        st.A_dag(mz + 1, i) = Ea * st.A_dag(mz, i) + accA;
      }
      b_march(mz + 1, st.S.row(mz + 1).transpose(), st.A_dag.row(mz + 1).transpose(),
              b_init[mz + 1], Bcol);
      st.B.row(mz + 1) = Bcol.transpose();
    }
    const double num = std::max({(st.S - Sp).abs().maxCoeff(), (st.A_dag - Ap).abs().maxCoeff(),
                                 (st.B - Bprev).abs().maxCoeff()});
    const double den = std::max({st.S.abs().maxCoeff(), st.A_dag.abs().maxCoeff(),
                                 st.B.abs().maxCoeff(), 1e-300});
    residual = num / den;
    if (!std::isfinite(residual))
      throw SolverError("evolve: iteration diverged (non-finite residual)", residual, iter);
    if (residual < grid.tol) break;
  }
  if (residual >= grid.tol)
    throw SolverError("evolve: no convergence after max_iter sweeps", residual, grid.max_iter);
  st.iterations = iter;
  st.residual = residual;
  return st;
}

namespace {
ArrayXcd control_on_grid(const PulseSequence& seq, const ArrayXd& t) {
  ArrayXcd om(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i)
    om[i] = envelope(seq.read_in, t[i]) + envelope(seq.read_out, t[i]);
  return om;
}
}  // namespace

FieldState evolve(const MediumParams& m, const DetuningConfig& cfg, const PulseSequence& seq,
                  const SimGrid& grid, const SolverOptions& opts) {
  grid.validate();
  const ArrayXd t = grid.times();
  const double dt = grid.dt();
  if (dt > seq.read_in.fwhm / 20.0)
    throw std::invalid_argument("evolve: unresolved grid (dt > fwhm/20)");
  if (seq.read_out.center + seq.integration_window / 2 > grid.t_span + 1e-12)
    throw std::invalid_argument("evolve: t_span does not cover the retrieval window");
  return evolve_raw(m, cfg, control_on_grid(seq, t), grid, opts, signal_envelope(seq, t),
                    ArrayXcd::Zero(grid.n_t), ArrayXcd::Zero(grid.n_z));
}

MemoryResult memory_run(const MediumParams& m, const DetuningConfig& cfg, const PulseSequence& seq,
                        const SimGrid& grid, const SolverOptions& opts) {
  const FieldState st = evolve(m, cfg, seq, grid, opts);
  MemoryResult r;
  r.t = st.t;
  const int nz = grid.n_z;
  r.abs2_S_out = st.S.row(nz - 1).abs2().transpose();
  r.abs2_A_out = st.A_dag.row(nz - 1).abs2().transpose();
  const double w = seq.integration_window / 2;
  const double n_ret = window_photons(r.t, r.abs2_S_out, seq.read_out.center - w, seq.read_out.center + w);
  const double n_leak = window_photons(r.t, r.abs2_S_out, seq.read_in.center - w, seq.read_in.center + w);
  r.n_retrieved = n_ret;
  if (seq.n_in > 0) {
    r.eta_total = n_ret / seq.n_in;
    r.leakage = n_leak / seq.n_in;
    r.eta_readin = 1.0 - r.leakage;
    r.eta_defined = true;
  } else {
    r.eta_total = r.leakage = r.eta_readin = std::nan("");
    r.eta_defined = false;
  }
  r.iterations = st.iterations;
  r.residual = st.residual;
  return r;
}

}  // namespace ramem

#include "ramem/greens.hpp"

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

namespace ramem {

ArrayXcd GreensFunctionSet::apply_ss(const ArrayXcd& s_in) const {
  return (G[s][s] * s_in.matrix() * wt).array();
}

GreensFunctionSet extract_greens(const MediumParams& m, const DetuningConfig& cfg,
                                 const PulseSequence& seq, const SimGrid& grid,
                                 const SolverOptions& opts, int workers, GreensInputs inputs) {
  grid.validate();
  const int nt = grid.n_t, nz = grid.n_z;
  GreensFunctionSet gs;
  gs.t = grid.times();
  gs.z = grid.zs();
  gs.wt = grid.dt();
  gs.wz = grid.dz();
  const double w = seq.integration_window / 2;
  gs.t_retrieval_lo = seq.read_out.center - w;
  gs.t_retrieval_hi = seq.read_out.center + w;
  gs.t_input_lo = seq.read_in.center - w;
  gs.t_input_hi = seq.read_in.center + w;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      gs.G[i][j].setZero(gs.dim(GreensFunctionSet::Mode(i)), gs.dim(GreensFunctionSet::Mode(j)));

  ArrayXcd omega(nt);
  for (int i = 0; i < nt; ++i)
    omega[i] = envelope(seq.read_in, gs.t[i]) + envelope(seq.read_out, gs.t[i]);

  struct Job {
    GreensFunctionSet::Mode in;
    Eigen::Index col;
  };
  std::vector<Job> jobs;
  if (inputs == GreensInputs::all)
    for (Eigen::Index j = 0; j < nt; ++j) jobs.push_back({GreensFunctionSet::s, j});
  for (Eigen::Index j = 0; j < nt; ++j) jobs.push_back({GreensFunctionSet::a_dag, j});
  if (inputs == GreensInputs::all)
    for (Eigen::Index j = 0; j < nz; ++j) jobs.push_back({GreensFunctionSet::b, j});

  const LinearResponse lr = linear_loss(m, cfg, opts.signal_coupling);
  const Complex ks_hat = lr.kappa_s * m.L / m.c;
  const Complex kac_hat = std::conj(lr.kappa_a) * m.L / m.c;

  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto run_one = [&](const Job& jb) {
    ArrayXcd s_in = ArrayXcd::Zero(nt), ad_in = ArrayXcd::Zero(nt), b_init = ArrayXcd::Zero(nz);
    const bool field_in = jb.in != GreensFunctionSet::b;
    if (field_in) {
      // bare propagator column when the control is identically zero at this bin
      if (omega[jb.col] == Complex(0.0)) {
        if (jb.in == GreensFunctionSet::s)
          gs.G[GreensFunctionSet::s][jb.in](jb.col, jb.col) = std::exp(-ks_hat) / gs.wt;
        else
          gs.G[GreensFunctionSet::a_dag][jb.in](jb.col, jb.col) = std::exp(-kac_hat) / gs.wt;
        return;
      }
      (jb.in == GreensFunctionSet::s ? s_in : ad_in)[jb.col] = 1.0 / gs.wt;
    } else {
      b_init[jb.col] = 1.0 / gs.wz;
    }
    const FieldState st = evolve_raw(m, cfg, omega, grid, opts, s_in, ad_in, b_init);
    gs.G[GreensFunctionSet::s][jb.in].col(jb.col) = st.S.row(nz - 1).matrix().transpose();
    gs.G[GreensFunctionSet::a_dag][jb.in].col(jb.col) = st.A_dag.row(nz - 1).matrix().transpose();
    gs.G[GreensFunctionSet::b][jb.in].col(jb.col) = st.B.col(nt - 1).matrix();
  };

  workers = std::max(1, workers);
  if (workers == 1) {
    for (const auto& jb : jobs) run_one(jb);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k)
      pool.emplace_back([&] {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          try {
            run_one(jobs[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return gs;
}

namespace {
double window_row_sum_sq(const GreensFunctionSet& g, const MatrixXcd& block, double w_in,
                         double t_lo, double t_hi, int power) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.t.size(); ++i) {
    if (g.t[i] < t_lo || g.t[i] >= t_hi) continue;
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      const double a2 = std::norm(block(i, j));
      acc += (power == 2 ? a2 : a2 * a2) * g.wt * w_in;
    }
  }
  return acc;
}
}  // namespace

NoiseBudget noise_numbers_window(const GreensFunctionSet& g, double alpha, double t_lo, double t_hi) {
  NoiseBudget nb;
  nb.N_SRS_AS = window_row_sum_sq(g, g.G[GreensFunctionSet::s][GreensFunctionSet::a_dag], g.wt,
                                  t_lo, t_hi, 2);
  nb.N_SRS_P = alpha * window_row_sum_sq(g, g.G[GreensFunctionSet::s][GreensFunctionSet::b], g.wz,
                                         t_lo, t_hi, 2);
  return nb;
}

NoiseBudget noise_numbers(const GreensFunctionSet& g, double alpha) {
  return noise_numbers_window(g, alpha, g.t_retrieval_lo, g.t_retrieval_hi);
}

double efficiency_from_greens(const GreensFunctionSet& g, const ArrayXcd& input_mode) {
  const double n_in = input_mode.abs2().sum() * g.wt;
  if (!(n_in > 0)) throw std::invalid_argument("efficiency_from_greens: zero-norm input mode");
  const ArrayXcd out = g.apply_ss(input_mode);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.t.size(); ++i)
    if (g.t[i] >= g.t_retrieval_lo && g.t[i] < g.t_retrieval_hi) acc += std::norm(out[i]) * g.wt;
  return acc / n_in;
}

QuarticIntegrals quartic_integrals(const GreensFunctionSet& g, QuarticVariant variant) {
  QuarticIntegrals q;
  const int p = variant == QuarticVariant::fourth_power ? 4 : 2;
  for (int i = 0; i < 3; ++i) {
    const double wi = g.weight(GreensFunctionSet::Mode(i));
    for (int j = 0; j < 3; ++j) {
      const double wj = g.weight(GreensFunctionSet::Mode(j));
      double acc = 0.0;
      const MatrixXcd& blk = g.G[i][j];
      for (Eigen::Index r = 0; r < blk.rows(); ++r)
        for (Eigen::Index c = 0; c < blk.cols(); ++c) {
          const double a2 = std::norm(blk(r, c));
          acc += (p == 2 ? a2 : a2 * a2) * wi * wj;
        }
      q.value[i][j] = acc;
    }
  }
  return q;
}

}  // namespace ramem

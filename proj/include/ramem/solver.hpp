#pragma once

#include <stdexcept>

#include "ramem/medium.hpp"
#include "ramem/pulses.hpp"

namespace ramem {

// fields stored with a contiguous time series per spatial node
using ArrayZT = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SimGrid {
  int n_z = 200;        // spatial points (z = 0..L inclusive)
  int n_t = 2000;       // temporal points
  double t_span = 0.106;  // us
  double tol = 1e-8;    // relative self-consistency tolerance
  int max_iter = 200;

  void validate() const {
    if (n_z < 2 || n_t < 2) throw std::invalid_argument("SimGrid: n_z and n_t must be >= 2");
    if (!(tol > 0)) throw std::invalid_argument("SimGrid: tol must be > 0");
    if (!(t_span > 0)) throw std::invalid_argument("SimGrid: t_span must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SimGrid: max_iter must be >= 1");
  }
  double dt() const { return t_span / (n_t - 1); }
  double dz() const { return 1.0 / (n_z - 1); }  // z normalized to [0,1]*L
  ArrayXd times() const { return ArrayXd::LinSpaced(n_t, 0.0, t_span); }
  ArrayXd zs() const { return ArrayXd::LinSpaced(n_z, 0.0, 1.0); }
};

enum class LangevinTreatment { vacuum_dropped };

struct SolverOptions {
  bool fwm_enabled = true;
  // efficiency (intensity) decay rate of the stored spin wave, 1/us;
  // the amplitude decays at half this rate
  double spinwave_decay_rate = 0.0;
  LangevinTreatment langevin = LangevinTreatment::vacuum_dropped;
  bool control_dispersion_phase = true;
  SignalCoupling signal_coupling = SignalCoupling::both_lines;

  void validate() const {
    if (spinwave_decay_rate < 0)
      throw std::invalid_argument("SolverOptions: spinwave_decay_rate must be >= 0");
  }
};

/// Complex amplitudes on the z-t grid. S, A_dag are flux-normalized
/// (sum |S|^2 dt counts photons); B is the collective spin-wave amplitude
/// (sum |B|^2 dz counts excitations).
struct FieldState {
  ArrayZT S;      // (n_z x n_t)
  ArrayZT A_dag;  // (n_z x n_t)
  ArrayZT B;      // (n_z x n_t)
  ArrayXd t;
  ArrayXd z;
  int iterations = 0;
  double residual = 0.0;
};

struct SolverError : std::runtime_error {
  double residual;
  int iterations;
  SolverError(const std::string& msg, double res, int iters)
      : std::runtime_error(msg), residual(res), iterations(iters) {}
};

struct MemoryResult {
  double eta_total = 0.0;   // retrieval-window photons / N_in
  double eta_readin = 0.0;  // 1 - leakage
  double leakage = 0.0;     // transmitted input-window photons / N_in
  bool eta_defined = true;  // false when N_in = 0
  double n_retrieved = 0.0; // absolute photons in the retrieval window
  ArrayXd t;
  ArrayXd abs2_S_out;
  ArrayXd abs2_A_out;
  int iterations = 0;
  double residual = 0.0;
};

/// Integrate the coupled signal/anti-Stokes/spin-wave equations in the
/// retarded frame with explicit boundary/initial data. `omega_t` is the
/// prescribed control Rabi frequency on the time grid, `s_in`/`ad_in` the
/// field inputs at z=0, `b_init` the initial spin wave over z.
FieldState evolve_raw(const MediumParams& m, const DetuningConfig& cfg, const ArrayXcd& omega_t,
                      const SimGrid& grid, const SolverOptions& opts, const ArrayXcd& s_in,
                      const ArrayXcd& ad_in, const ArrayXcd& b_init);

/// Sequence-level entry point: control from the pulse sequence, signal
/// co-centered with the read-in pulse, vacuum anti-Stokes, empty spin wave.
FieldState evolve(const MediumParams& m, const DetuningConfig& cfg, const PulseSequence& seq,
                  const SimGrid& grid, const SolverOptions& opts);

MemoryResult memory_run(const MediumParams& m, const DetuningConfig& cfg, const PulseSequence& seq,
                        const SimGrid& grid, const SolverOptions& opts);

/// Photons in [t_lo, t_hi) of a |field|^2 time trace, rectangle rule.
double window_photons(const ArrayXd& t, const ArrayXd& abs2, double t_lo, double t_hi);

}  // namespace ramem

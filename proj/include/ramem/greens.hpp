#pragma once

#include <functional>

#include "ramem/solver.hpp"

namespace ramem {

/// Discretized Green's-function blocks of the linear input-output map
///   (S_out(t), A^dag_out(t), B_out(z)) = G * (S_in(t'), A^dag_in(t'), B_in(z')).
/// Field modes live on the time grid (quadrature weight dt), the spin wave on
/// the z grid (weight dz). Kernel convention: out(x) = integral G(x, x') in(x') dx'.
struct GreensFunctionSet {
  enum Mode { s = 0, a_dag = 1, b = 2 };
  MatrixXcd G[3][3];
  ArrayXd t;
  ArrayXd z;
  double wt = 0.0;  // time-bin quadrature weight
  double wz = 0.0;  // z-bin quadrature weight
  double t_retrieval_lo = 0.0, t_retrieval_hi = 0.0;
  double t_input_lo = 0.0, t_input_hi = 0.0;

  Eigen::Index dim(Mode m) const { return m == b ? z.size() : t.size(); }
  double weight(Mode m) const { return m == b ? wz : wt; }

  /// Apply the s-row to an input signal envelope: S_out(t) = sum_j G_ss(t,t') s(t') wt.
  ArrayXcd apply_ss(const ArrayXcd& s_in) const;
};

/// Photon-number decomposition of the retrieved field, N_out = N_mem + N_SRS_AS + N_SRS_P.
struct NoiseBudget {
  double N_mem = 0.0;
  double N_SRS_AS = 0.0;  // spontaneous four-wave mixing (vacuum anti-Stokes input)
  double N_SRS_P = 0.0;   // unpumped-population term (thermal spin-wave input)
  double N_SRS() const { return N_SRS_AS + N_SRS_P; }
  double eta = 0.0;
  /// noise-to-efficiency ratio, requires the fluorescence number N_F
  double mu1(double N_F) const { return (N_SRS_AS + N_SRS_P + N_F) / eta; }
};

/// Which input modes to extract columns for; `all` gives the full 3x3 set.
enum class GreensInputs { all, a_dag_only };

/// Build the kernels by evolving unit basis inputs (one delta per input
/// bin of each mode) through the solver; columns run concurrently on up to
/// `workers` threads.
GreensFunctionSet extract_greens(const MediumParams& m, const DetuningConfig& cfg,
                                 const PulseSequence& seq, const SimGrid& grid,
                                 const SolverOptions& opts, int workers = 1,
                                 GreensInputs inputs = GreensInputs::all);

/// Vacuum/thermal-seeded noise photons in [t_lo, t_hi) at the output.
/// N_SRS_AS = sum wt wt |G_sa|^2, N_SRS_P = alpha * sum wt wz |G_sb|^2.
NoiseBudget noise_numbers(const GreensFunctionSet& g, double alpha);
NoiseBudget noise_numbers_window(const GreensFunctionSet& g, double alpha, double t_lo, double t_hi);

/// eta = (retrieval-window photons of G_ss applied to the input mode) / N_in.
double efficiency_from_greens(const GreensFunctionSet& g, const ArrayXcd& input_mode);

enum class QuarticVariant { fourth_power, second_power };

/// The integrals curly-G_ij = sum w w |G_ij|^p with p = 4 (default) or 2.
struct QuarticIntegrals {
  double value[3][3] = {};
};
QuarticIntegrals quartic_integrals(const GreensFunctionSet& g,
                                   QuarticVariant variant = QuarticVariant::fourth_power);

}  // namespace ramem

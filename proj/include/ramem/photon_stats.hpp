#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ramem/types.hpp"

namespace ramem {

/// Parameters of the closed-form g2 model for the retrieved field.
/// a = g2_in * curlyG_ss / eta^2 - 1; for Fock-state input predictions a = -1.
struct G2Model {
  double a = 0.0;
  double N_SRS = 0.0;  // spontaneous Raman scattering photons per pulse
  double N_F = 0.0;    // broadband fluorescence photons per pulse
  double g2_F = 2.0;   // fluorescence autocorrelation (single-mode thermal)
  double g2_in = 1.0;  // input autocorrelation (coherent = 1)
  double N_L = 0.0;    // control leakage, zero by assumption

  void validate() const {
    if (N_SRS < 0 || N_F < 0) throw std::invalid_argument("G2Model: N_SRS and N_F must be >= 0");
    if (N_L != 0.0) throw std::invalid_argument("G2Model: N_L is fixed to zero");
  }
  static G2Model fock(double N_SRS, double N_F) { return G2Model{-1.0, N_SRS, N_F, 2.0, 0.0, 0.0}; }
};

/// Measured point of a g2-vs-photon-number curve.
struct StatPoint {
  double N_out = 0.0;
  double g2 = 0.0;
  double g2_err = 0.0;
};

/// g2 of the total retrieved field at output photon number N_out:
///   1 + (a N^2 + 2 N_SRS N + N_SRS^2 + N_F^2 (g2_F - 1)) / (N + N_SRS + N_F)^2.
inline double g2_out(const G2Model& m, double N_out) {
  m.validate();
  if (N_out < 0) throw std::invalid_argument("g2_out: N_out must be >= 0");
  const double den = N_out + m.N_SRS + m.N_F;
  if (den <= 0.0) throw std::invalid_argument("g2_out: total photon number is zero");
  const double num = m.a * N_out * N_out + 2.0 * m.N_SRS * N_out + m.N_SRS * m.N_SRS +
                     m.N_F * m.N_F * (m.g2_F - 1.0);
  return 1.0 + num / (den * den);
}

/// Output photon number where g2_out crosses 1 for a Fock input (a = -1,
/// g2_F = 2): root of N^2 - 2 N_SRS N - (2 N_SRS^2 + N_F^2)... closed form.
inline double nonclassical_crossing_photon_number(double N_SRS, double N_F) {
  return N_SRS + std::sqrt(2.0 * N_SRS * N_SRS + N_F * N_F);
}

/// Heralding efficiency above which a single-photon input reads out with
/// g2_out < 1; std::nullopt when the crossing exceeds eta_h = 1 ("not reachable").
inline std::optional<double> heralding_threshold(const G2Model& m, double eta) {
  if (!(eta > 0)) throw std::invalid_argument("heralding_threshold: eta must be > 0");
  if (m.a != -1.0 || m.g2_in != 0.0)
    throw std::invalid_argument("heralding_threshold: requires the Fock branch (a = -1, g2_in = 0)");
  if (m.N_SRS == 0.0 && m.N_F == 0.0) return 0.0;  // noiseless memory
  const double eta_h = nonclassical_crossing_photon_number(m.N_SRS, m.N_F) / eta;
  if (eta_h > 1.0) return std::nullopt;
  return eta_h;
}

/// g2_out vs heralding efficiency for a single-photon input (N_out = eta*eta_h).
struct FockCurvePoint {
  double eta_h;
  double g2;
};
inline std::vector<FockCurvePoint> fock_prediction(const G2Model& m, double eta,
                                                   const ArrayXd& eta_h_grid) {
  if (m.a != -1.0) throw std::invalid_argument("fock_prediction: model must have a = -1");
  std::vector<FockCurvePoint> out;
  out.reserve(eta_h_grid.size());
  for (Eigen::Index i = 0; i < eta_h_grid.size(); ++i) {
    const double eh = eta_h_grid[i];
    if (eh < 0 || eh > 1) throw std::invalid_argument("fock_prediction: eta_h grid out of [0,1]");
    out.push_back({eh, g2_out(m, eta * eh)});
  }
  return out;
}

/// g2 of the incoherent sum of two fields.
inline double incoherent_sum(double N1, double g2_1, double N2, double g2_2) {
  const double N = N1 + N2;
  if (!(N > 0)) throw std::invalid_argument("incoherent_sum: N1 + N2 must be > 0");
  return (N1 * N1 * g2_1 + 2.0 * N1 * N2 + N2 * N2 * g2_2) / (N * N);
}

/// Signal-branch g2 (SRS assumed thermal):
///   2 - N_in^2 (2 eta^2 - g2_in curlyG_ss) / (eta N_in + N_SRS)^2.
inline double g2_signal_only(double g2_in, double eta, double curlyG_ss, double N_in,
                             double N_SRS) {
  const double den = eta * N_in + N_SRS;
  if (!(den > 0)) throw std::invalid_argument("g2_signal_only: denominator must be > 0");
  return 2.0 - N_in * N_in * (2.0 * eta * eta - g2_in * curlyG_ss) / (den * den);
}

}  // namespace ramem

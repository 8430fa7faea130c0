#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ramem/types.hpp"

namespace ramem {

/// Atomic ensemble constants. Angular rates in rad/us, lengths in mm.
struct MediumParams {
  double d0 = 2.9e4;                       // on-resonance optical depth
  double gamma_N = mhz_to_angular(5.2);    // natural linewidth (angular HWHM)
  double gamma_P = mhz_to_angular(90.8);   // pressure broadening
  double Delta_hf = ghz_to_angular(9.192631770);
  double L = 75.0;                         // cell length
  double alpha = 1e-3;                     // unpumped population fraction in |3>
  double c = kSpeedOfLight;

  double gamma() const { return gamma_N + gamma_P; }
  // pressure-broadened depth d = d0 * gamma_N / gamma
  double broadened_depth() const { return d0 * gamma_N / gamma(); }

  std::vector<std::string> validation_errors() const;
  void validate() const;

  // Appendix-A simulation constants (gamma = 2pi x 96 MHz total)
  static MediumParams simulation_default() { return MediumParams{}; }
  // Appendix-B experiment constants
  static MediumParams experiment_default() {
    MediumParams m;
    m.d0 = 2.98e4;
    m.alpha = 1.5e-3;
    return m;
  }
};

/// Signal/anti-Stokes detunings from the populated |1>->|2> line, signed,
/// with Delta_a - Delta_s = 2*Delta_hf exact by construction.
struct DetuningConfig {
  double Delta_s = 0.0;
  double Delta_a = 0.0;

  static DetuningConfig from_signal(double delta_s, const MediumParams& m) {
    return DetuningConfig{delta_s, delta_s + 2.0 * m.Delta_hf};
  }
  static DetuningConfig bns(const MediumParams& m) { return from_signal(-2.0 * m.Delta_hf, m); }
  static DetuningConfig std_raman(const MediumParams& m) { return from_signal(+2.0 * m.Delta_hf, m); }

  // control sits midway: Delta_c = Delta_s + Delta_hf
  double Delta_c(const MediumParams& m) const { return Delta_s + m.Delta_hf; }
};

/// Complex linear response rates (rad/us): real part = amplitude absorption,
/// imaginary part = dispersive phase rate.
struct LinearResponse {
  Complex kappa_s;
  Complex kappa_a;
};

/// Which lines contribute to the signal's linear response.
enum class SignalCoupling {
  both_lines,          // alpha-weighted storage line + far wing of the populated line
  storage_line_only,   // only the alpha-weighted |3>->|2> line
};

inline Complex complex_detuning(const MediumParams& m, double delta) {
  return Complex(m.gamma(), delta);
}

/// Gamma_s, Gamma_a = gamma + i*Delta_{s,a}
std::pair<Complex, Complex> complex_detunings(const DetuningConfig& cfg, const MediumParams& m);

/// Two-line complex response at field detuning `delta` from the populated line.
/// kappa(delta) = (c d / 2L) [ (1-alpha) gamma/Gamma(delta) + alpha gamma/Gamma(delta - Delta_hf) ]
Complex kappa_of(const MediumParams& m, double delta,
                 SignalCoupling coupling = SignalCoupling::both_lines);

LinearResponse linear_loss(const MediumParams& m, const DetuningConfig& cfg,
                           SignalCoupling signal_coupling = SignalCoupling::both_lines);

/// Optical depth (intensity attenuation exponent) vs detuning; two Lorentzian
/// lines separated by Delta_hf with weights (1-alpha), alpha.
ArrayXd absorption_spectrum(const MediumParams& m, const ArrayXd& detuning_grid);

/// delta_k = 2 k_c - k_s - k_a in rad/mm; vacuum parts cancel identically,
/// only dispersive parts Im(kappa)/c remain.
double phase_mismatch(const MediumParams& m, const DetuningConfig& cfg);

}  // namespace ramem

#pragma once

#include <cmath>
#include <stdexcept>

#include "ramem/types.hpp"

namespace ramem {

// amplitude-envelope Gaussian whose intensity profile has the stated FWHM
inline double gaussian_envelope(double t, double center, double fwhm) {
  const double x = (t - center) / fwhm;
  return std::exp(-2.0 * M_LN2 * x * x);
}

// integral of the squared envelope: fwhm * sqrt(pi / (4 ln 2))
inline double gaussian_intensity_integral(double fwhm) {
  return fwhm * std::sqrt(M_PI / (4.0 * M_LN2));
}

struct ControlPulse {
  Complex peak_rabi{0.0, 0.0};  // rad/us
  double center = 0.0;          // us
  double fwhm = 0.010;          // us, intensity FWHM
  enum class Shape { gaussian } shape = Shape::gaussian;
};

/// Complex amplitude of the control at time t.
inline Complex envelope(const ControlPulse& p, double t) {
  if (!(p.fwhm > 0)) throw std::invalid_argument("ControlPulse: fwhm must be > 0");
  return p.peak_rabi * gaussian_envelope(t, p.center, p.fwhm);
}

/// Default dipole constant, rad/us per sqrt(pJ/(us*mm^2)), anchored so that the
/// 750 pJ / 130 um / 10 ns preset gives a peak Rabi frequency of 1850 rad/us.
inline constexpr double kDefaultDipoleConstant = 1.1356;

/// Peak Rabi frequency from pulse energy: Omega = dipole * sqrt(I_peak),
/// I_peak = energy / (intensity time integral * pi w^2 / 2).
double energy_to_peak_rabi(double energy_pJ, double waist_um, double fwhm_us,
                           double dipole_constant = kDefaultDipoleConstant);

/// Dipole constant that maps `energy_pJ` to `peak_rabi` at the given geometry.
double calibrate_dipole_constant(double energy_pJ, double peak_rabi, double waist_um,
                                 double fwhm_us);

struct PulseSequence {
  ControlPulse read_in;
  ControlPulse read_out;
  double storage_time = 0.070;        // us, center-to-center
  double n_in = 1.0;                  // input photons (integral of |signal|^2)
  double signal_fwhm = 0.010;         // us; signal is co-centered with read_in
  double integration_window = 0.035;  // us

  double t_retrieval() const { return read_out.center; }
};

/// Assemble a two-pulse sequence; signal co-centered with the read-in pulse.
/// Throws if the input and retrieval integration windows would overlap.
PulseSequence build_sequence(double read_in_pJ, double read_out_pJ, double storage_time_us,
                             double n_in, double t_read_in_us = 0.018,
                             double window_us = 0.035, double fwhm_us = 0.010,
                             double waist_um = 130.0,
                             double dipole_constant = kDefaultDipoleConstant);

/// Signal amplitude envelope on a time grid, normalized so that
/// sum |s|^2 dt = n_in exactly in the rectangle-rule quadrature of the grid.
ArrayXcd signal_envelope(const PulseSequence& seq, const ArrayXd& t);

}  // namespace ramem

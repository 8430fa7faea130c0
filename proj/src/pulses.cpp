#include "ramem/pulses.hpp"

namespace ramem {

double energy_to_peak_rabi(double energy_pJ, double waist_um, double fwhm_us,
                           double dipole_constant) {
  if (energy_pJ < 0) throw std::invalid_argument("energy_to_peak_rabi: negative energy");
  if (!(waist_um > 0) || !(fwhm_us > 0) || !(dipole_constant > 0))
    throw std::invalid_argument("energy_to_peak_rabi: waist, fwhm and dipole_constant must be > 0");
  const double w_mm = 1e-3 * waist_um;
  const double area = M_PI * w_mm * w_mm / 2.0;  // Gaussian beam effective area
  const double peak_intensity = energy_pJ / (gaussian_intensity_integral(fwhm_us) * area);
  return dipole_constant * std::sqrt(peak_intensity);
}

double calibrate_dipole_constant(double energy_pJ, double peak_rabi, double waist_um,
                                 double fwhm_us) {
  if (!(energy_pJ > 0) || !(peak_rabi > 0))
    throw std::invalid_argument("calibrate_dipole_constant: energy and peak_rabi must be > 0");
  return peak_rabi / energy_to_peak_rabi(energy_pJ, waist_um, fwhm_us, 1.0);
}

PulseSequence build_sequence(double read_in_pJ, double read_out_pJ, double storage_time_us,
                             double n_in, double t_read_in_us, double window_us,
                             double fwhm_us, double waist_um, double dipole_constant) {
  if (!(storage_time_us > fwhm_us))
    throw std::invalid_argument("build_sequence: storage_time must exceed the pulse fwhm");
  if (n_in < 0) throw std::invalid_argument("build_sequence: n_in must be >= 0");
  if (storage_time_us < window_us)
    throw std::invalid_argument("build_sequence: integration windows overlap (storage_time < window)");
  PulseSequence seq;
  seq.read_in = ControlPulse{Complex(energy_to_peak_rabi(read_in_pJ, waist_um, fwhm_us, dipole_constant), 0.0),
                             t_read_in_us, fwhm_us};
  seq.read_out = ControlPulse{Complex(energy_to_peak_rabi(read_out_pJ, waist_um, fwhm_us, dipole_constant), 0.0),
                              t_read_in_us + storage_time_us, fwhm_us};
  seq.storage_time = storage_time_us;
  seq.n_in = n_in;
  seq.signal_fwhm = fwhm_us;
  seq.integration_window = window_us;
  return seq;
}

ArrayXcd signal_envelope(const PulseSequence& seq, const ArrayXd& t) {
  ArrayXcd s(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i)
    s[i] = gaussian_envelope(t[i], seq.read_in.center, seq.signal_fwhm);
  if (seq.n_in == 0.0) return ArrayXcd::Zero(t.size());
  const double dt = t.size() > 1 ? t[1] - t[0] : 1.0;
  const double norm = (s.abs2().sum()) * dt;
  return s * std::sqrt(seq.n_in / norm);
}

}  // namespace ramem

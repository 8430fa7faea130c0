#include "ramem/medium.hpp"

#include <sstream>

namespace ramem {

std::vector<std::string> MediumParams::validation_errors() const {
  std::vector<std::string> errs;
  if (!(d0 > 0)) errs.push_back("d0 must be > 0");
  if (!(gamma_N > 0)) errs.push_back("gamma_N must be > 0");
  if (gamma_P < 0) errs.push_back("gamma_P must be >= 0");
  if (alpha < 0 || alpha > 1) errs.push_back("alpha out of [0,1]");
  if (!(L > 0)) errs.push_back("L must be > 0");
  if (!(Delta_hf > 0)) errs.push_back("Delta_hf must be > 0");
  if (!(c > 0)) errs.push_back("c must be > 0");
  return errs;
}

void MediumParams::validate() const {
  auto errs = validation_errors();
  if (errs.empty()) return;
  std::ostringstream os;
  os << "invalid medium parameters:";
  for (const auto& e : errs) os << " " << e << ";";
  throw std::invalid_argument(os.str());
}

std::pair<Complex, Complex> complex_detunings(const DetuningConfig& cfg, const MediumParams& m) {
  m.validate();
  return {complex_detuning(m, cfg.Delta_s), complex_detuning(m, cfg.Delta_a)};
}

Complex kappa_of(const MediumParams& m, double delta, SignalCoupling coupling) {
  const double g = m.gamma();
  const double d = m.broadened_depth();
  const double pre = m.c * d / (2.0 * m.L);
  const Complex storage = m.alpha * g / complex_detuning(m, delta - m.Delta_hf);
  if (coupling == SignalCoupling::storage_line_only) return pre * storage;
  const Complex populated = (1.0 - m.alpha) * g / complex_detuning(m, delta);
  return pre * (populated + storage);
}

LinearResponse linear_loss(const MediumParams& m, const DetuningConfig& cfg,
                           SignalCoupling signal_coupling) {
  m.validate();
  return LinearResponse{kappa_of(m, cfg.Delta_s, signal_coupling),
                        kappa_of(m, cfg.Delta_a, SignalCoupling::both_lines)};
}

ArrayXd absorption_spectrum(const MediumParams& m, const ArrayXd& detuning_grid) {
  m.validate();
  if (detuning_grid.size() == 0) throw std::invalid_argument("absorption_spectrum: empty detuning grid");
  for (Eigen::Index i = 1; i < detuning_grid.size(); ++i)
    if (!(detuning_grid[i] > detuning_grid[i - 1]))
      throw std::invalid_argument("absorption_spectrum: detuning grid must be strictly increasing");
  const double g = m.gamma();
  const double d = m.broadened_depth();
  ArrayXd od(detuning_grid.size());
  for (Eigen::Index i = 0; i < detuning_grid.size(); ++i) {
    const double x0 = detuning_grid[i];
    const double x1 = detuning_grid[i] - m.Delta_hf;
    od[i] = d * ((1.0 - m.alpha) * g * g / (g * g + x0 * x0) + m.alpha * g * g / (g * g + x1 * x1));
  }
  return od;
}

double phase_mismatch(const MediumParams& m, const DetuningConfig& cfg) {
  m.validate();
  const Complex ks = kappa_of(m, cfg.Delta_s);
  const Complex ka = kappa_of(m, cfg.Delta_a);
  const Complex kc = kappa_of(m, cfg.Delta_c(m));
  return (2.0 * kc.imag() - ks.imag() - ka.imag()) / m.c;
}

}  // namespace ramem

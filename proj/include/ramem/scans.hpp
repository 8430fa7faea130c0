#pragma once

#include <map>
#include <string>
#include <vector>

#include "ramem/greens.hpp"
#include "ramem/presets.hpp"

namespace ramem {

enum class ScanVariable { detuning, energy, storage_time, alpha };
enum class CaseKind { BNS, STD, FWM_off };

std::string to_string(ScanVariable v);
std::string to_string(CaseKind c);
ScanVariable scan_variable_from_string(const std::string& s);
CaseKind case_from_string(const std::string& s);

/// Config-driven scan over one variable for a set of memory cases.
/// For `detuning` the scan value is |Delta_s| in rad/us (BNS runs at -x,
/// STD at +x; FWM_off follows the red side unless only STD is requested).
struct ScanSpec {
  ScanVariable variable = ScanVariable::detuning;
  double lo = 0.0;
  double hi = 0.0;
  int n_points = 2;
  std::vector<CaseKind> cases;
  std::string base_preset = "sim-750pJ";
  std::vector<std::string> outputs = {"eta"};
  int workers = 1;
  // reduced grid for Green's-function-based noise observables
  int noise_n_z = 100;
  int noise_n_t = 0;  // 0 = derive from the resolution precondition
  double g2_N_F = 0.0;

  void validate() const;
  bool needs_ideal() const;
  bool needs_noise() const;
};

struct ScanRow {
  double x = 0.0;
  CaseKind kase = CaseKind::BNS;
  bool ok = false;
  std::string error;
  int iterations = 0;
  double residual = 0.0;
  std::map<std::string, double> values;
};

std::vector<ScanRow> run_scan(const ScanSpec& spec);

/// Noise photons per integration window from the vacuum/thermal-seeded
/// Green's route.
struct WindowNoise {
  std::string window;
  double N_SRS_AS = 0.0;
  double N_SRS_P = 0.0;
  double total() const { return N_SRS_AS + N_SRS_P; }
};
std::vector<WindowNoise> compare_windows(const GreensFunctionSet& g, double alpha);

/// mu1 = N_noise / eta.
inline double mu1(double noise_photons, double eta) {
  if (!(eta > 0)) throw std::invalid_argument("mu1: eta must be > 0");
  return noise_photons / eta;
}

}  // namespace ramem

#include "ramem/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace ramem {

namespace {

Preset make_sim_750() {
  Preset p;
  p.name = "sim-750pJ";
  p.medium = MediumParams::simulation_default();
  p.energy_pJ = 750.0;
  p.seq = build_sequence(750.0, 750.0, 0.070, 1.0);
  p.grid = SimGrid{200, 2000, 0.106, 1e-8, 200};
  p.opts = SolverOptions{};
  return p;
}

Preset make_sim_750_nobuffer() {
  Preset p = make_sim_750();
  p.name = "sim-750pJ-nobuffer";
  p.medium.gamma_P = 0.0;
  return p;
}

Preset make_exp(double energy, double storage_us, double lifetime_us, double n_in,
                const std::string& name) {
  Preset p;
  p.name = name;
  p.medium = MediumParams::experiment_default();
  p.energy_pJ = energy;
  const double t_in = 0.018;
  p.seq = build_sequence(energy, energy, storage_us, n_in, t_in);
  const double t_span = t_in + storage_us + 0.0185;
  const double om = energy_to_peak_rabi(energy, 130.0, 0.010);
  const int nt_min = int(std::ceil(om * t_span / 0.1)) + 2;
  p.grid = SimGrid{200, std::max(2000, nt_min), t_span, 1e-8, 200};
  p.opts = SolverOptions{};
  p.opts.spinwave_decay_rate = 1.0 / lifetime_us;
  return p;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    std::vector<Preset> v;
    v.push_back(make_sim_750());
    v.push_back(make_sim_750_nobuffer());
    // main-text operating points; lifetimes 294 ns (STD) / 625 ns (BNS)
    v.push_back(make_exp(930.0, 0.070, 0.294, 3.5, "exp-930pJ-70ns-std"));
    v.push_back(make_exp(930.0, 0.070, 0.625, 3.2, "exp-930pJ-70ns-bns"));
    v.push_back(make_exp(330.0, 0.150, 0.294, 3.5, "exp-330pJ-150ns-std"));
    v.push_back(make_exp(330.0, 0.150, 0.625, 3.2, "exp-330pJ-150ns-bns"));
    return v;
  }();
  return all;
}

const Preset& preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset: " + name);
}

const std::vector<G2Preset>& g2_presets() {
  static const std::vector<G2Preset> all = {
      {"g2-bns-fit", 11.0e-3, 3.8e-3, 0.102},
      {"g2-std-fit", 81.0e-3, 9.0e-3, 0.102},
      {"g2-bns-optimized", 2.8e-3, 3.8e-3, 0.127},
  };
  return all;
}

const G2Preset& g2_preset(const std::string& name) {
  for (const auto& p : g2_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown g2 preset: " + name);
}

PulseSequence sequence_at_energy(const Preset& p, double energy_pJ) {
  PulseSequence seq = p.seq;
  const double om = energy_to_peak_rabi(energy_pJ, p.waist_um, p.seq.read_in.fwhm, p.dipole_constant);
  seq.read_in.peak_rabi = Complex(om, 0.0);
  seq.read_out.peak_rabi = Complex(om, 0.0);
  return seq;
}

void retime_preset(Preset& p, double storage_us) {
  const double t_in = p.seq.read_in.center;
  p.seq.read_out.center = t_in + storage_us;
  p.seq.storage_time = storage_us;
  const double t_span = t_in + storage_us + p.seq.integration_window / 2 + 0.001;
  const double ratio = t_span / p.grid.t_span;
  p.grid.n_t = std::max(8, int(std::ceil(p.grid.n_t * ratio)));
  p.grid.t_span = t_span;
}

}  // namespace ramem

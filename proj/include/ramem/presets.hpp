#pragma once

#include <string>
#include <vector>

#include "ramem/photon_stats.hpp"
#include "ramem/solver.hpp"

namespace ramem {

/// A named, fully-resolved operating point: medium + pulse sequence + grid +
/// solver options. Every acceptance check references one of these by name.
struct Preset {
  std::string name;
  MediumParams medium;
  PulseSequence seq;
  SimGrid grid;
  SolverOptions opts;
  double energy_pJ = 0.0;  // per control pulse (read-in = read-out)
  double waist_um = 130.0;
  double dipole_constant = kDefaultDipoleConstant;
};

/// Fitted g2-model operating points from the coherent-state calibration.
struct G2Preset {
  std::string name;
  double N_SRS;
  double N_F;
  double eta;
};

const std::vector<Preset>& presets();
const Preset& preset(const std::string& name);

const std::vector<G2Preset>& g2_presets();
const G2Preset& g2_preset(const std::string& name);

/// Rebuild a preset's sequence at a different pulse energy (sqrt-law Rabi).
PulseSequence sequence_at_energy(const Preset& p, double energy_pJ);

/// Rebuild a preset's sequence and grid for a different storage time.
void retime_preset(Preset& p, double storage_us);

}  // namespace ramem

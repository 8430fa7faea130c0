#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ramem/presets.hpp"
#include "ramem/scans.hpp"

namespace ramem {

using json = nlohmann::json;

struct ConfigIssues {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;  // applied defaults, recorded in the manifest
  bool ok() const { return errors.empty(); }
};

struct SpectrumSpec {
  double lo = ghz_to_angular(-3.0);
  double hi = ghz_to_angular(12.0);
  int n_points = 601;
};

struct G2Section {
  G2Model model;
  double eta = 0.0;
  int n_points = 101;
};

struct FitSection {
  std::optional<double> fix_a;
  int bootstrap = 0;
};

/// Fully-resolved, unit-normalized run configuration.
struct ResolvedConfig {
  Preset preset;            // medium + sequence + grid + solver options
  DetuningConfig detuning;  // operating point
  std::string detuning_case = "BNS";
  std::optional<ScanSpec> scan;
  SpectrumSpec spectrum;
  std::optional<G2Section> g2;
  FitSection fit;
  json resolved;  // normalized config echo for the manifest
};

/// Validate and normalize a JSON config document. Checks are aggregated;
/// unknown keys are errors in strict mode and warnings otherwise.
ResolvedConfig validate_config(const json& doc, bool strict, ConfigIssues& issues);

/// Apply a `--set key.path=value` override onto a JSON document.
void apply_override(json& doc, const std::string& assignment);

}  // namespace ramem

#include "ramem/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace ramem {

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                bool strict, ConfigIssues& issues) {
  if (!obj.is_object()) {
    issues.errors.push_back(where + ": expected an object");
    return;
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      const std::string msg = where + ": unknown key '" + it.key() + "'";
      if (strict) issues.errors.push_back(msg);
      else issues.warnings.push_back(msg);
    }
  }
}

template <typename T>
bool fetch(const json& obj, const std::string& key, T& out, const std::string& where,
           ConfigIssues& issues) {
  if (!obj.contains(key)) return false;
  try {
    out = obj.at(key).get<T>();
    return true;
  } catch (const std::exception&) {
    issues.errors.push_back(where + "." + key + ": wrong type");
    return false;
  }
}

}  // namespace

ResolvedConfig validate_config(const json& doc, bool strict, ConfigIssues& issues) {
  ResolvedConfig rc;
  check_keys(doc, "config",
             {"preset", "medium", "sequence", "detuning", "grid", "solver", "scan", "spectrum",
              "g2_model", "fit"},
             strict, issues);

  std::string preset_name = "sim-750pJ";
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) issues.errors.push_back("preset: expected a string");
    else preset_name = doc["preset"].get<std::string>();
  }
  try {
    rc.preset = preset(preset_name);
  } catch (const std::exception& e) {
    issues.errors.push_back(e.what());
    rc.preset = preset("sim-750pJ");
  }

  bool delta_hf_overridden = false;
  if (doc.contains("medium")) {
    const json& m = doc["medium"];
    check_keys(m, "medium", {"d0", "gamma_N_MHz", "gamma_P_MHz", "Delta_hf_GHz", "L_mm", "alpha"},
               strict, issues);
    double v;
    if (fetch(m, "d0", v, "medium", issues)) rc.preset.medium.d0 = v;
    if (fetch(m, "gamma_N_MHz", v, "medium", issues)) rc.preset.medium.gamma_N = mhz_to_angular(v);
    if (fetch(m, "gamma_P_MHz", v, "medium", issues)) rc.preset.medium.gamma_P = mhz_to_angular(v);
    else issues.notes.push_back("medium.gamma_P_MHz: preset default applied");
    if (fetch(m, "Delta_hf_GHz", v, "medium", issues)) {
      rc.preset.medium.Delta_hf = ghz_to_angular(v);
      delta_hf_overridden = true;
    }
    if (fetch(m, "L_mm", v, "medium", issues)) rc.preset.medium.L = v;
    if (fetch(m, "alpha", v, "medium", issues)) rc.preset.medium.alpha = v;
  }
  for (const auto& e : rc.preset.medium.validation_errors()) issues.errors.push_back("medium: " + e);
  if (delta_hf_overridden)
    issues.warnings.push_back(
        "medium.Delta_hf_GHz overridden: BNS/STD operating points shift accordingly");

  double read_in_pJ = rc.preset.energy_pJ, read_out_pJ = rc.preset.energy_pJ;
  double storage_ns = us_to_ns(rc.preset.seq.storage_time);
  double n_in = rc.preset.seq.n_in;
  double window_ns = us_to_ns(rc.preset.seq.integration_window);
  double t_read_in_ns = us_to_ns(rc.preset.seq.read_in.center);
  double fwhm_ns = us_to_ns(rc.preset.seq.read_in.fwhm);
  double waist_um = rc.preset.waist_um;
  double dipole = rc.preset.dipole_constant;
  if (doc.contains("sequence")) {
    const json& s = doc["sequence"];
    check_keys(s, "sequence",
               {"read_in_pJ", "read_out_pJ", "storage_ns", "N_in", "window_ns", "t_read_in_ns",
                "fwhm_ns", "waist_um", "dipole_constant"},
               strict, issues);
    fetch(s, "read_in_pJ", read_in_pJ, "sequence", issues);
    fetch(s, "read_out_pJ", read_out_pJ, "sequence", issues);
    fetch(s, "storage_ns", storage_ns, "sequence", issues);
    fetch(s, "N_in", n_in, "sequence", issues);
    fetch(s, "window_ns", window_ns, "sequence", issues);
    fetch(s, "t_read_in_ns", t_read_in_ns, "sequence", issues);
    fetch(s, "fwhm_ns", fwhm_ns, "sequence", issues);
    fetch(s, "waist_um", waist_um, "sequence", issues);
    fetch(s, "dipole_constant", dipole, "sequence", issues);
  }
  try {
    rc.preset.seq = build_sequence(read_in_pJ, read_out_pJ, ns_to_us(storage_ns), n_in,
                                   ns_to_us(t_read_in_ns), ns_to_us(window_ns), ns_to_us(fwhm_ns),
                                   waist_um, dipole);
    rc.preset.energy_pJ = read_in_pJ;
    rc.preset.waist_um = waist_um;
    rc.preset.dipole_constant = dipole;
  } catch (const std::exception& e) {
    issues.errors.push_back(std::string("sequence: ") + e.what());
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    check_keys(g, "grid", {"n_z", "n_t", "t_span_ns", "tol", "max_iter"}, strict, issues);
    int iv;
    double v;
    if (fetch(g, "n_z", iv, "grid", issues)) rc.preset.grid.n_z = iv;
    if (fetch(g, "n_t", iv, "grid", issues)) rc.preset.grid.n_t = iv;
    if (fetch(g, "t_span_ns", v, "grid", issues)) rc.preset.grid.t_span = ns_to_us(v);
    if (fetch(g, "tol", v, "grid", issues)) rc.preset.grid.tol = v;
    if (fetch(g, "max_iter", iv, "grid", issues)) rc.preset.grid.max_iter = iv;
  }
  try {
    rc.preset.grid.validate();
  } catch (const std::exception& e) {
    issues.errors.push_back(std::string("grid: ") + e.what());
  }

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    check_keys(s, "solver",
               {"fwm_enabled", "spinwave_lifetime_ns", "control_dispersion_phase",
                "signal_coupling"},
               strict, issues);
    bool bv;
    double v;
    if (fetch(s, "fwm_enabled", bv, "solver", issues)) rc.preset.opts.fwm_enabled = bv;
    if (fetch(s, "spinwave_lifetime_ns", v, "solver", issues)) {
      if (v <= 0) issues.errors.push_back("solver.spinwave_lifetime_ns must be > 0");
      else rc.preset.opts.spinwave_decay_rate = 1.0 / ns_to_us(v);
    }
    if (fetch(s, "control_dispersion_phase", bv, "solver", issues))
      rc.preset.opts.control_dispersion_phase = bv;
    std::string sc;
    if (fetch(s, "signal_coupling", sc, "solver", issues)) {
      if (sc == "both_lines") rc.preset.opts.signal_coupling = SignalCoupling::both_lines;
      else if (sc == "storage_line_only")
        rc.preset.opts.signal_coupling = SignalCoupling::storage_line_only;
      else issues.errors.push_back("solver.signal_coupling: expected both_lines|storage_line_only");
    }
  }

  rc.detuning = DetuningConfig::bns(rc.preset.medium);
  rc.detuning_case = "BNS";
  if (doc.contains("detuning")) {
    const json& d = doc["detuning"];
    check_keys(d, "detuning", {"case", "Delta_s_GHz"}, strict, issues);
    std::string kase;
    double v;
    const bool has_case = fetch(d, "case", kase, "detuning", issues);
    const bool has_delta = fetch(d, "Delta_s_GHz", v, "detuning", issues);
    if (has_case && has_delta)
      issues.errors.push_back("detuning: give either 'case' or 'Delta_s_GHz', not both");
    else if (has_case) {
      if (kase == "BNS") rc.detuning = DetuningConfig::bns(rc.preset.medium);
      else if (kase == "STD") rc.detuning = DetuningConfig::std_raman(rc.preset.medium);
      else issues.errors.push_back("detuning.case: expected BNS|STD");
      rc.detuning_case = kase;
    } else if (has_delta) {
      rc.detuning = DetuningConfig::from_signal(ghz_to_angular(v), rc.preset.medium);
      rc.detuning_case = "custom";
    }
  }

  if (doc.contains("scan")) {
    const json& s = doc["scan"];
    check_keys(s, "scan",
               {"variable", "lo", "hi", "n_points", "cases", "outputs", "workers", "noise_n_z",
                "noise_n_t", "g2_N_F"},
               strict, issues);
    ScanSpec spec;
    spec.base_preset = preset_name;
    std::string var = "detuning";
    fetch(s, "variable", var, "scan", issues);
    try {
      spec.variable = scan_variable_from_string(var);
    } catch (const std::exception& e) {
      issues.errors.push_back(e.what());
    }
    double lo = 0, hi = 0;
    const bool has_lo = fetch(s, "lo", lo, "scan", issues);
    const bool has_hi = fetch(s, "hi", hi, "scan", issues);
    if (!has_lo || !has_hi) issues.errors.push_back("scan: lo and hi are required");
    if (spec.variable == ScanVariable::detuning) {
      spec.lo = ghz_to_angular(lo);
      spec.hi = ghz_to_angular(hi);
    } else if (spec.variable == ScanVariable::storage_time) {
      spec.lo = lo;  // ns
      spec.hi = hi;
    } else {
      spec.lo = lo;
      spec.hi = hi;
    }
    int np = 101;
    fetch(s, "n_points", np, "scan", issues);
    spec.n_points = np;
    std::vector<std::string> case_names = {"BNS", "STD", "FWM_off"};
    fetch(s, "cases", case_names, "scan", issues);
    spec.cases.clear();
    for (const auto& c : case_names) {
      try {
        spec.cases.push_back(case_from_string(c));
      } catch (const std::exception& e) {
        issues.errors.push_back(e.what());
      }
    }
    std::vector<std::string> outs = {"eta"};
    fetch(s, "outputs", outs, "scan", issues);
    spec.outputs = outs;
    int iv;
    if (fetch(s, "workers", iv, "scan", issues)) spec.workers = iv;
    if (fetch(s, "noise_n_z", iv, "scan", issues)) spec.noise_n_z = iv;
    if (fetch(s, "noise_n_t", iv, "scan", issues)) spec.noise_n_t = iv;
    double v;
    if (fetch(s, "g2_N_F", v, "scan", issues)) spec.g2_N_F = v;
    try {
      spec.validate();
    } catch (const std::exception& e) {
      issues.errors.push_back(std::string("scan: ") + e.what());
    }
    rc.scan = spec;
  }

  if (doc.contains("spectrum")) {
    const json& s = doc["spectrum"];
    check_keys(s, "spectrum", {"lo_GHz", "hi_GHz", "n_points"}, strict, issues);
    double v;
    int iv;
    if (fetch(s, "lo_GHz", v, "spectrum", issues)) rc.spectrum.lo = ghz_to_angular(v);
    if (fetch(s, "hi_GHz", v, "spectrum", issues)) rc.spectrum.hi = ghz_to_angular(v);
    if (fetch(s, "n_points", iv, "spectrum", issues)) rc.spectrum.n_points = iv;
    if (!(rc.spectrum.hi > rc.spectrum.lo)) issues.errors.push_back("spectrum: hi_GHz must exceed lo_GHz");
    if (rc.spectrum.n_points < 2) issues.errors.push_back("spectrum: n_points must be >= 2");
  }

  if (doc.contains("g2_model")) {
    const json& g = doc["g2_model"];
    check_keys(g, "g2_model", {"preset", "a", "N_SRS", "N_F", "g2_F", "g2_in", "eta", "n_points"},
               strict, issues);
    G2Section sec;
    std::string pname;
    if (fetch(g, "preset", pname, "g2_model", issues)) {
      try {
        const G2Preset& gp = g2_preset(pname);
        sec.model = G2Model::fock(gp.N_SRS, gp.N_F);
        sec.eta = gp.eta;
      } catch (const std::exception& e) {
        issues.errors.push_back(e.what());
      }
    } else {
      sec.model.a = -1.0;
      sec.model.g2_in = 0.0;
    }
    double v;
    if (fetch(g, "a", v, "g2_model", issues)) sec.model.a = v;
    if (fetch(g, "N_SRS", v, "g2_model", issues)) sec.model.N_SRS = v;
    if (fetch(g, "N_F", v, "g2_model", issues)) sec.model.N_F = v;
    if (fetch(g, "g2_F", v, "g2_model", issues)) sec.model.g2_F = v;
    if (fetch(g, "g2_in", v, "g2_model", issues)) sec.model.g2_in = v;
    if (fetch(g, "eta", v, "g2_model", issues)) sec.eta = v;
    int iv;
    if (fetch(g, "n_points", iv, "g2_model", issues)) sec.n_points = iv;
    try {
      sec.model.validate();
    } catch (const std::exception& e) {
      issues.errors.push_back(std::string("g2_model: ") + e.what());
    }
    if (sec.model.N_SRS < 0) issues.errors.push_back("g2_model.N_SRS must be >= 0");
    rc.g2 = sec;
  }

  if (doc.contains("fit")) {
    const json& f = doc["fit"];
    check_keys(f, "fit", {"fix_a", "bootstrap"}, strict, issues);
    double v;
    int iv;
    if (fetch(f, "fix_a", v, "fit", issues)) rc.fit.fix_a = v;
    if (fetch(f, "bootstrap", iv, "fit", issues)) rc.fit.bootstrap = iv;
  }

  // normalized echo (internal units)
  json r;
  r["preset"] = preset_name;
  r["medium"] = {{"d0", rc.preset.medium.d0},
                 {"gamma_N_rad_per_us", rc.preset.medium.gamma_N},
                 {"gamma_P_rad_per_us", rc.preset.medium.gamma_P},
                 {"Delta_hf_rad_per_us", rc.preset.medium.Delta_hf},
                 {"L_mm", rc.preset.medium.L},
                 {"alpha", rc.preset.medium.alpha}};
  r["sequence"] = {{"peak_rabi_rad_per_us", std::abs(rc.preset.seq.read_in.peak_rabi)},
                   {"read_out_peak_rabi_rad_per_us", std::abs(rc.preset.seq.read_out.peak_rabi)},
                   {"t_read_in_us", rc.preset.seq.read_in.center},
                   {"storage_us", rc.preset.seq.storage_time},
                   {"fwhm_us", rc.preset.seq.read_in.fwhm},
                   {"N_in", rc.preset.seq.n_in},
                   {"window_us", rc.preset.seq.integration_window}};
  r["grid"] = {{"n_z", rc.preset.grid.n_z},
               {"n_t", rc.preset.grid.n_t},
               {"t_span_us", rc.preset.grid.t_span},
               {"tol", rc.preset.grid.tol},
               {"max_iter", rc.preset.grid.max_iter}};
  r["solver"] = {{"fwm_enabled", rc.preset.opts.fwm_enabled},
                 {"spinwave_decay_rate_per_us", rc.preset.opts.spinwave_decay_rate},
                 {"control_dispersion_phase", rc.preset.opts.control_dispersion_phase},
                 {"signal_coupling", rc.preset.opts.signal_coupling == SignalCoupling::both_lines
                                         ? "both_lines"
                                         : "storage_line_only"}};
  r["detuning"] = {{"case", rc.detuning_case},
                   {"Delta_s_rad_per_us", rc.detuning.Delta_s},
                   {"Delta_a_rad_per_us", rc.detuning.Delta_a}};
  if (!issues.notes.empty()) r["notes"] = issues.notes;
  rc.resolved = r;
  return rc;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("--set expects key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  json* node = &doc;
  std::istringstream is(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(is, part, '.')) parts.push_back(part);
  if (parts.empty()) throw std::invalid_argument("--set: empty key path");
  for (size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
  // parse as JSON scalar first, fall back to string
  try {
    (*node)[parts.back()] = json::parse(value);
  } catch (...) {
    (*node)[parts.back()] = value;
  }
}

}  // namespace ramem

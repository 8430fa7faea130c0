#include "ramem/scans.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace ramem {

std::string to_string(ScanVariable v) {
  switch (v) {
    case ScanVariable::detuning: return "detuning";
    case ScanVariable::energy: return "energy";
    case ScanVariable::storage_time: return "storage_time";
    case ScanVariable::alpha: return "alpha";
  }
  return "?";
}

std::string to_string(CaseKind c) {
  switch (c) {
    case CaseKind::BNS: return "BNS";
    case CaseKind::STD: return "STD";
    case CaseKind::FWM_off: return "FWM_off";
  }
  return "?";
}

ScanVariable scan_variable_from_string(const std::string& s) {
  if (s == "detuning") return ScanVariable::detuning;
  if (s == "energy") return ScanVariable::energy;
  if (s == "storage_time") return ScanVariable::storage_time;
  if (s == "alpha") return ScanVariable::alpha;
  throw std::invalid_argument("unknown scan variable: " + s);
}

CaseKind case_from_string(const std::string& s) {
  if (s == "BNS") return CaseKind::BNS;
  if (s == "STD") return CaseKind::STD;
  if (s == "FWM_off") return CaseKind::FWM_off;
  throw std::invalid_argument("unknown case: " + s);
}

void ScanSpec::validate() const {
  if (n_points < 2) throw std::invalid_argument("ScanSpec: n_points must be >= 2");
  if (cases.empty()) throw std::invalid_argument("ScanSpec: cases must be non-empty");
  if (outputs.empty()) throw std::invalid_argument("ScanSpec: outputs must be non-empty");
  static const std::vector<std::string> known = {"eta",  "leakage",          "eta_minus_ideal",
                                                 "delta_k", "anti_stokes_OD", "N_noise_by_window",
                                                 "mu1", "g2_eta_h_1"};
  for (const auto& o : outputs)
    if (std::find(known.begin(), known.end(), o) == known.end())
      throw std::invalid_argument("ScanSpec: unknown output " + o);
  const bool fwm_off_only =
      cases.size() == 1 && cases[0] == CaseKind::FWM_off;
  if (fwm_off_only)
    for (const auto& o : outputs)
      if (o != "eta" && o != "leakage" && o != "eta_minus_ideal")
        throw std::invalid_argument("ScanSpec: FWM_off is valid only for eta-type observables");
  preset(base_preset);  // resolvable
}

bool ScanSpec::needs_ideal() const {
  return std::find(outputs.begin(), outputs.end(), "eta_minus_ideal") != outputs.end();
}

bool ScanSpec::needs_noise() const {
  for (const auto& o : outputs)
    if (o == "N_noise_by_window" || o == "mu1" || o == "g2_eta_h_1") return true;
  return false;
}

std::vector<WindowNoise> compare_windows(const GreensFunctionSet& g, double alpha) {
  std::vector<WindowNoise> out;
  const NoiseBudget in = noise_numbers_window(g, alpha, g.t_input_lo, g.t_input_hi);
  const NoiseBudget ret = noise_numbers_window(g, alpha, g.t_retrieval_lo, g.t_retrieval_hi);
  out.push_back({"input", in.N_SRS_AS, in.N_SRS_P});
  out.push_back({"retrieval", ret.N_SRS_AS, ret.N_SRS_P});
  return out;
}

namespace {

struct PointTask {
  double x;
  CaseKind kase;
};

DetuningConfig config_for(const ScanSpec& spec, const Preset& p, const PointTask& task) {
  const bool red_side =
      std::find(spec.cases.begin(), spec.cases.end(), CaseKind::BNS) != spec.cases.end() ||
      std::find(spec.cases.begin(), spec.cases.end(), CaseKind::STD) == spec.cases.end();
  if (spec.variable == ScanVariable::detuning) {
    double delta_s = 0.0;
    switch (task.kase) {
      case CaseKind::BNS: delta_s = -task.x; break;
      case CaseKind::STD: delta_s = +task.x; break;
      case CaseKind::FWM_off: delta_s = red_side ? -task.x : +task.x; break;
    }
    return DetuningConfig::from_signal(delta_s, p.medium);
  }
  switch (task.kase) {
    case CaseKind::STD: return DetuningConfig::std_raman(p.medium);
    case CaseKind::BNS: return DetuningConfig::bns(p.medium);
    case CaseKind::FWM_off:
      return red_side ? DetuningConfig::bns(p.medium) : DetuningConfig::std_raman(p.medium);
  }
  return DetuningConfig::bns(p.medium);
}

ScanRow run_point(const ScanSpec& spec, const PointTask& task) {
  ScanRow row;
  row.x = task.x;
  row.kase = task.kase;
  try {
    Preset p = preset(spec.base_preset);
    switch (spec.variable) {
      case ScanVariable::detuning: break;
      case ScanVariable::energy: p.seq = sequence_at_energy(p, task.x); break;
      case ScanVariable::storage_time: retime_preset(p, ns_to_us(task.x)); break;
      case ScanVariable::alpha: p.medium.alpha = task.x; break;
    }
    const DetuningConfig cfg = config_for(spec, p, task);
    SolverOptions opts = p.opts;
    opts.fwm_enabled = task.kase != CaseKind::FWM_off;

    const MemoryResult mr = memory_run(p.medium, cfg, p.seq, p.grid, opts);
    row.iterations = mr.iterations;
    row.residual = mr.residual;
    for (const auto& o : spec.outputs) {
      if (o == "eta") row.values["eta"] = mr.eta_total;
      else if (o == "leakage") row.values["leakage"] = mr.leakage;
      else if (o == "eta_minus_ideal") {
        if (task.kase == CaseKind::FWM_off) {
          row.values["eta_minus_ideal"] = 0.0;
        } else {
          SolverOptions ideal = opts;
          ideal.fwm_enabled = false;
          const MemoryResult mi = memory_run(p.medium, cfg, p.seq, p.grid, ideal);
          row.values["eta_minus_ideal"] = mr.eta_total - mi.eta_total;
        }
      } else if (o == "delta_k") {
        row.values["delta_k"] = phase_mismatch(p.medium, cfg);
      } else if (o == "anti_stokes_OD") {
        ArrayXd one(1);
        one << cfg.Delta_a;
        // OD at the anti-Stokes detuning; grid monotone trivially
        const double g = p.medium.gamma();
        const double d = p.medium.broadened_depth();
        const double x0 = cfg.Delta_a, x1 = cfg.Delta_a - p.medium.Delta_hf;
        row.values["anti_stokes_OD"] =
            d * ((1 - p.medium.alpha) * g * g / (g * g + x0 * x0) +
                 p.medium.alpha * g * g / (g * g + x1 * x1));
      }
    }
    if (spec.needs_noise() && task.kase != CaseKind::FWM_off) {
      SimGrid ng = p.grid;
      ng.n_z = spec.noise_n_z;
      const double om = std::abs(p.seq.read_in.peak_rabi);
      ng.n_t = spec.noise_n_t > 0 ? spec.noise_n_t
                                  : std::max(1000, int(std::ceil(om * ng.t_span / 0.098)) + 2);
      const GreensFunctionSet g = extract_greens(p.medium, cfg, p.seq, ng, opts, 1);
      const auto win = compare_windows(g, p.medium.alpha);
      const NoiseBudget nb = noise_numbers(g, p.medium.alpha);
      for (const auto& o : spec.outputs) {
        if (o == "N_noise_by_window") {
          row.values["N_noise_input"] = win[0].total();
          row.values["N_noise_retrieval"] = win[1].total();
        } else if (o == "mu1") {
          row.values["mu1"] = mu1(nb.N_SRS() + spec.g2_N_F, mr.eta_total);
        } else if (o == "g2_eta_h_1") {
          const G2Model model = G2Model::fock(nb.N_SRS(), spec.g2_N_F);
          row.values["g2_eta_h_1"] = g2_out(model, mr.eta_total);
        }
      }
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<ScanRow> run_scan(const ScanSpec& spec) {
  spec.validate();
  std::vector<PointTask> tasks;
  for (const auto& kase : spec.cases)
    for (int i = 0; i < spec.n_points; ++i) {
      const double x = spec.lo + (spec.hi - spec.lo) * double(i) / double(spec.n_points - 1);
      tasks.push_back({x, kase});
    }
  std::vector<ScanRow> rows(tasks.size());
  const int workers = std::max(1, spec.workers);
  if (workers == 1) {
    for (size_t i = 0; i < tasks.size(); ++i) rows[i] = run_point(spec, tasks[i]);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k)
      pool.emplace_back([&] {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          rows[i] = run_point(spec, tasks[i]);
        }
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace ramem

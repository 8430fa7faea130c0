// Command-line front end: config-driven simulation, scans, noise extraction
// and the closed-form g2 model tools.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ramem/config.hpp"
#include "ramem/io.hpp"

namespace fs = std::filesystem;
using namespace ramem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CliArgs {
  std::string verb;
  std::string config_path;
  std::string data_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  int workers = 0;
  bool emit_plot_data = false;
  bool strict = true;
};

int default_workers() {
  if (const char* env = std::getenv("RMS_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

json load_config(const CliArgs& args) {
  json doc = json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw std::invalid_argument("config file not found: " + args.config_path);
    in >> doc;
  }
  for (const auto& ov : args.overrides) apply_override(doc, ov);
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("file not found: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct RunContext {
  CliArgs args;
  ResolvedConfig cfg;
  ConfigIssues issues;
  std::vector<std::string> outputs;
  json extra;  // verb-specific manifest payload
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  std::string path(const std::string& name) const { return (fs::path(args.out_dir) / name).string(); }
  void emit(const std::string& name, const std::string& content) {
    atomic_write_file(path(name), content);
    outputs.push_back(name);
  }
  void write_manifest() {
    json m;
    m["tool"] = "ramem";
    m["version"] = kVersion;
    m["verb"] = args.verb;
    m["config"] = cfg.resolved;
    m["outputs"] = outputs;
    m["warnings"] = issues.warnings;
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
    m["wall_time_s"] = dt.count();
    if (!extra.is_null()) m["result"] = extra;
    atomic_write_file(path("run.json"), m.dump(2) + "\n");
  }
};

int cmd_spectrum(RunContext& rc) {
  const auto& sp = rc.cfg.spectrum;
  const ArrayXd grid = ArrayXd::LinSpaced(sp.n_points, sp.lo, sp.hi);
  const ArrayXd od = absorption_spectrum(rc.cfg.preset.medium, grid);
  rc.emit("spectrum.csv", spectrum_csv(grid, od));
  return 0;
}

int cmd_simulate(RunContext& rc) {
  const Preset& p = rc.cfg.preset;
  const MemoryResult r = memory_run(p.medium, rc.cfg.detuning, p.seq, p.grid, p.opts);
  rc.emit("trace.csv", trace_csv(r));
  rc.extra = {{"eta_total", r.eta_total},
              {"eta_readin", r.eta_readin},
              {"leakage", r.leakage},
              {"eta_defined", r.eta_defined},
              {"n_retrieved", r.n_retrieved},
              {"iterations", r.iterations},
              {"residual", r.residual}};
  return 0;
}

int cmd_greens(RunContext& rc) {
  const Preset& p = rc.cfg.preset;
  const int workers = rc.args.workers;
  const GreensFunctionSet g =
      extract_greens(p.medium, rc.cfg.detuning, p.seq, p.grid, p.opts, workers);
  NoiseBudget nb = noise_numbers(g, p.medium.alpha);
  if (p.seq.n_in > 0) {
    const ArrayXcd mode = signal_envelope(p.seq, g.t);
    nb.eta = efficiency_from_greens(g, mode);
    nb.N_mem = nb.eta * p.seq.n_in;
  }
  rc.emit("kernels.csv", kernels_csv(g));
  rc.emit("kernels.json", greens_metadata_json(g).dump(2) + "\n");
  rc.emit("noise.json", noise_budget_json(nb).dump(2) + "\n");
  const QuarticIntegrals q = quartic_integrals(g);
  rc.extra = {{"curlyG_ss", q.value[0][0]},
              {"curlyG_sa", q.value[0][1]},
              {"curlyG_sb", q.value[0][2]},
              {"N_SRS_AS", nb.N_SRS_AS},
              {"N_SRS_P", nb.N_SRS_P},
              {"eta", nb.eta}};
  return 0;
}

void emit_plot_csvs(RunContext& rc, const ScanSpec& spec, const std::vector<ScanRow>& rows) {
  auto emit_observable = [&](const std::string& file, const std::string& key) {
    bool any = false;
    for (const auto& r : rows) any = any || r.values.count(key);
    if (!any) return;
    std::ostringstream os;
    os << "case," << to_string(spec.variable) << "," << key << "\n";
    for (const auto& r : rows) {
      const auto it = r.values.find(key);
      if (it == r.values.end()) continue;
      const double x = spec.variable == ScanVariable::detuning ? angular_to_ghz(r.x) : r.x;
      os << to_string(r.kase) << "," << format_double(x) << "," << format_double(it->second) << "\n";
    }
    rc.emit(file, os.str());
  };
  if (spec.variable == ScanVariable::detuning) {
    emit_observable("figA1a.csv", "eta");
    emit_observable("figA1b.csv", "eta_minus_ideal");
    emit_observable("figA1c.csv", "delta_k");
    emit_observable("figA1d.csv", "anti_stokes_OD");
  } else if (spec.variable == ScanVariable::energy) {
    emit_observable("fig3.csv", "eta");
  } else if (spec.variable == ScanVariable::storage_time) {
    emit_observable("lifetime.csv", "eta");
  } else {
    emit_observable("figA2.csv", "N_noise_retrieval");
  }
}

int cmd_scan(RunContext& rc) {
  if (!rc.cfg.scan) throw std::invalid_argument("scan: config needs a 'scan' section");
  ScanSpec spec = *rc.cfg.scan;
  if (rc.args.workers > 0) spec.workers = rc.args.workers;
  const auto rows = run_scan(spec);
  rc.emit("scan.csv", scan_csv(spec, rows));
  if (rc.args.emit_plot_data) emit_plot_csvs(rc, spec, rows);
  int failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  rc.extra = {{"points", rows.size()}, {"failed_points", failed}};
  return 0;
}

int cmd_g2_fit(RunContext& rc) {
  if (rc.args.data_path.empty()) throw std::invalid_argument("g2-fit: --data CSV is required");
  const auto pts = read_g2_points_csv(read_file(rc.args.data_path));
  G2FitOptions opts;
  opts.fix_a = rc.cfg.fit.fix_a;
  opts.bootstrap_resamples = rc.cfg.fit.bootstrap;
  const FitResult r = fit_g2_model(pts, opts);
  rc.emit("fit.json", fit_result_json(r).dump(2) + "\n");
  rc.extra = fit_result_json(r);
  return 0;
}

int cmd_g2_predict(RunContext& rc) {
  if (!rc.cfg.g2) throw std::invalid_argument("g2-predict: config needs a 'g2_model' section");
  const G2Section& sec = *rc.cfg.g2;
  if (!(sec.eta > 0)) throw std::invalid_argument("g2-predict: g2_model.eta must be > 0");
  const ArrayXd grid = ArrayXd::LinSpaced(sec.n_points, 0.0, 1.0);
  const auto curve = fock_prediction(sec.model, sec.eta, grid);
  rc.emit("g2_predict.csv", fock_curve_csv(curve));
  const auto thr = heralding_threshold(sec.model, sec.eta);
  rc.extra = g2_model_json(sec.model, sec.eta);
  rc.extra["g2_at_eta_h_1"] = curve.back().g2;
  if (thr) rc.extra["heralding_threshold"] = *thr;
  else rc.extra["heralding_threshold"] = "not reachable";
  return 0;
}

int cmd_lifetime_fit(RunContext& rc) {
  if (rc.args.data_path.empty()) throw std::invalid_argument("lifetime-fit: --data CSV is required");
  const auto [t, y] = read_xy_csv(read_file(rc.args.data_path));
  const FitResult r = fit_exponential(t, y);
  rc.emit("fit.json", fit_result_json(r).dump(2) + "\n");
  rc.extra = fit_result_json(r);
  return 0;
}

int cmd_noise_vs_pumping(RunContext& rc) {
  ScanSpec spec;
  if (rc.cfg.scan) spec = *rc.cfg.scan;
  else {
    spec.variable = ScanVariable::alpha;
    spec.lo = 0.002;
    spec.hi = 0.02;
    spec.n_points = 7;
    spec.cases = {CaseKind::BNS};
    spec.base_preset = "exp-330pJ-150ns-bns";
  }
  spec.outputs = {"eta", "N_noise_by_window"};
  if (spec.variable != ScanVariable::alpha)
    throw std::invalid_argument("noise-vs-pumping: scan variable must be alpha");
  if (rc.args.workers > 0) spec.workers = rc.args.workers;
  const auto rows = run_scan(spec);
  rc.emit("noise_vs_pumping.csv", scan_csv(spec, rows));
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    xs.push_back(r.x);
    ys.push_back(r.values.at("N_noise_retrieval"));
  }
  if (xs.size() >= 2) {
    ArrayXd x = Eigen::Map<ArrayXd>(xs.data(), Eigen::Index(xs.size()));
    ArrayXd y = Eigen::Map<ArrayXd>(ys.data(), Eigen::Index(ys.size()));
    const FitResult fit = fit_linear(x, y);
    rc.emit("fit.json", fit_result_json(fit).dump(2) + "\n");
    rc.extra = fit_result_json(fit);
    rc.extra["offset_interpretation"] = "fluorescence floor (alpha -> 0 extrapolation)";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raman quantum memory simulator with built-in four-wave-mixing noise suppression"};
  app.set_version_flag("--version", kVersion);
  CliArgs args;
  args.workers = 0;

  std::map<std::string, std::function<int(RunContext&)>> verbs = {
      {"spectrum", cmd_spectrum},        {"simulate", cmd_simulate},
      {"greens", cmd_greens},            {"scan", cmd_scan},
      {"g2-fit", cmd_g2_fit},            {"g2-predict", cmd_g2_predict},
      {"lifetime-fit", cmd_lifetime_fit},{"noise-vs-pumping", cmd_noise_vs_pumping}};

  for (auto& [name, fn] : verbs) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config_path, "JSON config file");
    sub->add_option("--data", args.data_path, "input CSV (fit verbs)");
    sub->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    sub->add_option("--set", args.overrides, "key.path=value config override")->take_all();
    sub->add_option("--workers", args.workers, "worker threads (default: RMS_WORKERS or 1)");
    sub->add_flag("--emit-plot-data", args.emit_plot_data, "write per-figure CSVs");
    auto* strict = sub->add_flag("--strict", "strict config validation (default)");
    auto* lenient = sub->add_flag("--lenient", "warn on unknown config keys");
    sub->parse_complete_callback([&, name = name, strict, lenient] {
      args.verb = name;
      if (lenient->count()) args.strict = false;
      if (strict->count()) args.strict = true;
    });
  }
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  RunContext rc;
  try {
    rc.args = args;
    if (rc.args.workers == 0) rc.args.workers = default_workers();
    const json doc = load_config(args);
    rc.cfg = validate_config(doc, args.strict, rc.issues);
    for (const auto& w : rc.issues.warnings) std::cerr << "warning: " << w << "\n";
    if (!rc.issues.ok()) {
      for (const auto& e : rc.issues.errors) std::cerr << "error: " << e << "\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const int code = verbs.at(args.verb)(rc);
    rc.write_manifest();
    return code;
  } catch (const SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual << " after "
              << e.iterations << " iterations)\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

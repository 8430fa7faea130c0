#include "ramem/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ramem {

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string spectrum_csv(const ArrayXd& detuning, const ArrayXd& od) {
  std::ostringstream os;
  os << "detuning_GHz,optical_depth\n";
  for (Eigen::Index i = 0; i < detuning.size(); ++i)
    os << format_double(angular_to_ghz(detuning[i])) << "," << format_double(od[i]) << "\n";
  return os.str();
}

std::string trace_csv(const MemoryResult& r) {
  std::ostringstream os;
  os << "t_ns,abs2_S_out,abs2_A_out\n";
  for (Eigen::Index i = 0; i < r.t.size(); ++i)
    os << format_double(us_to_ns(r.t[i])) << "," << format_double(r.abs2_S_out[i]) << ","
       << format_double(r.abs2_A_out[i]) << "\n";
  return os.str();
}

std::string scan_csv(const ScanSpec& spec, const std::vector<ScanRow>& rows) {
  // stable column order: union of observable keys in spec order
  std::vector<std::string> cols;
  for (const auto& o : spec.outputs) {
    if (o == "N_noise_by_window") {
      cols.push_back("N_noise_input");
      cols.push_back("N_noise_retrieval");
    } else {
      cols.push_back(o);
    }
  }
  std::ostringstream os;
  os << "case," << to_string(spec.variable);
  for (const auto& c : cols) os << "," << c;
  os << ",ok,iterations,residual,error\n";
  for (const auto& r : rows) {
    double x = r.x;
    if (spec.variable == ScanVariable::detuning) x = angular_to_ghz(r.x);
    os << to_string(r.kase) << "," << format_double(x);
    for (const auto& c : cols) {
      os << ",";
      const auto it = r.values.find(c);
      if (it != r.values.end()) os << format_double(it->second);
    }
    os << "," << (r.ok ? 1 : 0) << "," << r.iterations << "," << format_double(r.residual) << ","
       << r.error << "\n";
  }
  return os.str();
}

std::string fock_curve_csv(const std::vector<FockCurvePoint>& curve) {
  std::ostringstream os;
  os << "eta_h,g2_out\n";
  for (const auto& p : curve)
    os << format_double(p.eta_h) << "," << format_double(p.g2) << "\n";
  return os.str();
}

std::string kernels_csv(const GreensFunctionSet& g) {
  static const char* names = "sab";
  std::ostringstream os;
  os << "i,j,t_index,tprime_index,re,im\n";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const MatrixXcd& blk = g.G[i][j];
      for (Eigen::Index r = 0; r < blk.rows(); ++r)
        for (Eigen::Index c = 0; c < blk.cols(); ++c) {
          const Complex v = blk(r, c);
          if (v == Complex(0.0)) continue;
          os << names[i] << "," << names[j] << "," << r << "," << c << ","
             << format_double(v.real()) << "," << format_double(v.imag()) << "\n";
        }
    }
  return os.str();
}

namespace {
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number in CSV: " + s);
  return v;
}

bool is_number(const std::string& s) {
  try {
    to_double(s);
    return true;
  } catch (...) {
    return false;
  }
}
}  // namespace

std::vector<StatPoint> read_g2_points_csv(const std::string& text) {
  auto rows = parse_csv(text);
  std::vector<StatPoint> pts;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 && !rows[i].empty() && !is_number(rows[i][0])) continue;  // header
    if (rows[i].size() < 2) throw std::invalid_argument("g2 CSV: need N_out,g2[,g2_err]");
    StatPoint p;
    p.N_out = to_double(rows[i][0]);
    p.g2 = to_double(rows[i][1]);
    p.g2_err = rows[i].size() > 2 ? to_double(rows[i][2]) : 0.0;
    pts.push_back(p);
  }
  return pts;
}

std::pair<ArrayXd, ArrayXd> read_xy_csv(const std::string& text) {
  auto rows = parse_csv(text);
  std::vector<double> xs, ys;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 && !rows[i].empty() && !is_number(rows[i][0])) continue;
    if (rows[i].size() < 2) throw std::invalid_argument("CSV: need two columns");
    xs.push_back(to_double(rows[i][0]));
    ys.push_back(to_double(rows[i][1]));
  }
  ArrayXd x(xs.size()), y(ys.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    x[Eigen::Index(i)] = xs[i];
    y[Eigen::Index(i)] = ys[i];
  }
  return {x, y};
}

json fit_result_json(const FitResult& r) {
  json j;
  j["converged"] = r.converged;
  j["n_points"] = r.n_points;
  j["residual_norm"] = r.residual_norm;
  json params = json::object(), ci = json::object();
  for (size_t i = 0; i < r.names.size(); ++i) {
    params[r.names[i]] = r.params[Eigen::Index(i)];
    ci[r.names[i]] = {r.ci95[i].first, r.ci95[i].second};
  }
  j["params"] = params;
  j["ci95"] = ci;
  std::vector<std::vector<double>> cov;
  for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index k = 0; k < r.covariance.cols(); ++k) row.push_back(r.covariance(i, k));
    cov.push_back(row);
  }
  j["covariance"] = cov;
  j["flags"] = r.flags;
  return j;
}

json noise_budget_json(const NoiseBudget& nb) {
  json j;
  j["N_mem"] = nb.N_mem;
  j["N_SRS_AS"] = nb.N_SRS_AS;
  j["N_SRS_P"] = nb.N_SRS_P;
  j["N_SRS"] = nb.N_SRS();
  j["eta"] = nb.eta;
  return j;
}

json greens_metadata_json(const GreensFunctionSet& g) {
  json j;
  j["n_t"] = g.t.size();
  j["n_z"] = g.z.size();
  j["dt_us"] = g.wt;
  j["dz"] = g.wz;
  j["t_span_us"] = g.t.size() ? g.t[g.t.size() - 1] : 0.0;
  j["retrieval_window_us"] = {g.t_retrieval_lo, g.t_retrieval_hi};
  j["input_window_us"] = {g.t_input_lo, g.t_input_hi};
  j["modes"] = {"s", "a (dagger)", "b"};
  return j;
}

json g2_model_json(const G2Model& m, double eta) {
  json j;
  j["a"] = m.a;
  j["N_SRS"] = m.N_SRS;
  j["N_F"] = m.N_F;
  j["g2_F"] = m.g2_F;
  j["g2_in"] = m.g2_in;
  j["N_L"] = m.N_L;
  j["eta"] = eta;
  return j;
}

G2Model g2_model_from_json(const json& j, double* eta_out) {
  G2Model m;
  m.N_SRS = j.at("N_SRS").get<double>();
  m.N_F = j.at("N_F").get<double>();
  if (j.contains("a")) m.a = j["a"].get<double>();
  if (j.contains("g2_F")) m.g2_F = j["g2_F"].get<double>();
  if (j.contains("g2_in")) m.g2_in = j["g2_in"].get<double>();
  if (eta_out && j.contains("eta")) *eta_out = j["eta"].get<double>();
  m.validate();
  return m;
}

}  // namespace ramem

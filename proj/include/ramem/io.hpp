#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ramem/fitting.hpp"
#include "ramem/greens.hpp"
#include "ramem/scans.hpp"

namespace ramem {

using json = nlohmann::json;

/// Write a file atomically: temp file in the same directory, then rename.
void atomic_write_file(const std::string& path, const std::string& content);

std::string format_double(double v);  // shortest round-trippable representation

// --- CSV emitters -----------------------------------------------------------

std::string spectrum_csv(const ArrayXd& detuning, const ArrayXd& od);  // detuning_GHz,optical_depth
std::string trace_csv(const MemoryResult& r);                          // t_ns,abs2_S_out,abs2_A_out
std::string scan_csv(const ScanSpec& spec, const std::vector<ScanRow>& rows);
std::string fock_curve_csv(const std::vector<FockCurvePoint>& curve);  // eta_h,g2_out
std::string kernels_csv(const GreensFunctionSet& g);  // i,j,t_index,tprime_index,re,im

// --- CSV readers ------------------------------------------------------------

std::vector<StatPoint> read_g2_points_csv(const std::string& text);           // N_out,g2[,g2_err]
std::pair<ArrayXd, ArrayXd> read_xy_csv(const std::string& text);             // two columns

// --- JSON emitters ----------------------------------------------------------

json fit_result_json(const FitResult& r);
json noise_budget_json(const NoiseBudget& nb);
json greens_metadata_json(const GreensFunctionSet& g);
json g2_model_json(const G2Model& m, double eta);
G2Model g2_model_from_json(const json& j, double* eta_out);

}  // namespace ramem

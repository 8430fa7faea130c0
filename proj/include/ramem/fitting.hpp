#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ramem/photon_stats.hpp"
#include "ramem/types.hpp"

namespace ramem {

struct FitResult {
  std::vector<std::string> names;
  VectorXd params;
  MatrixXd covariance;
  std::vector<std::pair<double, double>> ci95;
  double residual_norm = 0.0;  // sqrt(chi^2) of weighted residuals
  int n_points = 0;
  bool converged = false;
  std::vector<std::string> flags;

  double param(const std::string& name) const;
  bool has_flag(const std::string& f) const;
};

struct G2FitOptions {
  std::optional<double> fix_a;     // constrain a instead of floating it
  int bootstrap_resamples = 0;     // 0 = covariance-based CIs only
  unsigned bootstrap_seed = 2024;
  int workers = 1;
};

/// Weighted nonlinear least squares of the g2 model (a, N_SRS, N_F) with
/// N_SRS, N_F constrained nonnegative. Points with g2_err <= 0 get a 1%
/// relative default error (flagged). Requires >= 4 points including one near
/// N_out = 0; throws on rank deficiency or non-convergence.
FitResult fit_g2_model(const std::vector<StatPoint>& points, const G2FitOptions& opts = {});

/// Least-squares fit of A * exp(-t / tau); t in ns, tau reported in ns.
/// Non-identifiable decay (constant data) is flagged rather than fitted.
FitResult fit_exponential(const ArrayXd& t_ns, const ArrayXd& value);

/// Ordinary least squares y = slope * x + offset.
FitResult fit_linear(const ArrayXd& x, const ArrayXd& y);

}  // namespace ramem

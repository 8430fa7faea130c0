#include "ramem/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ramem {

namespace {

constexpr double kZ95 = 1.959963984540054;

void finish(FitResult& r) {
  r.ci95.clear();
  for (Eigen::Index i = 0; i < r.params.size(); ++i) {
    const double s = std::sqrt(std::max(0.0, r.covariance(i, i)));
    r.ci95.emplace_back(r.params[i] - kZ95 * s, r.params[i] + kZ95 * s);
  }
}

double g2_model_eval(double N, double a, double Ns, double Nf) {
  const double D = N + Ns + Nf;
  return 1.0 + (a * N * N + 2.0 * Ns * N + Ns * Ns + Nf * Nf) / (D * D);
}

// analytic Jacobian of g2_model_eval w.r.t. (a, Ns, Nf)
Eigen::Vector3d g2_model_jac(double N, double a, double Ns, double Nf) {
  const double D = N + Ns + Nf;
  const double num = a * N * N + 2.0 * Ns * N + Ns * Ns + Nf * Nf;
  Eigen::Vector3d j;
  j[0] = N * N / (D * D);
  j[1] = (2.0 * N + 2.0 * Ns) / (D * D) - 2.0 * num / (D * D * D);
  j[2] = 2.0 * Nf / (D * D) - 2.0 * num / (D * D * D);
  return j;
}

struct G2Data {
  ArrayXd N, y, sig;
};

// Levenberg-Marquardt on the (possibly reduced) free-parameter set.
// free mask: which of (a, Ns, Nf) float.
bool lm_g2(const G2Data& d, Eigen::Vector3d& p, const std::array<bool, 3>& free_mask,
           MatrixXd* cov_out, double* resid_out) {
  const auto n = d.N.size();
  std::vector<int> free_idx;
  for (int k = 0; k < 3; ++k)
    if (free_mask[k]) free_idx.push_back(k);
  const int np = int(free_idx.size());
  double lambda = 1e-3;
  auto chi2_of = [&](const Eigen::Vector3d& q) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = (g2_model_eval(d.N[i], q[0], q[1], q[2]) - d.y[i]) / d.sig[i];
      c += r * r;
    }
    return c;
  };
  double chi2 = chi2_of(p);
  bool converged = false;
  for (int it = 0; it < 400 && !converged; ++it) {
    MatrixXd J(n, np);
    VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto jf = g2_model_jac(d.N[i], p[0], p[1], p[2]);
      for (int k = 0; k < np; ++k) J(i, k) = jf[free_idx[k]] / d.sig[i];
      r[i] = (g2_model_eval(d.N[i], p[0], p[1], p[2]) - d.y[i]) / d.sig[i];
    }
    MatrixXd H = J.transpose() * J;
    VectorXd g = J.transpose() * r;
    bool stepped = false;
    for (int tries = 0; tries < 60; ++tries) {
      MatrixXd Hd = H;
      for (int k = 0; k < np; ++k) Hd(k, k) *= (1.0 + lambda);
      Eigen::LDLT<MatrixXd> ldlt(Hd);
      if (ldlt.info() != Eigen::Success) { lambda *= 10; continue; }
      const VectorXd dp = ldlt.solve(-g);
      Eigen::Vector3d q = p;
      for (int k = 0; k < np; ++k) q[free_idx[k]] += dp[k];
      q[1] = std::max(q[1], 0.0);
      q[2] = std::max(q[2], 0.0);
      const double c2 = chi2_of(q);
      if (c2 <= chi2 * (1.0 + 1e-14) || !std::isfinite(chi2)) {
        const double step = dp.norm();
        p = q;
        const bool small = step < 1e-12 * std::max(1.0, p.norm()) || std::abs(chi2 - c2) < 1e-14 * (1.0 + chi2);
        chi2 = c2;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (small && it > 0) converged = true;
        break;
      }
      lambda *= 10;
    }
    if (!stepped) break;
  }
  if (cov_out) {
    MatrixXd J(n, np);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto jf = g2_model_jac(d.N[i], p[0], p[1], p[2]);
      for (int k = 0; k < np; ++k) J(i, k) = jf[free_idx[k]] / d.sig[i];
    }
    const MatrixXd H = J.transpose() * J;
    Eigen::FullPivLU<MatrixXd> lu(H);
    if (!lu.isInvertible()) return false;
    const MatrixXd covf = lu.inverse();
    cov_out->setZero(3, 3);
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < np; ++b) (*cov_out)(free_idx[a], free_idx[b]) = covf(a, b);
  }
  if (resid_out) *resid_out = std::sqrt(chi2);
  return converged;
}

}  // namespace

double FitResult::param(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return params[Eigen::Index(i)];
  throw std::out_of_range("FitResult: no parameter named " + name);
}

bool FitResult::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

FitResult fit_g2_model(const std::vector<StatPoint>& points, const G2FitOptions& opts) {
  if (points.size() < 4) throw std::invalid_argument("fit_g2_model: need at least 4 points");
  G2Data d;
  d.N.resize(points.size());
  d.y.resize(points.size());
  d.sig.resize(points.size());
  FitResult res;
  bool default_err = false;
  for (size_t i = 0; i < points.size(); ++i) {
    d.N[i] = points[i].N_out;
    d.y[i] = points[i].g2;
    if (points[i].g2_err > 0) {
      d.sig[i] = points[i].g2_err;
    } else {
      d.sig[i] = 0.01 * std::max(points[i].g2, 1e-6);
      default_err = true;
    }
  }
  if (default_err) res.flags.push_back("default_errors_1pct");
  const double nmax = d.N.maxCoeff();
  // `a` is identifiable only with spread in N_out
  if (!(nmax > 0) || (d.N > 0.02 * nmax).count() < 2)
    throw std::invalid_argument("fit_g2_model: rank-deficient design (a unidentifiable: need N_out spread)");

  std::array<bool, 3> free_mask{!opts.fix_a.has_value(), true, true};
  // crude but serviceable start: thermal-noise scale from the smallest-N point
  Eigen::Index i0;
  d.N.minCoeff(&i0);
  const double n0 = std::max(1e-4 * nmax, d.N[i0] + 0.05 * nmax);
  Eigen::Vector3d p(opts.fix_a.value_or(0.0), 0.5 * n0, 0.25 * n0);
  MatrixXd cov;
  double resid = 0.0;
  const bool ok = lm_g2(d, p, free_mask, &cov, &resid);
  if (!ok && !(resid < 1e-10)) {
    if (!std::isfinite(resid)) throw std::runtime_error("fit_g2_model: did not converge");
  }
  res.names = {"a", "N_SRS", "N_F"};
  res.params = VectorXd(3);
  res.params << p[0], p[1], p[2];
  res.covariance = cov;
  res.residual_norm = resid;
  res.n_points = int(points.size());
  res.converged = true;
  if (p[1] == 0.0) res.flags.push_back("N_SRS_at_bound");
  if (p[2] == 0.0) res.flags.push_back("N_F_at_bound");
  finish(res);

  if (opts.bootstrap_resamples > 0) {
    // resample residuals-free: parametric bootstrap from the fitted curve
    std::mt19937 rng(opts.bootstrap_seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    MatrixXd samples(opts.bootstrap_resamples, 3);
    for (int b = 0; b < opts.bootstrap_resamples; ++b) {
      G2Data db = d;
      for (Eigen::Index i = 0; i < db.N.size(); ++i)
        db.y[i] = g2_model_eval(db.N[i], p[0], p[1], p[2]) + nd(rng) * db.sig[i];
      Eigen::Vector3d pb = p;
      lm_g2(db, pb, free_mask, nullptr, nullptr);
      samples.row(b) = pb.transpose();
    }
    for (int k = 0; k < 3; ++k) {
      VectorXd col = samples.col(k);
      std::sort(col.data(), col.data() + col.size());
      const auto lo = Eigen::Index(std::floor(0.025 * (col.size() - 1)));
      const auto hi = Eigen::Index(std::ceil(0.975 * (col.size() - 1)));
      res.ci95[k] = {col[lo], col[hi]};
    }
    res.flags.push_back("bootstrap_ci");
  }
  return res;
}

FitResult fit_exponential(const ArrayXd& t_ns, const ArrayXd& value) {
  if (t_ns.size() < 2) throw std::invalid_argument("fit_exponential: need at least 2 points");
  if (t_ns.size() != value.size()) throw std::invalid_argument("fit_exponential: size mismatch");
  for (Eigen::Index i = 1; i < t_ns.size(); ++i)
    if (!(t_ns[i] > t_ns[i - 1]))
      throw std::invalid_argument("fit_exponential: t must be strictly increasing");
  FitResult res;
  res.names = {"amplitude", "tau_ns"};
  res.n_points = int(t_ns.size());

  // log-linear start; fall back to flagging when decay is not identifiable
  ArrayXd ly(value.size());
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    if (!(value[i] > 0)) throw std::invalid_argument("fit_exponential: values must be positive");
    ly[i] = std::log(value[i]);
  }
  const double tb = t_ns.mean(), lyb = ly.mean();
  const double sxx = ((t_ns - tb) * (t_ns - tb)).sum();
  const double sxy = ((t_ns - tb) * (ly - lyb)).sum();
  double slope = sxy / sxx;
  const double spread = value.maxCoeff() - value.minCoeff();
  if (slope >= -1e-15 || spread <= 1e-12 * std::abs(value.maxCoeff())) {
    res.params = VectorXd(2);
    res.params << value.mean(), std::numeric_limits<double>::infinity();
    res.covariance = MatrixXd::Zero(2, 2);
    res.converged = false;
    res.flags.push_back("non_identifiable_tau");
    finish(res);
    return res;
  }
  double A = std::exp(lyb - slope * tb), tau = -1.0 / slope;
  // Gauss-Newton refinement of A exp(-t/tau)
  double lambda = 1e-3;
  auto chi2_of = [&](double A_, double tau_) {
    double c = 0;
    for (Eigen::Index i = 0; i < t_ns.size(); ++i) {
      const double r = A_ * std::exp(-t_ns[i] / tau_) - value[i];
      c += r * r;
    }
    return c;
  };
  double chi2 = chi2_of(A, tau);
  MatrixXd H(2, 2);
  for (int it = 0; it < 200; ++it) {
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    H.setZero();
    for (Eigen::Index i = 0; i < t_ns.size(); ++i) {
      const double e = std::exp(-t_ns[i] / tau);
      const double r = A * e - value[i];
      Eigen::Vector2d j(e, A * e * t_ns[i] / (tau * tau));
      g += j * r;
      H += j * j.transpose();
    }
    bool stepped = false;
    for (int tries = 0; tries < 50; ++tries) {
      MatrixXd Hd = H;
      Hd(0, 0) *= (1 + lambda);
      Hd(1, 1) *= (1 + lambda);
      const Eigen::Vector2d dp = Hd.ldlt().solve(-g);
      const double An = A + dp[0], taun = tau + dp[1];
      if (taun > 0 && chi2_of(An, taun) <= chi2 * (1 + 1e-14)) {
        const double c2 = chi2_of(An, taun);
        const bool small = dp.norm() < 1e-12 * std::max({1.0, std::abs(A), std::abs(tau)});
        A = An; tau = taun; chi2 = c2;
        lambda = std::max(lambda / 3, 1e-12);
        stepped = true;
        if (small) it = 200;
        break;
      }
      lambda *= 10;
    }
    if (!stepped) break;
  }
  res.params = VectorXd(2);
  res.params << A, tau;
  res.residual_norm = std::sqrt(chi2);
  res.converged = true;
  if (tau <= 0) res.flags.push_back("nonpositive_tau");
  Eigen::FullPivLU<MatrixXd> lu(H);
  const auto n = t_ns.size();
  const double s2 = n > 2 ? chi2 / double(n - 2) : 0.0;
  res.covariance = lu.isInvertible() ? MatrixXd(lu.inverse() * s2) : MatrixXd::Zero(2, 2);
  finish(res);
  return res;
}

FitResult fit_linear(const ArrayXd& x, const ArrayXd& y) {
  if (x.size() < 2 || x.size() != y.size())
    throw std::invalid_argument("fit_linear: need >= 2 points of equal length");
  const double sxx = ((x - x.mean()) * (x - x.mean())).sum();
  if (!(sxx > 0)) throw std::invalid_argument("fit_linear: all x identical");
  const double slope = ((x - x.mean()) * (y - y.mean())).sum() / sxx;
  const double offset = y.mean() - slope * x.mean();
  FitResult res;
  res.names = {"slope", "offset"};
  res.params = VectorXd(2);
  res.params << slope, offset;
  res.n_points = int(x.size());
  res.converged = true;
  double chi2 = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = slope * x[i] + offset - y[i];
    chi2 += r * r;
  }
  res.residual_norm = std::sqrt(chi2);
  const auto n = x.size();
  const double s2 = n > 2 ? chi2 / double(n - 2) : 0.0;
  res.covariance = MatrixXd(2, 2);
  res.covariance << s2 / sxx, -s2 * x.mean() / sxx,
                    -s2 * x.mean() / sxx, s2 * (1.0 / double(n) + x.mean() * x.mean() / sxx);
  if (offset < 0) res.flags.push_back("negative_offset");
  finish(res);
  return res;
}

}  // namespace ramem

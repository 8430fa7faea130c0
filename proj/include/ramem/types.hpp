#pragma once

#include <complex>
#include <Eigen/Dense>

namespace ramem {

using Complex = std::complex<double>;
using Eigen::ArrayXd;
using Eigen::ArrayXcd;
using Eigen::ArrayXXcd;
using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
// mm per microsecond
inline constexpr double kSpeedOfLight = 299792.458;

// Internal unit system: angular frequencies in rad/us, times in us, lengths in mm.
inline double mhz_to_angular(double f_mhz) { return kTwoPi * f_mhz; }
inline double ghz_to_angular(double f_ghz) { return kTwoPi * 1e3 * f_ghz; }
inline double angular_to_ghz(double w) { return w / (kTwoPi * 1e3); }
inline double ns_to_us(double t_ns) { return 1e-3 * t_ns; }
inline double us_to_ns(double t_us) { return 1e3 * t_us; }

}  // namespace ramem

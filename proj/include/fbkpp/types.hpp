#pragma once

#include <Eigen/Dense>

#include <string>

namespace fbkpp {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vec = Vector<double>;

/// A spreading-speed value together with how it was obtained and how well
/// the fit behaved over its averaging window.
template <typename Scalar>
struct SpeedEstimate {
  Scalar value = 0;
  Scalar intercept = 0;
  Scalar rms_residual = 0;
  Scalar endpoint_ratio = 0;  // h(T)/T, for comparison with the fitted slope
  Scalar window_begin = 0;
  Scalar window_end = 0;
  std::string method;  // "front_slope" | "semiwave_flux_avg" | "shooting"
};

}  // namespace fbkpp

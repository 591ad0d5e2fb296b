#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace chartwork {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using VecFn = std::function<Vec(const Vec&)>;
using MatFn = std::function<Mat(const Vec&)>;

[[nodiscard]] inline double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }
[[nodiscard]] inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

[[nodiscard]] inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Central-difference Jacobian of f at x with a separate step per input axis.
[[nodiscard]] Mat central_jacobian(const VecFn& f, const Vec& x, const Vec& steps);

/// Central-difference gradient of a scalar function.
[[nodiscard]] Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& x, const Vec& steps);

/// steps[k] = base · (1 + |x[k]|).
[[nodiscard]] Vec scaled_steps(const Vec& x, double base);

/// ‖a − b‖max / max(1, ‖b‖max).
[[nodiscard]] double relative_discrepancy(const Mat& a, const Mat& b);

/// Brace-delimited list "(a, b, c)" with shortest round-trip formatting.
[[nodiscard]] std::string format_vec(const Vec& v);

}  // namespace chartwork

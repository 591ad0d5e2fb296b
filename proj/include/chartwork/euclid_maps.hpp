#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "chartwork/rng.hpp"

namespace chartwork::euclid {

using Vec = Eigen::VectorXd;

class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultMargin = 1e-6;

/// An explicit coordinate map between subsets of Euclidean spaces.
struct MapSpec {
    std::string name;
    int dim_in = 0;
    int dim_out = 0;
    std::function<Vec(const Vec&)> forward;
    std::function<Vec(const Vec&)> inverse;  ///< empty when no inverse is known
    /// Membership of the forward domain. Points closer than `margin` to the
    /// domain's boundary are rejected.
    std::function<bool(const Vec&, double margin)> domain;
    /// Proposes candidate points, which are filtered through `domain`.
    std::function<Vec(Rng&)> propose;
    /// Two points of the inverse's domain approaching a probe location from
    /// opposite sides at scale eps; empty when the map has no probe.
    std::function<std::pair<Vec, Vec>(double eps)> seam_probe;

    [[nodiscard]] bool has_inverse() const noexcept { return static_cast<bool>(inverse); }
};

struct RoundTripReport {
    std::string map;
    std::size_t samples = 0;
    /// max ‖f⁻¹(f(x)) − x‖∞ over sampled x.
    double max_error = 0.0;
    Vec worst_point;
    /// max ‖f(f⁻¹(y)) − y‖∞ / max(1, ‖y‖∞) over the images y = f(x).
    /// Diagnostic only: f is ill-conditioned near the boundary of its domain.
    double image_max_rel_error = 0.0;
    double tolerance = 0.0;
    double margin = 0.0;
    std::uint64_t seed = 0;
    bool passed = false;
};

/// f(x) = x / (1 − x²) on (−1, 1).
[[nodiscard]] MapSpec interval_line();
/// f(x) = (2x − 1) / (x(x − 1)) on (0, 1).
[[nodiscard]] MapSpec interval_ratio();
/// F(x) = x / (1 − |x|²) on the open unit ball of ℝⁿ.
[[nodiscard]] MapSpec ball_space(int n);
/// Cube surface max|xᵢ| = 1 → S² by radial normalization.
[[nodiscard]] MapSpec cube_sphere();
/// S¹ → square perimeter max|xᵢ| = 1 by outward radial projection.
[[nodiscard]] MapSpec circle_square();
/// Upper hemisphere of S^{n−1} ⊂ ℝⁿ → open unit disc of ℝ^{n−1}.
[[nodiscard]] MapSpec hemisphere_disc(int n);
/// g(t) = (cos 2πt, sin 2πt) on [0, 1): continuous and bijective, but the
/// inverse jumps at (1, 0).
[[nodiscard]] MapSpec circle_param();
[[nodiscard]] MapSpec identity(int n);

/// interval_line, interval_ratio, ball_space(1..3), cube_sphere,
/// circle_square, hemisphere_disc(2..3), circle_param.
[[nodiscard]] std::vector<MapSpec> catalog();

/// Looks up a catalog entry by name; also accepts "ball-space-<n>",
/// "hemisphere-disc-<n>" and "identity-<n>" for any n ≥ 1 (≥ 2 for the hemisphere).
[[nodiscard]] std::optional<MapSpec> find_map(const std::string& name);

/// Deterministic in-domain samples (with the given boundary margin).
[[nodiscard]] std::vector<Vec> sample_domain(const MapSpec& map, std::size_t n, std::uint64_t seed,
                                             double margin = kDefaultMargin);

[[nodiscard]] RoundTripReport check_round_trip(const MapSpec& map, std::size_t n_samples, std::uint64_t seed,
                                               double tol, double margin = kDefaultMargin);

/// ‖f⁻¹(a) − f⁻¹(b)‖∞ for the map's seam probe pair at scale eps.
/// A value that does not shrink with eps certifies a discontinuity of f⁻¹.
[[nodiscard]] double detect_inverse_jump(const MapSpec& map, double approach_eps);

}  // namespace chartwork::euclid

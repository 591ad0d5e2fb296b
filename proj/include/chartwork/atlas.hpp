#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chartwork/numeric.hpp"
#include "chartwork/rng.hpp"

namespace chartwork::atlas {

class UnknownChartError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class OutsideOverlapError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class EmptyDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Membership test with a boundary margin: points closer than `margin`
/// to the boundary of the (open) set are rejected.
using MarginPredicate = std::function<bool(const Vec&, double margin)>;

/// Axis-aligned box used to propose chart coordinates.
struct CoordBox {
    Vec lo;
    Vec hi;
};

/// A coordinate homeomorphism from an open set of the manifold onto an open
/// set of ℝⁿ. Points of the manifold are represented by ambient coordinates.
struct Chart {
    std::string id;
    int dim = 0;
    VecFn forward;   ///< ambient point → coordinates
    VecFn inverse;   ///< coordinates → ambient point
    MarginPredicate domain;        ///< on ambient points
    MarginPredicate coord_domain;  ///< on coordinates (the image of the domain)
    CoordBox box;
    /// Optional closed-form derivatives: ∂forward/∂ambient (dim × N) and
    /// ∂inverse/∂coords (N × dim). Transition Jacobians are formed from them.
    MatFn forward_jacobian;
    MatFn inverse_jacobian;

    [[nodiscard]] bool has_analytic_jacobians() const noexcept {
        return static_cast<bool>(forward_jacobian) && static_cast<bool>(inverse_jacobian);
    }
};

using Distance = std::function<double(const Vec&, const Vec&)>;

struct ManifoldSpec {
    std::string name;
    int dim = 0;
    int ambient_dim = 0;
    std::vector<Chart> atlas;
    /// Deterministic generator of ambient points spread over the manifold.
    std::function<Vec(Rng&)> sample;
    /// Fixed points always included in covering and chart checks.
    std::vector<Vec> landmarks;
    /// Distance between ambient representatives; max-abs difference when empty.
    Distance distance;
    /// Documentation flags only; neither is verified.
    bool connected_claim = true;
    bool second_countable_claim = true;

    [[nodiscard]] const Chart& chart(std::string_view id) const;
    [[nodiscard]] std::size_t chart_index(std::string_view id) const;
    [[nodiscard]] double dist(const Vec& a, const Vec& b) const;
    /// First chart (atlas order) whose domain contains p with the given margin.
    [[nodiscard]] const Chart* covering_chart(const Vec& p, double margin = 0.0) const;
};

struct VerifyConfig {
    std::uint64_t seed = 0;
    std::size_t samples = 1000;
    double roundtrip_tol = 1e-10;   ///< chart inverse(forward(P)) = P
    double transition_tol = 1e-9;   ///< T_ji ∘ T_ij = id
    double det_floor = 1e-8;
    double fd_tol = 1e-4;           ///< Richardson agreement, relative
    double fd_step = 1e-4;          ///< base step, scaled by 1 + |coordinate|
    double margin = 1e-3;           ///< boundary margin for sampling
    std::size_t min_overlap = 200;  ///< fewer accepted samples: thin overlap
    /// Only accept overlap samples whose source coordinates all satisfy
    /// |x_k| ≥ min_abs_coord (0 disables the filter).
    double min_abs_coord = 0.0;
};

/// φ_to ∘ φ_from⁻¹ on φ_from(U_from ∩ U_to).
struct TransitionFn {
    std::string from;
    std::string to;
    VecFn map;
    /// Chain rule over the charts' closed-form derivatives; empty otherwise.
    MatFn analytic_jacobian;
    /// Membership of the overlap, in `from` coordinates.
    MarginPredicate in_overlap;
    /// Accepted overlap samples in `from` coordinates.
    std::vector<Vec> overlap_samples;

    [[nodiscard]] bool empty_overlap() const noexcept { return overlap_samples.empty(); }
    [[nodiscard]] Vec operator()(const Vec& x) const { return map(x); }
};

/// Samples are drawn from `config` (seed, samples, margin, min_abs_coord);
/// pass samples = 0 to skip sampling.
[[nodiscard]] TransitionFn transition(const ManifoldSpec& m, std::string_view to, std::string_view from,
                                      const VerifyConfig& config = {});

/// Proposes chart coordinates: half uniform over the box, half with
/// log-uniform magnitudes down to 1e-6 of the box scale, so neighborhoods of
/// the origin are well represented.
[[nodiscard]] Vec propose_coords(const Chart& chart, Rng& rng);

/// Accepted overlap samples in `from` coordinates.
[[nodiscard]] std::vector<Vec> sample_overlap(const Chart& from, const Chart& to, const VerifyConfig& config);

enum class JacobianMode { Auto, Analytic, FiniteDifference };

struct JacobianEstimate {
    Mat value;             ///< analytic, or the h/2 central-difference estimate
    Mat fd_coarse;         ///< step h (empty for analytic)
    Mat fd_fine;           ///< step h/2 (empty for analytic)
    double richardson = 0; ///< relative discrepancy between the two FD estimates
    Vec steps;             ///< per-axis h actually used
    bool analytic = false;
};

/**
 * Central-difference Jacobian at steps h and h/2.
 *
 * The step on axis k is base·(1 + |x_k|), capped at 1/100 of the distance to
 * the boundary of `inside` along that axis, so the stencil resolves the
 * function's scale near the edge of its domain. The distance is found by
 * scanning x ± t·e_k outwards in increments of `probe_spacing` up to
 * 100·base·(1 + |x_k|); excluded sets narrower than the spacing can be
 * missed. With probe_spacing = 0 only the endpoints are tested, halving
 * until both are inside. Throws OutsideOverlapError when x has no room for
 * any stencil.
 */
[[nodiscard]] JacobianEstimate fd_jacobian(const VecFn& f, const std::function<bool(const Vec&)>& inside,
                                           const Vec& x, double base_step = 1e-4, double probe_spacing = 0.0);

/// Auto: analytic when available, else finite differences. In finite
/// difference mode the step is quartered while the h and h/2 estimates
/// disagree, and the value is their Richardson extrapolation.
[[nodiscard]] JacobianEstimate jacobian(const TransitionFn& t, const Vec& point, JacobianMode mode = JacobianMode::Auto,
                                        double base_step = 1e-4);

struct Witness {
    std::string check;  ///< roundtrip | jacobian-det | smoothness | covering | chart-roundtrip | coord-domain
    std::string from;
    std::string to;
    Vec coords;         ///< source coordinates (ambient point for covering)
    double value = 0;
};

struct CompatibilityReport {
    std::string chart_a;
    std::string chart_b;
    std::size_t overlap_samples = 0;  ///< both directions together
    bool thin_overlap = false;
    double roundtrip_max_error = 0;
    double min_abs_det = 0;           ///< +inf when there are no samples
    double max_fd_discrepancy = 0;
    bool smoothness_flag = true;      ///< no smoothness violation found
    bool passed = true;
    std::vector<Witness> witnesses;   ///< worst sample per failed check
};

struct ChartReport {
    std::string chart;
    std::size_t samples = 0;
    double roundtrip_max_error = 0;
    bool passed = true;
    std::optional<Witness> witness;
};

struct AtlasReport {
    std::string manifold;
    VerifyConfig config;
    std::size_t covering_samples = 0;
    std::size_t uncovered = 0;
    std::optional<Witness> covering_witness;
    std::vector<ChartReport> charts;
    std::vector<CompatibilityReport> pairs;
    bool passed = true;
};

/// Cʳ-compatibility proxy for two charts on sampled overlap points, both
/// directions: round trip, non-vanishing Jacobian determinant, and
/// Richardson agreement of finite-difference Jacobians. An empty overlap is
/// vacuously compatible.
[[nodiscard]] CompatibilityReport check_compatibility(const ManifoldSpec& m, std::string_view a, std::string_view b,
                                                      const VerifyConfig& config = {});

/// Covering (margin 0), per-chart round trip and pairwise compatibility.
[[nodiscard]] AtlasReport verify_atlas(const ManifoldSpec& m, const VerifyConfig& config = {});

/// Same manifold, charts of both atlases. Ids of `b` that clash with `a`
/// get a "b:" prefix.
[[nodiscard]] ManifoldSpec atlas_union(const ManifoldSpec& a, const ManifoldSpec& b);

struct EquivalenceReport {
    std::string atlas_a;
    std::string atlas_b;
    AtlasReport union_report;
    std::vector<std::size_t> cross_pairs;  ///< indices into union_report.pairs
    bool passed = true;
    std::vector<Witness> witnesses;        ///< from the failing cross pairs
};

/// Two atlases of the same manifold are equivalent when their union is an atlas.
[[nodiscard]] EquivalenceReport atlases_equivalent(const ManifoldSpec& a, const ManifoldSpec& b,
                                                   const VerifyConfig& config = {});

enum class GlComponent { Plus, Minus };

class NotInGlError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Sign of the determinant; |det| ≤ singular_floor is not in GLₙ.
[[nodiscard]] GlComponent classify_gl_component(const Mat& matrix, double singular_floor = 1e-12);

/// Row-major flattening M(n×k) → ℝ^{n·k} and back.
[[nodiscard]] Vec flatten(const Mat& m);
[[nodiscard]] Mat unflatten(const Vec& v, Eigen::Index rows, Eigen::Index cols);

}  // namespace chartwork::atlas

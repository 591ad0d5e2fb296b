#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "chartwork/atlas.hpp"

namespace chartwork::atlas {

/// ψ ∘ f ∘ φ⁻¹ for a map f between manifolds, with its effective domain.
struct CoordExpression {
    std::string src_chart;
    std::string dst_chart;
    VecFn map;
    MarginPredicate in_domain;  ///< on source coordinates

    [[nodiscard]] Vec operator()(const Vec& x) const { return map(x); }
};

/// `f` maps ambient points of `src` to ambient points of `dst`.
[[nodiscard]] CoordExpression coord_expression(const VecFn& f, const ManifoldSpec& src, std::string_view src_chart,
                                               const ManifoldSpec& dst, std::string_view dst_chart);

struct SmoothMapReport {
    std::string src_chart;
    std::string dst_chart;
    std::size_t samples = 0;
    double max_fd_discrepancy = 0;
    bool smoothness_flag = true;
    std::optional<Witness> smoothness_witness;
    /// Chart independence: max |E'(T(x)) − S(E(x))| over shared samples,
    /// where E, E' are the expressions in the two chart choices and T, S the
    /// source and target transitions.
    bool independence_checked = false;
    std::size_t independence_samples = 0;
    double independence_max_error = 0;
    std::optional<Witness> independence_witness;
    double fd_tol = 0;
    double independence_tol = 0;
    bool passed = true;
};

/// Smoothness proxy of ψ∘f∘φ⁻¹ on sampled source coordinates and, when
/// `alternate` (source chart, target chart) is given, agreement of the two
/// coordinate expressions up to the transitions (tolerance transition_tol).
/// Throws EmptyDomainError when no sample lands in the effective domain.
[[nodiscard]] SmoothMapReport check_smooth_map(const VecFn& f, const ManifoldSpec& src, std::string_view src_chart,
                                               const ManifoldSpec& dst, std::string_view dst_chart,
                                               const VerifyConfig& config = {},
                                               const std::optional<std::pair<std::string, std::string>>& alternate = {});

}  // namespace chartwork::atlas

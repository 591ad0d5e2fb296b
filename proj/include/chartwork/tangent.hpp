#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chartwork/atlas.hpp"

namespace chartwork::tangent {

using atlas::Chart;
using atlas::ManifoldSpec;

/// A difference stencil left the chart's domain.
class StencilError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ChartDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Step base for manifold partials: h = 1e-5 · (1 + |x|).
inline constexpr double kPartialStep = 1e-5;

/// Xᴾ = Σ Xᴾⁱ ∂/∂xⁱ|ᴾ: components in the natural basis of one chart.
struct TangentVector {
    std::string manifold;
    Vec point;  ///< ambient coordinates of P
    std::string chart_id;
    Vec components;
};

/// Validates that the point lies in the chart and the component count is dim.
[[nodiscard]] TangentVector make_vector(const ManifoldSpec& m, Vec point, std::string chart_id, Vec components);

/// The natural basis vector ∂/∂xⁱ at P.
[[nodiscard]] TangentVector basis_vector(const ManifoldSpec& m, const Vec& point, const std::string& chart_id, int i);

/// Ambient function on the manifold. `partials` optionally gives, per chart
/// id, the coordinate gradient of f∘φ⁻¹.
struct ScalarField {
    std::string manifold;
    std::function<double(const Vec&)> eval;
    std::map<std::string, std::function<Vec(const Vec&)>> partials;

    [[nodiscard]] double operator()(const Vec& p) const { return eval(p); }
};

/// The coordinate function xⁱ of a chart, as a scalar field.
[[nodiscard]] ScalarField coordinate_function(const ManifoldSpec& m, const std::string& chart_id, int i);

/// Gradient of f∘φ⁻¹ at φ(P) by central differences, refined while the h and
/// h/2 estimates disagree and Richardson-extrapolated.
/// Throws StencilError when a stencil point leaves the chart.
[[nodiscard]] Vec coordinate_gradient(const Chart& chart, const std::function<double(const Vec&)>& f, const Vec& coords,
                                      double step = kPartialStep);

/// Xᴾ(f) = Σᵢ Xᴾⁱ · ∂ᵢ(f∘φ⁻¹)(φ(P)).
[[nodiscard]] double apply(const ManifoldSpec& m, const TangentVector& v, const ScalarField& f,
                           double step = kPartialStep);

/// J[i][j] = ∂x′ⁱ/∂xʲ at P, x = chart `from`, x′ = chart `to` (analytic when
/// both charts have closed-form derivatives, else finite differences).
[[nodiscard]] Mat change_of_basis(const ManifoldSpec& m, const Vec& point, const std::string& from,
                                  const std::string& to);

/// Components transform contravariantly: X′ = J · X.
[[nodiscard]] TangentVector change_chart(const ManifoldSpec& m, const TangentVector& v, const std::string& target);

struct DerivationCheck {
    double lhs = 0;
    double rhs = 0;
    double error = 0;  ///< |lhs − rhs|
    double tol = 0;
    bool passed = false;  ///< error ≤ tol · (1 + |lhs|)
};

/// X(fg) against X(f)·g(P) + f(P)·X(g).
[[nodiscard]] DerivationCheck check_leibniz(const ManifoldSpec& m, const TangentVector& v, const ScalarField& f,
                                            const ScalarField& g, double tol);

/// X(F(g₁,…,g_k)) against Σ ∂F/∂gᵢ · X(gᵢ). `outer_gradient` may be empty,
/// in which case ∂F/∂gᵢ is taken by central differences.
[[nodiscard]] DerivationCheck check_chain_rule(const ManifoldSpec& m, const TangentVector& v,
                                               const std::function<double(const Vec&)>& outer,
                                               const std::function<Vec(const Vec&)>& outer_gradient,
                                               const std::vector<ScalarField>& inner, double tol);

/// Induced chart on TM: (P, w) ↦ (φ(P), Dφ(P)·w), with ambient tangent
/// vectors w ∈ ℝᴺ. Needs the chart's closed-form derivatives.
[[nodiscard]] Chart bundle_chart(const ManifoldSpec& m, const Chart& chart);

/// TM as a 2n-dimensional manifold in ℝ²ᴺ with the induced atlas.
[[nodiscard]] ManifoldSpec bundle(const ManifoldSpec& m);

/// Components of a field per chart, in order of preference.
struct VectorField {
    std::string manifold;
    std::vector<std::pair<std::string, VecFn>> components;  ///< chart id → (coords ↦ Xⁱ)
};

/// Tangent vector of X at P in the first listed chart whose domain holds P.
[[nodiscard]] TangentVector field_eval(const ManifoldSpec& m, const VectorField& x, const Vec& point);

/// P ↦ Xᴾ(f).
[[nodiscard]] ScalarField lie_derivative(const ManifoldSpec& m, const VectorField& x, const ScalarField& f);

struct FieldConsistencyReport {
    std::size_t pairs = 0;
    std::size_t samples = 0;
    double max_error = 0;  ///< max ‖J·Xᵢ − Xⱼ‖∞ / (1 + ‖Xⱼ‖∞)
    std::optional<atlas::Witness> witness;
    double tol = 0;
    bool passed = true;
};

/// On sampled overlaps of every pair of listed charts, the components pushed
/// through change_of_basis must match the other chart's components.
[[nodiscard]] FieldConsistencyReport check_field_consistency(const ManifoldSpec& m, const VectorField& x,
                                                             std::size_t samples, std::uint64_t seed, double tol);

/// Rotation about the x³-axis on sphere-stereo: (−η, ζ) in both charts.
[[nodiscard]] VectorField sphere_rotation_field();

}  // namespace chartwork::tangent

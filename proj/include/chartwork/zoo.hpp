#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chartwork/atlas.hpp"

namespace chartwork::zoo {

using atlas::ManifoldSpec;

class UnknownBuiltinError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// ℝⁿ with the single identity chart "id".
[[nodiscard]] ManifoldSpec euclidean(int n);

/// Graph of f: ℝⁿ → ℝ in ℝⁿ⁺¹ with the chart "graph" dropping the last
/// coordinate. `gradient` enables analytic chart Jacobians.
[[nodiscard]] ManifoldSpec graph_manifold(std::string name, int n, std::function<double(const Vec&)> f,
                                          std::function<Vec(const Vec&)> gradient = {});

/// S² with the six vertical hemisphere projections, ids x3pos, x3neg, x2pos,
/// x2neg, x1pos, x1neg (the chart on the half x_k ≷ 0 drops coordinate k).
[[nodiscard]] ManifoldSpec sphere_hemispheres();

/// S² with the stereographic charts "north" (projection from (0,0,1)) and
/// "south" (projection from (0,0,−1)).
[[nodiscard]] ManifoldSpec sphere_stereo();

/// Only the charts x3pos and x3neg: the equator is left uncovered.
[[nodiscard]] ManifoldSpec sphere_truncated();

/// Canonical representative of the class of v ≠ 0 in ℝP²: unit Euclidean
/// norm with the first nonzero coordinate positive.
[[nodiscard]] Vec rp2_normalize(const Vec& v);

/// ℝP² as canonical unit triples with the charts u1, u2, u3 on x_i ≠ 0,
/// e.g. u1: (x¹:x²:x³) ↦ (x²/x¹, x³/x¹).
[[nodiscard]] ManifoldSpec projective_plane();

/// ℝ with the chart "id".
[[nodiscard]] ManifoldSpec real_line();
/// ℝ with the chart "cube": x ↦ x³, a homeomorphism whose inverse is not smooth at 0.
[[nodiscard]] ManifoldSpec cubic_line();
/// ℝ with both charts "id" and "cube".
[[nodiscard]] ManifoldSpec real_line_cubic();

/// S¹ ⊂ ℝ² with angle charts "a" on (−π, π) and "b" on (0, 2π).
[[nodiscard]] ManifoldSpec circle();

/// Charts are all pairs "i*j"; dimension and ambient space add up.
[[nodiscard]] ManifoldSpec product(const ManifoldSpec& m1, const ManifoldSpec& m2);

/// S¹ × ℝ.
[[nodiscard]] ManifoldSpec cylinder();

/// S¹ × … × S¹ (k factors).
[[nodiscard]] ManifoldSpec torus(int k);

/// GLₙ⁺(ℝ) or GLₙ⁻(ℝ) as an open subset of ℝ^{n²} with the single
/// flattening chart "flat".
[[nodiscard]] ManifoldSpec gl_component(int n, atlas::GlComponent component);

/// Names accepted by builtin(), with the default parameter where one applies.
[[nodiscard]] std::vector<std::string> builtin_names();

/// Looks up a zoo entry: "name" or "name:k" (also "name(k)"); underscores
/// are accepted in place of hyphens.
[[nodiscard]] ManifoldSpec builtin(const std::string& name);

}  // namespace chartwork::zoo

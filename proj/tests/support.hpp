#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "chartwork/tangent.hpp"

namespace chartwork::testing {

inline Vec gaussian_vec(Rng& rng, Eigen::Index n, double scale = 1.0) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = scale * rng.gaussian();
    }
    return v;
}

/// f(p) = a·p + Σ bₖpₖ² + c·sin(d·p) + e·exp(0.3·g·p) with random coefficients.
inline tangent::ScalarField random_field(Rng& rng, const std::string& manifold, int ambient_dim) {
    const Vec a = gaussian_vec(rng, ambient_dim);
    const Vec b = gaussian_vec(rng, ambient_dim);
    const Vec d = gaussian_vec(rng, ambient_dim);
    const Vec g = gaussian_vec(rng, ambient_dim);
    const double c = rng.gaussian();
    const double e = rng.gaussian();
    tangent::ScalarField f;
    f.manifold = manifold;
    f.eval = [=](const Vec& p) {
        return a.dot(p) + b.dot(Vec(p.cwiseProduct(p))) + c * std::sin(d.dot(p)) + e * std::exp(0.3 * g.dot(p));
    };
    return f;
}

struct ChartedPoint {
    Vec point;
    std::string chart;
    std::vector<std::string> others;  ///< further charts whose domain holds the point
};

/// A sampled point, a chart holding it with a comfortable margin, and every
/// other chart that also holds it.
inline ChartedPoint random_charted_point(const atlas::ManifoldSpec& m, Rng& rng, double margin = 1e-2) {
    while (true) {
        ChartedPoint cp;
        cp.point = m.sample(rng);
        std::vector<std::string> holding;
        for (const auto& c : m.atlas) {
            if (c.domain(cp.point, margin) && c.coord_domain(c.forward(cp.point), margin)) {
                holding.push_back(c.id);
            }
        }
        if (holding.empty()) {
            continue;
        }
        const auto pick = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(holding.size())));
        cp.chart = holding[std::min(pick, holding.size() - 1)];
        for (const auto& id : holding) {
            if (id != cp.chart) {
                cp.others.push_back(id);
            }
        }
        return cp;
    }
}

}  // namespace chartwork::testing

#include "chartwork/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chartwork::tangent {

namespace {

constexpr double kFiberHalfWidth = 4.0;
constexpr int kMaxRefinements = 8;
constexpr double kRefineTol = 1e-9;

bool chart_contains(const Chart& chart, const Vec& coords) {
    if (!all_finite(coords) || !chart.coord_domain(coords, 0.0)) {
        return false;
    }
    const Vec p = chart.inverse(coords);
    return all_finite(p) && chart.domain(p, 0.0);
}

void require_in_chart(const Chart& chart, const Vec& point) {
    if (!chart.domain(point, 0.0)) {
        throw ChartDomainError("point " + format_vec(point) + " is outside chart '" + chart.id + "'");
    }
}

Vec stacked(const Vec& a, const Vec& b) {
    Vec v(a.size() + b.size());
    v << a, b;
    return v;
}

}  // namespace

TangentVector make_vector(const ManifoldSpec& m, Vec point, std::string chart_id, Vec components) {
    if (point.size() != m.ambient_dim) {
        throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, ambient dimension is " +
                                    std::to_string(m.ambient_dim));
    }
    if (components.size() != m.dim) {
        throw std::invalid_argument("tangent vector needs " + std::to_string(m.dim) + " components, got " +
                                    std::to_string(components.size()));
    }
    require_in_chart(m.chart(chart_id), point);
    return {m.name, std::move(point), std::move(chart_id), std::move(components)};
}

TangentVector basis_vector(const ManifoldSpec& m, const Vec& point, const std::string& chart_id, int i) {
    if (i < 0 || i >= m.dim) {
        throw std::out_of_range("basis index out of range");
    }
    return make_vector(m, point, chart_id, Vec::Unit(m.dim, i));
}

ScalarField coordinate_function(const ManifoldSpec& m, const std::string& chart_id, int i) {
    const Chart chart = m.chart(chart_id);
    if (i < 0 || i >= chart.dim) {
        throw std::out_of_range("coordinate index out of range");
    }
    ScalarField f;
    f.manifold = m.name;
    f.eval = [chart, i](const Vec& p) { return chart.forward(p)[i]; };
    return f;
}

Vec coordinate_gradient(const Chart& chart, const std::function<double(const Vec&)>& f, const Vec& coords, double step) {
    const Vec steps = scaled_steps(coords, step);
    for (Eigen::Index k = 0; k < coords.size(); ++k) {
        for (double s : {1.0, -1.0}) {
            Vec q = coords;
            q[k] += s * steps[k];
            if (!chart_contains(chart, q)) {
                throw StencilError("difference stencil at " + format_vec(coords) + " leaves chart '" + chart.id + "'");
            }
        }
    }
    const auto g = [&](const Vec& x) { return f(chart.inverse(x)); };
    const auto discrepancy = [](const Vec& a, const Vec& b) { return max_abs(Vec(a - b)) / std::max(1.0, max_abs(b)); };
    Vec h = steps;
    Vec coarse = central_gradient(g, coords, h);
    Vec fine = central_gradient(g, coords, Vec(h / 2.0));
    double disc = discrepancy(coarse, fine);
    for (int i = 0; i < kMaxRefinements && disc > kRefineTol; ++i) {
        h /= 4.0;
        Vec c2 = central_gradient(g, coords, h);
        Vec f2 = central_gradient(g, coords, Vec(h / 2.0));
        const double d2 = discrepancy(c2, f2);
        if (d2 >= disc) {
            break;
        }
        coarse = std::move(c2);
        fine = std::move(f2);
        disc = d2;
    }
    return fine + (fine - coarse) / 3.0;
}

double apply(const ManifoldSpec& m, const TangentVector& v, const ScalarField& f, double step) {
    const Chart& chart = m.chart(v.chart_id);
    require_in_chart(chart, v.point);
    const Vec coords = chart.forward(v.point);
    const auto analytic = f.partials.find(v.chart_id);
    const Vec grad =
        analytic != f.partials.end() ? analytic->second(coords) : coordinate_gradient(chart, f.eval, coords, step);
    return grad.dot(v.components);
}

Mat change_of_basis(const ManifoldSpec& m, const Vec& point, const std::string& from, const std::string& to) {
    const Chart& src = m.chart(from);
    const Chart& dst = m.chart(to);
    require_in_chart(src, point);
    require_in_chart(dst, point);
    if (from == to) {
        return Mat::Identity(m.dim, m.dim);
    }
    const Vec coords = src.forward(point);
    if (src.has_analytic_jacobians() && dst.has_analytic_jacobians()) {
        return dst.forward_jacobian(point) * src.inverse_jacobian(coords);
    }
    atlas::VerifyConfig no_samples;
    no_samples.samples = 0;
    const auto t = atlas::transition(m, to, from, no_samples);
    return atlas::jacobian(t, coords, atlas::JacobianMode::FiniteDifference).value;
}

TangentVector change_chart(const ManifoldSpec& m, const TangentVector& v, const std::string& target) {
    TangentVector out = v;
    out.chart_id = target;
    out.components = change_of_basis(m, v.point, v.chart_id, target) * v.components;
    return out;
}

DerivationCheck check_leibniz(const ManifoldSpec& m, const TangentVector& v, const ScalarField& f,
                              const ScalarField& g, double tol) {
    ScalarField fg;
    fg.manifold = m.name;
    fg.eval = [&](const Vec& p) { return f.eval(p) * g.eval(p); };
    DerivationCheck r;
    r.tol = tol;
    r.lhs = apply(m, v, fg);
    r.rhs = apply(m, v, f) * g.eval(v.point) + f.eval(v.point) * apply(m, v, g);
    r.error = std::abs(r.lhs - r.rhs);
    r.passed = r.error <= tol * (1.0 + std::abs(r.lhs));
    return r;
}

DerivationCheck check_chain_rule(const ManifoldSpec& m, const TangentVector& v,
                                 const std::function<double(const Vec&)>& outer,
                                 const std::function<Vec(const Vec&)>& outer_gradient,
                                 const std::vector<ScalarField>& inner, double tol) {
    const auto k = static_cast<Eigen::Index>(inner.size());
    const auto inner_values = [&](const Vec& p) {
        Vec g(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            g[i] = inner[static_cast<std::size_t>(i)].eval(p);
        }
        return g;
    };
    ScalarField composite;
    composite.manifold = m.name;
    composite.eval = [&](const Vec& p) { return outer(inner_values(p)); };

    const Vec g_at_p = inner_values(v.point);
    const Vec dF = outer_gradient ? outer_gradient(g_at_p)
                                  : central_gradient(outer, g_at_p, scaled_steps(g_at_p, kPartialStep));
    DerivationCheck r;
    r.tol = tol;
    r.lhs = apply(m, v, composite);
    for (Eigen::Index i = 0; i < k; ++i) {
        r.rhs += dF[i] * apply(m, v, inner[static_cast<std::size_t>(i)]);
    }
    r.error = std::abs(r.lhs - r.rhs);
    r.passed = r.error <= tol * (1.0 + std::abs(r.lhs));
    return r;
}

Chart bundle_chart(const ManifoldSpec& m, const Chart& chart) {
    if (!chart.has_analytic_jacobians()) {
        throw std::invalid_argument("chart '" + chart.id + "' has no closed-form derivatives for the bundle chart");
    }
    const int big_n = m.ambient_dim;
    const int n = chart.dim;
    Chart c;
    c.id = chart.id;
    c.dim = 2 * n;
    c.forward = [chart, big_n](const Vec& pw) {
        const Vec p = pw.head(big_n);
        return stacked(chart.forward(p), chart.forward_jacobian(p) * pw.tail(big_n));
    };
    c.inverse = [chart, n](const Vec& cu) {
        const Vec x = cu.head(n);
        return stacked(chart.inverse(x), chart.inverse_jacobian(x) * cu.tail(n));
    };
    c.domain = [chart, big_n](const Vec& pw, double margin) { return chart.domain(pw.head(big_n), margin); };
    c.coord_domain = [chart, n](const Vec& cu, double margin) { return chart.coord_domain(cu.head(n), margin); };
    c.box = {stacked(chart.box.lo, Vec::Constant(n, -kFiberHalfWidth)),
             stacked(chart.box.hi, Vec::Constant(n, kFiberHalfWidth))};
    return c;
}

ManifoldSpec bundle(const ManifoldSpec& m) {
    ManifoldSpec t;
    t.name = "T(" + m.name + ")";
    t.dim = 2 * m.dim;
    t.ambient_dim = 2 * m.ambient_dim;
    for (const auto& chart : m.atlas) {
        t.atlas.push_back(bundle_chart(m, chart));
    }
    t.sample = [m](Rng& rng) {
        while (true) {
            const Vec p = m.sample(rng);
            const Chart* chart = m.covering_chart(p);
            if (chart == nullptr) {
                continue;
            }
            Vec u(m.dim);
            for (int i = 0; i < m.dim; ++i) {
                u[i] = rng.gaussian();
            }
            return stacked(p, chart->inverse_jacobian(chart->forward(p)) * u);
        }
    };
    for (const auto& p : m.landmarks) {
        t.landmarks.push_back(stacked(p, Vec::Zero(m.ambient_dim)));
    }
    const int big_n = m.ambient_dim;
    t.distance = [m, big_n](const Vec& a, const Vec& b) {
        return std::max(m.dist(a.head(big_n), b.head(big_n)), max_abs(Vec(a.tail(big_n) - b.tail(big_n))));
    };
    t.connected_claim = m.connected_claim;
    return t;
}

TangentVector field_eval(const ManifoldSpec& m, const VectorField& x, const Vec& point) {
    for (const auto& [id, comp] : x.components) {
        const Chart& chart = m.chart(id);
        if (chart.domain(point, 0.0)) {
            return make_vector(m, point, id, comp(chart.forward(point)));
        }
    }
    throw ChartDomainError("point " + format_vec(point) + " is not covered by any chart of the field");
}

ScalarField lie_derivative(const ManifoldSpec& m, const VectorField& x, const ScalarField& f) {
    ScalarField out;
    out.manifold = m.name;
    out.eval = [m, x, f](const Vec& p) { return apply(m, field_eval(m, x, p), f); };
    return out;
}

FieldConsistencyReport check_field_consistency(const ManifoldSpec& m, const VectorField& x, std::size_t samples,
                                               std::uint64_t seed, double tol) {
    FieldConsistencyReport rep;
    rep.tol = tol;
    atlas::VerifyConfig cfg;
    cfg.seed = seed;
    cfg.samples = samples;
    const auto check = [&](const auto& from, const auto& to) {
        const auto& [id_i, comp_i] = from;
        const auto& [id_j, comp_j] = to;
        const Chart& ci = m.chart(id_i);
        const Chart& cj = m.chart(id_j);
        for (const auto& c : atlas::sample_overlap(ci, cj, cfg)) {
            const Vec p = ci.inverse(c);
            const Vec pushed = change_of_basis(m, p, id_i, id_j) * comp_i(c);
            const Vec target = comp_j(cj.forward(p));
            const double err = max_abs(Vec(pushed - target)) / (1.0 + max_abs(target));
            ++rep.samples;
            if (!(err <= rep.max_error)) {
                rep.max_error = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
                rep.witness = atlas::Witness{"field-consistency", id_i, id_j, c, err};
            }
        }
    };
    for (std::size_t i = 0; i < x.components.size(); ++i) {
        for (std::size_t j = i + 1; j < x.components.size(); ++j) {
            ++rep.pairs;
            check(x.components[i], x.components[j]);
            check(x.components[j], x.components[i]);
        }
    }
    rep.passed = rep.max_error <= tol;
    if (rep.passed) {
        rep.witness.reset();
    }
    return rep;
}

VectorField sphere_rotation_field() {
    const VecFn rot = [](const Vec& c) {
        Vec v(2);
        v << -c[1], c[0];
        return v;
    };
    return {"sphere-stereo", {{"north", rot}, {"south", rot}}};
}

}  // namespace chartwork::tangent

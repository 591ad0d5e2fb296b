#include "chartwork/smooth_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chartwork::atlas {

CoordExpression coord_expression(const VecFn& f, const ManifoldSpec& src, std::string_view src_chart,
                                 const ManifoldSpec& dst, std::string_view dst_chart) {
    const Chart phi = src.chart(src_chart);
    const Chart psi = dst.chart(dst_chart);
    CoordExpression e;
    e.src_chart = phi.id;
    e.dst_chart = psi.id;
    e.map = [f, phi, psi](const Vec& x) { return psi.forward(f(phi.inverse(x))); };
    e.in_domain = [f, phi, psi](const Vec& x, double margin) {
        if (!all_finite(x) || !phi.coord_domain(x, margin)) {
            return false;
        }
        const Vec p = phi.inverse(x);
        if (!all_finite(p) || !phi.domain(p, margin)) {
            return false;
        }
        const Vec q = f(p);
        return all_finite(q) && psi.domain(q, margin);
    };
    return e;
}

SmoothMapReport check_smooth_map(const VecFn& f, const ManifoldSpec& src, std::string_view src_chart,
                                 const ManifoldSpec& dst, std::string_view dst_chart, const VerifyConfig& config,
                                 const std::optional<std::pair<std::string, std::string>>& alternate) {
    const CoordExpression e = coord_expression(f, src, src_chart, dst, dst_chart);
    const Chart& phi = src.chart(src_chart);
    SmoothMapReport rep;
    rep.src_chart = e.src_chart;
    rep.dst_chart = e.dst_chart;
    rep.fd_tol = config.fd_tol;
    rep.independence_tol = config.transition_tol;

    Rng rng(stream_seed(config.seed, 0x5eedULL));
    std::vector<Vec> xs;
    const std::size_t attempts = config.samples * 50;
    for (std::size_t i = 0; i < attempts && xs.size() < config.samples; ++i) {
        Vec x = propose_coords(phi, rng);
        if (e.in_domain(x, config.margin)) {
            xs.push_back(std::move(x));
        }
    }
    if (xs.empty()) {
        throw EmptyDomainError("no sample of chart '" + e.src_chart + "' lies in the domain of the expression into '" +
                               e.dst_chart + "'");
    }
    rep.samples = xs.size();

    const double probe_margin = 0.5 * config.margin;
    const auto inside = [&](const Vec& q) { return e.in_domain(q, probe_margin); };
    for (const auto& x : xs) {
        double disc = std::numeric_limits<double>::infinity();
        try {
            disc = fd_jacobian(e.map, inside, x, config.fd_step, probe_margin).richardson;
        } catch (const OutsideOverlapError&) {
        }
        if (!rep.smoothness_witness || disc > rep.max_fd_discrepancy) {
            rep.max_fd_discrepancy = disc;
            rep.smoothness_witness = Witness{"smoothness", e.src_chart, e.dst_chart, x, disc};
        }
    }
    rep.smoothness_flag = rep.max_fd_discrepancy <= config.fd_tol;
    if (rep.smoothness_flag) {
        rep.smoothness_witness.reset();
    }

    if (alternate) {
        const CoordExpression alt = coord_expression(f, src, alternate->first, dst, alternate->second);
        const Chart& phi2 = src.chart(alternate->first);
        const Chart& psi = dst.chart(dst_chart);
        const Chart& psi2 = dst.chart(alternate->second);
        rep.independence_checked = true;
        for (const auto& x : xs) {
            const Vec p = phi.inverse(x);
            if (!phi2.domain(p, config.margin)) {
                continue;
            }
            const Vec x2 = phi2.forward(p);
            if (!alt.in_domain(x2, config.margin)) {
                continue;
            }
            const Vec lhs = alt.map(x2);
            const Vec rhs = psi2.forward(psi.inverse(e.map(x)));
            const double err = max_abs(Vec(lhs - rhs));
            ++rep.independence_samples;
            if (!(err <= rep.independence_max_error)) {
                rep.independence_max_error = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
                rep.independence_witness = Witness{"chart-independence", e.src_chart, alt.src_chart, x, err};
            }
        }
        if (rep.independence_max_error <= config.transition_tol) {
            rep.independence_witness.reset();
        }
    }
    rep.passed = rep.smoothness_flag && (!rep.independence_checked || rep.independence_max_error <= config.transition_tol);
    return rep;
}

}  // namespace chartwork::atlas

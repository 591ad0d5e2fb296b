#include "chartwork/atlas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/LU>

namespace chartwork::atlas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxProbeHalvings = 60;
constexpr double kProbeFactor = 100.0;
constexpr int kMaxRefinements = 8;
constexpr double kRefineTol = 1e-9;
constexpr std::size_t kAttemptsPerSample = 50;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double finite_or_inf(double x) { return std::isfinite(x) ? x : kInf; }

bool in_overlap_impl(const Chart& from, const Chart& to, const Vec& c, double margin) {
    if (!all_finite(c) || !from.coord_domain(c, margin)) {
        return false;
    }
    const Vec p = from.inverse(c);
    return all_finite(p) && from.domain(p, margin) && to.domain(p, margin);
}

struct DirectedResult {
    std::size_t samples = 0;
    double roundtrip = 0;
    double min_det = kInf;
    double max_disc = 0;
    Witness roundtrip_witness;
    Witness det_witness;
    Witness disc_witness;
};

DirectedResult check_direction(const Chart& from, const Chart& to, const VerifyConfig& cfg) {
    DirectedResult r;
    const TransitionFn forward = [&] {
        TransitionFn t;
        t.from = from.id;
        t.to = to.id;
        t.map = [&](const Vec& c) { return to.forward(from.inverse(c)); };
        if (from.has_analytic_jacobians() && to.has_analytic_jacobians()) {
            t.analytic_jacobian = [&](const Vec& c) -> Mat {
                return to.forward_jacobian(from.inverse(c)) * from.inverse_jacobian(c);
            };
        }
        t.in_overlap = [&](const Vec& c, double margin) { return in_overlap_impl(from, to, c, margin); };
        return t;
    }();
    const auto back = [&](const Vec& y) { return from.forward(to.inverse(y)); };
    const double probe_margin = 0.5 * cfg.margin;
    const auto inside = [&](const Vec& q) { return forward.in_overlap(q, probe_margin); };

    const auto samples = sample_overlap(from, to, cfg);
    r.samples = samples.size();
    for (const auto& c : samples) {
        const Vec y = forward.map(c);
        const double rt = all_finite(y) ? finite_or_inf(max_abs(Vec(back(y) - c))) : kInf;
        if (rt > r.roundtrip || r.roundtrip_witness.coords.size() == 0) {
            r.roundtrip = rt;
            r.roundtrip_witness = {"roundtrip", from.id, to.id, c, rt};
        }

        double disc = kInf;
        Mat fd;
        try {
            const auto est = fd_jacobian(forward.map, inside, c, cfg.fd_step, probe_margin);
            disc = finite_or_inf(est.richardson);
            fd = est.value;
        } catch (const OutsideOverlapError&) {
        }
        if (disc > r.max_disc || r.disc_witness.coords.size() == 0) {
            r.max_disc = disc;
            r.disc_witness = {"smoothness", from.id, to.id, c, disc};
        }

        Mat jac = forward.analytic_jacobian ? forward.analytic_jacobian(c) : fd;
        const double det = jac.size() == 0 ? 0.0 : std::abs(jac.determinant());
        const double abs_det = std::isfinite(det) ? det : 0.0;
        if (abs_det < r.min_det) {
            r.min_det = abs_det;
            r.det_witness = {"jacobian-det", from.id, to.id, c, abs_det};
        }
    }
    return r;
}

}  // namespace

const Chart& ManifoldSpec::chart(std::string_view id) const { return atlas[chart_index(id)]; }

std::size_t ManifoldSpec::chart_index(std::string_view id) const {
    for (std::size_t i = 0; i < atlas.size(); ++i) {
        if (atlas[i].id == id) {
            return i;
        }
    }
    std::string known;
    for (const auto& c : atlas) {
        known += (known.empty() ? "" : ", ") + c.id;
    }
    throw UnknownChartError("manifold '" + name + "' has no chart '" + std::string(id) + "' (charts: " + known + ")");
}

double ManifoldSpec::dist(const Vec& a, const Vec& b) const {
    if (distance) {
        return distance(a, b);
    }
    return max_abs(Vec(a - b));
}

const Chart* ManifoldSpec::covering_chart(const Vec& p, double margin) const {
    for (const auto& c : atlas) {
        if (c.domain(p, margin)) {
            return &c;
        }
    }
    return nullptr;
}

Vec propose_coords(const Chart& chart, Rng& rng) {
    Vec c(chart.dim);
    for (int k = 0; k < chart.dim; ++k) {
        const double lo = chart.box.lo[k];
        const double hi = chart.box.hi[k];
        if (rng.uniform() < 0.5) {
            c[k] = rng.uniform(lo, hi);
        } else {
            const double scale = std::max(std::abs(lo), std::abs(hi));
            const double magnitude = scale * std::pow(10.0, rng.uniform(-6.0, 0.0));
            c[k] = rng.uniform() < 0.5 ? -magnitude : magnitude;
        }
    }
    return c;
}

std::vector<Vec> sample_overlap(const Chart& from, const Chart& to, const VerifyConfig& config) {
    Rng rng(stream_seed(config.seed, fnv1a(from.id + "->" + to.id)));
    std::vector<Vec> out;
    out.reserve(config.samples);
    const std::size_t attempts = config.samples * kAttemptsPerSample;
    for (std::size_t i = 0; i < attempts && out.size() < config.samples; ++i) {
        Vec c = propose_coords(from, rng);
        if (config.min_abs_coord > 0.0 && c.cwiseAbs().minCoeff() < config.min_abs_coord) {
            continue;
        }
        if (in_overlap_impl(from, to, c, config.margin)) {
            out.push_back(std::move(c));
        }
    }
    return out;
}

TransitionFn transition(const ManifoldSpec& m, std::string_view to, std::string_view from, const VerifyConfig& config) {
    const Chart target = m.chart(to);
    const Chart source = m.chart(from);
    TransitionFn t;
    t.from = source.id;
    t.to = target.id;
    t.map = [source, target](const Vec& c) { return target.forward(source.inverse(c)); };
    if (source.has_analytic_jacobians() && target.has_analytic_jacobians()) {
        t.analytic_jacobian = [source, target](const Vec& c) -> Mat {
            return target.forward_jacobian(source.inverse(c)) * source.inverse_jacobian(c);
        };
    }
    t.in_overlap = [source, target](const Vec& c, double margin) {
        return in_overlap_impl(source, target, c, margin);
    };
    if (config.samples > 0) {
        t.overlap_samples = sample_overlap(source, target, config);
    }
    return t;
}

JacobianEstimate fd_jacobian(const VecFn& f, const std::function<bool(const Vec&)>& inside, const Vec& x,
                             double base_step, double probe_spacing) {
    JacobianEstimate est;
    est.steps = scaled_steps(x, base_step);
    const auto room = [&](Eigen::Index k, double r) {
        Vec up = x;
        Vec down = x;
        up[k] += r;
        down[k] -= r;
        return inside(up) && inside(down);
    };
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double reach = kProbeFactor * est.steps[k];
        double r = reach;
        if (probe_spacing > 0.0) {
            double good = 0.0;
            for (double t = std::min(probe_spacing, reach); good < reach; t = std::min(t + probe_spacing, reach)) {
                if (!room(k, t)) {
                    break;
                }
                good = t;
            }
            r = good > 0.0 ? good : std::min(probe_spacing, reach) * 0.5;
        }
        int halvings = 0;
        while (!room(k, r)) {
            r *= 0.5;
            if (++halvings > kMaxProbeHalvings) {
                throw OutsideOverlapError("no room for a difference stencil at " + format_vec(x));
            }
        }
        est.steps[k] = std::min(est.steps[k], r / kProbeFactor);
    }
    est.fd_coarse = central_jacobian(f, x, est.steps);
    est.fd_fine = central_jacobian(f, x, Vec(est.steps / 2.0));
    est.richardson = relative_discrepancy(est.fd_coarse, est.fd_fine);
    est.value = est.fd_fine;
    return est;
}

JacobianEstimate jacobian(const TransitionFn& t, const Vec& point, JacobianMode mode, double base_step) {
    if (!t.in_overlap(point, 0.0)) {
        throw OutsideOverlapError("point " + format_vec(point) + " is outside the overlap of '" + t.from + "' and '" +
                                  t.to + "'");
    }
    const bool use_analytic =
        mode == JacobianMode::Analytic || (mode == JacobianMode::Auto && static_cast<bool>(t.analytic_jacobian));
    if (use_analytic) {
        if (!t.analytic_jacobian) {
            throw std::invalid_argument("transition '" + t.from + "' -> '" + t.to + "' has no analytic Jacobian");
        }
        JacobianEstimate est;
        est.value = t.analytic_jacobian(point);
        est.analytic = true;
        return est;
    }
    const auto inside = [&](const Vec& q) { return t.in_overlap(q, 0.0); };
    JacobianEstimate est = fd_jacobian(t.map, inside, point, base_step);
    for (int i = 0; i < kMaxRefinements && est.richardson > kRefineTol; ++i) {
        base_step /= 4.0;
        JacobianEstimate finer = fd_jacobian(t.map, inside, point, base_step);
        if (finer.richardson >= est.richardson) {
            break;
        }
        est = std::move(finer);
    }
    est.value = est.fd_fine + (est.fd_fine - est.fd_coarse) / 3.0;
    return est;
}

CompatibilityReport check_compatibility(const ManifoldSpec& m, std::string_view a, std::string_view b,
                                        const VerifyConfig& config) {
    const Chart& ca = m.chart(a);
    const Chart& cb = m.chart(b);
    CompatibilityReport rep;
    rep.chart_a = ca.id;
    rep.chart_b = cb.id;
    rep.min_abs_det = kInf;

    const DirectedResult ab = check_direction(ca, cb, config);
    const DirectedResult ba = check_direction(cb, ca, config);
    rep.overlap_samples = ab.samples + ba.samples;
    if (rep.overlap_samples == 0) {
        return rep;
    }
    rep.thin_overlap = std::min(ab.samples, ba.samples) < config.min_overlap;

    for (const DirectedResult* d : {&ab, &ba}) {
        if (d->samples == 0) {
            continue;
        }
        rep.roundtrip_max_error = std::max(rep.roundtrip_max_error, d->roundtrip);
        rep.min_abs_det = std::min(rep.min_abs_det, d->min_det);
        rep.max_fd_discrepancy = std::max(rep.max_fd_discrepancy, d->max_disc);
    }
    const auto worst = [&](auto pick, auto better) {
        const DirectedResult* best = nullptr;
        for (const DirectedResult* d : {&ab, &ba}) {
            if (d->samples > 0 && (best == nullptr || better(pick(*d).value, pick(*best).value))) {
                best = d;
            }
        }
        return pick(*best);
    };
    if (!(rep.roundtrip_max_error <= config.transition_tol)) {
        rep.witnesses.push_back(worst([](const DirectedResult& d) { return d.roundtrip_witness; }, std::greater<>()));
    }
    if (!(rep.min_abs_det >= config.det_floor)) {
        rep.witnesses.push_back(worst([](const DirectedResult& d) { return d.det_witness; }, std::less<>()));
    }
    if (!(rep.max_fd_discrepancy <= config.fd_tol)) {
        rep.smoothness_flag = false;
        rep.witnesses.push_back(worst([](const DirectedResult& d) { return d.disc_witness; }, std::greater<>()));
    }
    rep.passed = rep.witnesses.empty();
    return rep;
}

AtlasReport verify_atlas(const ManifoldSpec& m, const VerifyConfig& config) {
    AtlasReport rep;
    rep.manifold = m.name;
    rep.config = config;

    std::vector<Vec> points = m.landmarks;
    {
        Rng rng(stream_seed(config.seed, fnv1a("covering")));
        for (std::size_t i = 0; i < config.samples; ++i) {
            points.push_back(m.sample(rng));
        }
    }
    rep.covering_samples = points.size();
    for (const auto& p : points) {
        if (m.covering_chart(p, 0.0) == nullptr) {
            ++rep.uncovered;
            if (!rep.covering_witness) {
                rep.covering_witness = Witness{"covering", "", "", p, 0.0};
            }
        }
    }

    for (const auto& chart : m.atlas) {
        ChartReport cr;
        cr.chart = chart.id;
        Rng rng(stream_seed(config.seed, fnv1a("chart:" + chart.id)));
        std::vector<Vec> pts;
        for (const auto& p : m.landmarks) {
            if (chart.domain(p, config.margin)) {
                pts.push_back(p);
            }
        }
        const std::size_t attempts = config.samples * kAttemptsPerSample;
        for (std::size_t i = 0; i < attempts && pts.size() < config.samples + m.landmarks.size(); ++i) {
            Vec p = m.sample(rng);
            if (chart.domain(p, config.margin)) {
                pts.push_back(std::move(p));
            }
        }
        cr.samples = pts.size();
        for (const auto& p : pts) {
            const Vec c = chart.forward(p);
            if (!all_finite(c) || !chart.coord_domain(c, 0.0)) {
                cr.passed = false;
                if (!cr.witness || cr.witness->check != "coord-domain") {
                    cr.witness = Witness{"coord-domain", chart.id, chart.id, p, 0.0};
                }
                continue;
            }
            const double err = finite_or_inf(m.dist(chart.inverse(c), p));
            if (err > cr.roundtrip_max_error) {
                cr.roundtrip_max_error = err;
                if (err > config.roundtrip_tol && (!cr.witness || cr.witness->check == "chart-roundtrip")) {
                    cr.witness = Witness{"chart-roundtrip", chart.id, chart.id, p, err};
                }
            }
        }
        cr.passed = cr.passed && cr.roundtrip_max_error <= config.roundtrip_tol;
        rep.charts.push_back(std::move(cr));
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m.atlas.size(); ++i) {
        for (std::size_t j = i + 1; j < m.atlas.size(); ++j) {
            pairs.emplace_back(i, j);
        }
    }
    rep.pairs.resize(pairs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < pairs.size(); k = next++) {
            rep.pairs[k] = check_compatibility(m, m.atlas[pairs[k].first].id, m.atlas[pairs[k].second].id, config);
        }
    };
    const std::size_t workers =
        std::min<std::size_t>(pairs.size(), std::max(1U, std::thread::hardware_concurrency()));
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < workers; ++w) {
        threads.emplace_back(worker);
    }
    worker();
    for (auto& t : threads) {
        t.join();
    }

    rep.passed = rep.uncovered == 0 &&
                 std::all_of(rep.charts.begin(), rep.charts.end(), [](const auto& c) { return c.passed; }) &&
                 std::all_of(rep.pairs.begin(), rep.pairs.end(), [](const auto& p) { return p.passed; });
    return rep;
}

ManifoldSpec atlas_union(const ManifoldSpec& a, const ManifoldSpec& b) {
    if (a.dim != b.dim || a.ambient_dim != b.ambient_dim) {
        throw std::invalid_argument("atlases '" + a.name + "' and '" + b.name + "' live on different spaces");
    }
    ManifoldSpec u = a;
    u.name = a.name + "+" + b.name;
    for (Chart c : b.atlas) {
        const bool clash =
            std::any_of(a.atlas.begin(), a.atlas.end(), [&](const Chart& other) { return other.id == c.id; });
        if (clash) {
            c.id = "b:" + c.id;
        }
        u.atlas.push_back(std::move(c));
    }
    u.landmarks.insert(u.landmarks.end(), b.landmarks.begin(), b.landmarks.end());
    return u;
}

EquivalenceReport atlases_equivalent(const ManifoldSpec& a, const ManifoldSpec& b, const VerifyConfig& config) {
    EquivalenceReport rep;
    rep.atlas_a = a.name;
    rep.atlas_b = b.name;
    const ManifoldSpec u = atlas_union(a, b);
    rep.union_report = verify_atlas(u, config);
    const std::size_t na = a.atlas.size();
    std::size_t index = 0;
    for (std::size_t i = 0; i < u.atlas.size(); ++i) {
        for (std::size_t j = i + 1; j < u.atlas.size(); ++j, ++index) {
            if (i < na && j >= na) {
                rep.cross_pairs.push_back(index);
                const auto& pair = rep.union_report.pairs[index];
                if (!pair.passed) {
                    rep.passed = false;
                    rep.witnesses.insert(rep.witnesses.end(), pair.witnesses.begin(), pair.witnesses.end());
                }
            }
        }
    }
    return rep;
}

GlComponent classify_gl_component(const Mat& matrix, double singular_floor) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
        throw std::invalid_argument("classify_gl_component needs a non-empty square matrix");
    }
    const double det = matrix.determinant();
    if (!(std::abs(det) > singular_floor)) {
        throw NotInGlError("matrix is singular (|det| <= " + std::to_string(singular_floor) + "), not in GL(n)");
    }
    return det > 0.0 ? GlComponent::Plus : GlComponent::Minus;
}

Vec flatten(const Mat& m) {
    Vec v(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            v[i * m.cols() + j] = m(i, j);
        }
    }
    return v;
}

Mat unflatten(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw std::invalid_argument("unflatten: size mismatch");
    }
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = v[i * cols + j];
        }
    }
    return m;
}

}  // namespace chartwork::atlas

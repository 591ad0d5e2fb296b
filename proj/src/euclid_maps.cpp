#include "chartwork/euclid_maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chartwork::euclid {

namespace {

constexpr double kSurfaceTol = 1e-12;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec scalar(double x) {
    Vec v(1);
    v[0] = x;
    return v;
}

bool on_unit_sphere(const Vec& x) { return std::abs(x.norm() - 1.0) <= kSurfaceTol; }

bool on_unit_cube(const Vec& x) { return std::abs(x.lpNorm<Eigen::Infinity>() - 1.0) <= kSurfaceTol; }

// 2y / (1 + √(1 + 4|y|²)), the inverse of x / (1 − |x|²).
Vec compress(const Vec& y) { return 2.0 * y / (1.0 + std::sqrt(1.0 + 4.0 * y.squaredNorm())); }

Vec expand(const Vec& x) {
    const double r = x.norm();
    return x / ((1.0 - r) * (1.0 + r));
}

std::string normalized_name(std::string name) {
    std::replace(name.begin(), name.end(), '_', '-');
    if (name.size() > 2 && name.back() == ')') {
        const auto open = name.find('(');
        if (open != std::string::npos) {
            name = name.substr(0, open) + "-" + name.substr(open + 1, name.size() - open - 2);
        }
    }
    return name;
}

}  // namespace

MapSpec interval_line() {
    MapSpec m;
    m.name = "interval-line";
    m.dim_in = m.dim_out = 1;
    m.forward = expand;
    m.inverse = compress;
    m.domain = [](const Vec& x, double margin) { return std::abs(x[0]) < 1.0 - margin; };
    m.propose = [](Rng& rng) { return scalar(rng.uniform(-1.0, 1.0)); };
    m.seam_probe = [](double eps) { return std::pair{scalar(eps), scalar(-eps)}; };
    return m;
}

MapSpec interval_ratio() {
    MapSpec m;
    m.name = "interval-ratio";
    m.dim_in = m.dim_out = 1;
    m.forward = [](const Vec& x) { return scalar((2.0 * x[0] - 1.0) / (x[0] * (x[0] - 1.0))); };
    // Root of y·x² − (y + 2)·x + 1 = 0 lying in (0, 1): the "−" branch of the
    // quadratic formula, x = ((y + 2) − √(y² + 4)) / (2y), with x(0) = 1/2.
    // Rationalized for y ≥ −2 to avoid cancellation near y = 0.
    m.inverse = [](const Vec& v) {
        const double y = v[0];
        const double s = std::sqrt(y * y + 4.0);
        if (y >= -2.0) {
            return scalar(2.0 / ((y + 2.0) + s));
        }
        return scalar(((y + 2.0) - s) / (2.0 * y));
    };
    m.domain = [](const Vec& x, double margin) { return x[0] > margin && x[0] < 1.0 - margin; };
    m.propose = [](Rng& rng) { return scalar(rng.uniform()); };
    return m;
}

MapSpec ball_space(int n) {
    if (n < 1) {
        throw std::invalid_argument("ball_space needs n >= 1");
    }
    MapSpec m;
    m.name = "ball-space-" + std::to_string(n);
    m.dim_in = m.dim_out = n;
    m.forward = expand;
    m.inverse = compress;
    m.domain = [](const Vec& x, double margin) { return x.norm() < 1.0 - margin; };
    m.propose = [n](Rng& rng) {
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            x[i] = rng.uniform(-1.0, 1.0);
        }
        return x;
    };
    return m;
}

MapSpec cube_sphere() {
    MapSpec m;
    m.name = "cube-sphere";
    m.dim_in = m.dim_out = 3;
    m.forward = [](const Vec& r) -> Vec { return r / r.norm(); };
    m.inverse = [](const Vec& r) -> Vec { return r / r.lpNorm<Eigen::Infinity>(); };
    m.domain = [](const Vec& x, double) { return on_unit_cube(x); };
    m.propose = [](Rng& rng) {
        Vec x(3);
        for (int i = 0; i < 3; ++i) {
            x[i] = rng.uniform(-1.0, 1.0);
        }
        const auto face = static_cast<int>(rng.below(3));
        x[face] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return x;
    };
    return m;
}

MapSpec circle_square() {
    MapSpec m;
    m.name = "circle-square";
    m.dim_in = m.dim_out = 2;
    m.forward = [](const Vec& r) -> Vec { return r / r.lpNorm<Eigen::Infinity>(); };
    m.inverse = [](const Vec& r) -> Vec { return r / r.norm(); };
    m.domain = [](const Vec& x, double) { return on_unit_sphere(x); };
    m.propose = [](Rng& rng) {
        const double theta = rng.uniform(0.0, kTwoPi);
        Vec x(2);
        x << std::cos(theta), std::sin(theta);
        return x;
    };
    // Two points of the square at distance eps either side of (1, 0).
    m.seam_probe = [](double eps) {
        Vec a(2);
        Vec b(2);
        a << 1.0, eps;
        b << 1.0, -eps;
        return std::pair{a, b};
    };
    return m;
}

MapSpec hemisphere_disc(int n) {
    if (n < 2) {
        throw std::invalid_argument("hemisphere_disc needs n >= 2");
    }
    MapSpec m;
    m.name = "hemisphere-disc-" + std::to_string(n);
    m.dim_in = n;
    m.dim_out = n - 1;
    m.forward = [n](const Vec& x) -> Vec { return x.head(n - 1); };
    m.inverse = [n](const Vec& d) {
        Vec x(n);
        x.head(n - 1) = d;
        x[n - 1] = std::sqrt(1.0 - d.squaredNorm());
        return x;
    };
    m.domain = [n](const Vec& x, double margin) { return on_unit_sphere(x) && x[n - 1] > margin; };
    // Points of the hemisphere are built from a disc point and its height.
    m.propose = [n](Rng& rng) {
        Vec d(n - 1);
        do {
            for (int i = 0; i < n - 1; ++i) {
                d[i] = rng.uniform(-1.0, 1.0);
            }
        } while (d.squaredNorm() >= 1.0);
        Vec x(n);
        x.head(n - 1) = d;
        x[n - 1] = std::sqrt(1.0 - d.squaredNorm());
        return x;
    };
    return m;
}

MapSpec circle_param() {
    MapSpec m;
    m.name = "circle-param";
    m.dim_in = 1;
    m.dim_out = 2;
    m.forward = [](const Vec& t) {
        Vec x(2);
        x << std::cos(kTwoPi * t[0]), std::sin(kTwoPi * t[0]);
        return x;
    };
    // Seam at angle 0: the inverse takes values in [0, 1).
    m.inverse = [](const Vec& x) {
        double t = std::atan2(x[1], x[0]) / kTwoPi;
        if (t < 0.0) {
            t += 1.0;
        }
        if (t >= 1.0) {
            t = 0.0;
        }
        return scalar(t);
    };
    m.domain = [](const Vec& t, double margin) { return t[0] >= 0.0 && t[0] < 1.0 - margin; };
    m.propose = [](Rng& rng) { return scalar(rng.uniform()); };
    m.seam_probe = [fwd = m.forward](double eps) { return std::pair{fwd(scalar(eps)), fwd(scalar(1.0 - eps))}; };
    return m;
}

MapSpec identity(int n) {
    MapSpec m;
    m.name = "identity-" + std::to_string(n);
    m.dim_in = m.dim_out = n;
    m.forward = [](const Vec& x) { return x; };
    m.inverse = [](const Vec& x) { return x; };
    m.domain = [](const Vec&, double) { return true; };
    m.propose = [n](Rng& rng) {
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            x[i] = rng.gaussian();
        }
        return x;
    };
    m.seam_probe = [n](double eps) { return std::pair{Vec(Vec::Constant(n, eps)), Vec(Vec::Constant(n, -eps))}; };
    return m;
}

std::vector<MapSpec> catalog() {
    return {interval_line(), interval_ratio(), ball_space(1), ball_space(2), ball_space(3), cube_sphere(),
            circle_square(), hemisphere_disc(2), hemisphere_disc(3), circle_param()};
}

std::optional<MapSpec> find_map(const std::string& raw) {
    const std::string name = normalized_name(raw);
    for (auto& m : catalog()) {
        if (m.name == name) {
            return m;
        }
    }
    auto parametric = [&](const std::string& prefix, int min_n) -> std::optional<int> {
        if (name.rfind(prefix, 0) != 0) {
            return std::nullopt;
        }
        const std::string tail = name.substr(prefix.size());
        if (tail.empty() || !std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
            tail.size() > 3) {
            return std::nullopt;
        }
        const int n = std::stoi(tail);
        return n >= min_n ? std::optional<int>(n) : std::nullopt;
    };
    if (auto n = parametric("ball-space-", 1)) {
        return ball_space(*n);
    }
    if (auto n = parametric("hemisphere-disc-", 2)) {
        return hemisphere_disc(*n);
    }
    if (auto n = parametric("identity-", 1)) {
        return identity(*n);
    }
    return std::nullopt;
}

std::vector<Vec> sample_domain(const MapSpec& map, std::size_t n, std::uint64_t seed, double margin) {
    Rng rng(seed);
    std::vector<Vec> out;
    out.reserve(n);
    const std::size_t max_attempts = 1000 * n + 1000;
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < n; ++attempt) {
        Vec x = map.propose(rng);
        if (map.domain(x, margin)) {
            out.push_back(std::move(x));
        }
    }
    if (out.empty() && n > 0) {
        throw SamplingError("no in-domain samples for map '" + map.name + "'");
    }
    return out;
}

RoundTripReport check_round_trip(const MapSpec& map, std::size_t n_samples, std::uint64_t seed, double tol,
                                 double margin) {
    if (!map.has_inverse()) {
        throw UnsupportedError("map '" + map.name + "' has no inverse");
    }
    RoundTripReport r;
    r.map = map.name;
    r.tolerance = tol;
    r.margin = margin;
    r.seed = seed;
    const auto xs = sample_domain(map, n_samples, seed, margin);
    r.samples = xs.size();
    r.worst_point = xs.front();
    for (const auto& x : xs) {
        const Vec y = map.forward(x);
        const double err = (map.inverse(y) - x).lpNorm<Eigen::Infinity>();
        if (!(err <= r.max_error)) {
            r.max_error = std::isnan(err) ? INFINITY : err;
            r.worst_point = x;
        }
        const double scale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
        const double img_err = (map.forward(map.inverse(y)) - y).lpNorm<Eigen::Infinity>() / scale;
        r.image_max_rel_error = std::max(r.image_max_rel_error, std::isnan(img_err) ? INFINITY : img_err);
    }
    r.passed = r.max_error <= tol;
    return r;
}

double detect_inverse_jump(const MapSpec& map, double approach_eps) {
    if (!(approach_eps > 0.0 && approach_eps < 0.1)) {
        throw std::invalid_argument("approach_eps must lie in (0, 0.1)");
    }
    if (!map.has_inverse() || !map.seam_probe) {
        throw UnsupportedError("map '" + map.name + "' has no inverse seam probe");
    }
    const auto [a, b] = map.seam_probe(approach_eps);
    return (map.inverse(a) - map.inverse(b)).lpNorm<Eigen::Infinity>();
}

}  // namespace chartwork::euclid

#include "chartwork/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

namespace chartwork::zoo {

using atlas::Chart;
using atlas::CoordBox;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuclidBox = 4.0;
constexpr double kStereoBox = 5.0;
constexpr double kGlBox = 2.0;

CoordBox cube_box(int n, double lo, double hi) { return {Vec::Constant(n, lo), Vec::Constant(n, hi)}; }

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

bool always(const Vec&, double) { return true; }

Vec gaussian_vec(Rng& rng, int n, double scale = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = scale * rng.gaussian();
    }
    return v;
}

Vec unit_gaussian(Rng& rng, int n) {
    while (true) {
        Vec v = gaussian_vec(rng, n);
        const double r = v.norm();
        if (r > 1e-12) {
            return v / r;
        }
    }
}

Chart identity_chart(std::string id, int n, double half_width) {
    Chart c;
    c.id = std::move(id);
    c.dim = n;
    c.forward = [](const Vec& p) { return p; };
    c.inverse = [](const Vec& x) { return x; };
    c.domain = always;
    c.coord_domain = always;
    c.box = cube_box(n, -half_width, half_width);
    c.forward_jacobian = [n](const Vec&) -> Mat { return Mat::Identity(n, n); };
    c.inverse_jacobian = [n](const Vec&) -> Mat { return Mat::Identity(n, n); };
    return c;
}

std::vector<Vec> sphere_landmarks() {
    std::vector<Vec> out;
    for (int k = 0; k < 3; ++k) {
        for (double s : {1.0, -1.0}) {
            Vec e = Vec::Zero(3);
            e[k] = s;
            out.push_back(e);
        }
    }
    for (int j = 0; j < 8; ++j) {
        const double t = j * kPi / 4.0;
        out.push_back(vec({std::cos(t), std::sin(t), 0.0}));
    }
    const double r = 1.0 / std::sqrt(3.0);
    for (double a : {r, -r}) {
        for (double b : {r, -r}) {
            for (double c : {r, -r}) {
                out.push_back(vec({a, b, c}));
            }
        }
    }
    return out;
}

ManifoldSpec sphere_base(std::string name) {
    ManifoldSpec m;
    m.name = std::move(name);
    m.dim = 2;
    m.ambient_dim = 3;
    m.sample = [](Rng& rng) { return unit_gaussian(rng, 3); };
    m.landmarks = sphere_landmarks();
    return m;
}

// Chart on the open half {sign·x_k > 0} of S², dropping coordinate k.
Chart hemisphere_chart(int k, double sign) {
    const std::string names[3] = {"x1", "x2", "x3"};
    std::vector<int> keep;
    for (int i = 0; i < 3; ++i) {
        if (i != k) {
            keep.push_back(i);
        }
    }
    Chart c;
    c.id = names[k] + (sign > 0 ? "pos" : "neg");
    c.dim = 2;
    c.forward = [keep](const Vec& p) { return vec({p[keep[0]], p[keep[1]]}); };
    c.inverse = [k, keep, sign](const Vec& x) {
        Vec p(3);
        p[keep[0]] = x[0];
        p[keep[1]] = x[1];
        p[k] = sign * std::sqrt(1.0 - x.squaredNorm());
        return p;
    };
    c.domain = [k, sign](const Vec& p, double margin) { return sign * p[k] > margin; };
    c.coord_domain = [](const Vec& x, double margin) { return 1.0 - x.squaredNorm() > margin * margin; };
    c.box = cube_box(2, -1.0, 1.0);
    c.forward_jacobian = [keep](const Vec&) -> Mat {
        Mat j = Mat::Zero(2, 3);
        j(0, keep[0]) = 1.0;
        j(1, keep[1]) = 1.0;
        return j;
    };
    c.inverse_jacobian = [k, keep, sign](const Vec& x) -> Mat {
        const double h = std::sqrt(1.0 - x.squaredNorm());
        Mat j = Mat::Zero(3, 2);
        j(keep[0], 0) = 1.0;
        j(keep[1], 1) = 1.0;
        j(k, 0) = -sign * x[0] / h;
        j(k, 1) = -sign * x[1] / h;
        return j;
    };
    return c;
}

// Stereographic projection from the pole (0, 0, pole).
Chart stereo_chart(std::string id, double pole) {
    Chart c;
    c.id = std::move(id);
    c.dim = 2;
    c.forward = [pole](const Vec& p) {
        const double d = 1.0 - pole * p[2];
        return vec({p[0] / d, p[1] / d});
    };
    c.inverse = [pole](const Vec& x) {
        const double r2 = x.squaredNorm();
        return vec({2.0 * x[0] / (1.0 + r2), 2.0 * x[1] / (1.0 + r2), pole * (r2 - 1.0) / (1.0 + r2)});
    };
    c.domain = [pole](const Vec& p, double margin) { return 1.0 - pole * p[2] > margin; };
    c.coord_domain = [](const Vec& x, double margin) { return 2.0 / (1.0 + x.squaredNorm()) > margin; };
    c.box = cube_box(2, -kStereoBox, kStereoBox);
    c.forward_jacobian = [pole](const Vec& p) -> Mat {
        const double d = 1.0 - pole * p[2];
        Mat j = Mat::Zero(2, 3);
        j(0, 0) = 1.0 / d;
        j(1, 1) = 1.0 / d;
        j(0, 2) = pole * p[0] / (d * d);
        j(1, 2) = pole * p[1] / (d * d);
        return j;
    };
    c.inverse_jacobian = [pole](const Vec& x) -> Mat {
        const double q = 1.0 + x.squaredNorm();
        const double q2 = q * q;
        Mat j(3, 2);
        j(0, 0) = 2.0 / q - 4.0 * x[0] * x[0] / q2;
        j(0, 1) = -4.0 * x[0] * x[1] / q2;
        j(1, 0) = j(0, 1);
        j(1, 1) = 2.0 / q - 4.0 * x[1] * x[1] / q2;
        j(2, 0) = pole * 4.0 * x[0] / q2;
        j(2, 1) = pole * 4.0 * x[1] / q2;
        return j;
    };
    return c;
}

double first_nonzero_sign(const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            return v[i] > 0.0 ? 1.0 : -1.0;
        }
    }
    return 1.0;
}

Chart rp2_chart(int i) {
    std::vector<int> others;
    for (int k = 0; k < 3; ++k) {
        if (k != i) {
            others.push_back(k);
        }
    }
    Chart c;
    c.id = "u" + std::to_string(i + 1);
    c.dim = 2;
    c.forward = [i, others](const Vec& p) { return vec({p[others[0]] / p[i], p[others[1]] / p[i]}); };
    const auto raise = [i, others](const Vec& x) {
        Vec v(3);
        v[i] = 1.0;
        v[others[0]] = x[0];
        v[others[1]] = x[1];
        return v;
    };
    c.inverse = [raise](const Vec& x) { return rp2_normalize(raise(x)); };
    c.domain = [i](const Vec& p, double margin) { return std::abs(p[i]) > margin; };
    // |x_i| of the unit representative is 1 / √(1 + |x|²).
    c.coord_domain = [](const Vec& x, double margin) { return 1.0 / std::sqrt(1.0 + x.squaredNorm()) > margin; };
    c.box = cube_box(2, -kEuclidBox, kEuclidBox);
    c.forward_jacobian = [i, others](const Vec& p) -> Mat {
        Mat j = Mat::Zero(2, 3);
        for (int a = 0; a < 2; ++a) {
            j(a, others[a]) = 1.0 / p[i];
            j(a, i) = -p[others[a]] / (p[i] * p[i]);
        }
        return j;
    };
    c.inverse_jacobian = [raise, others](const Vec& x) -> Mat {
        const Vec v = raise(x);
        const double r = v.norm();
        const Vec u = v / r;
        Mat e = Mat::Zero(3, 2);
        e(others[0], 0) = 1.0;
        e(others[1], 1) = 1.0;
        const Mat proj = Mat::Identity(3, 3) - u * u.transpose();
        return first_nonzero_sign(v) / r * proj * e;
    };
    return c;
}

double wrap_positive(double t) { return t < 0.0 ? t + 2.0 * kPi : t; }

// Angle chart on S¹ with values in (−π, π), or in (0, 2π) when positive_range.
Chart angle_chart(std::string id, bool positive_range) {
    Chart c;
    c.id = std::move(id);
    c.dim = 1;
    const double lo = positive_range ? 0.0 : -kPi;
    const double hi = lo + 2.0 * kPi;
    const auto angle = [positive_range](const Vec& p) {
        const double t = std::atan2(p[1], p[0]);
        return positive_range ? wrap_positive(t) : t;
    };
    c.forward = [angle](const Vec& p) { return vec({angle(p)}); };
    c.inverse = [](const Vec& x) { return vec({std::cos(x[0]), std::sin(x[0])}); };
    c.domain = [angle, lo, hi](const Vec& p, double margin) {
        const double t = angle(p);
        return t > lo + margin && t < hi - margin;
    };
    c.coord_domain = [lo, hi](const Vec& x, double margin) { return x[0] > lo + margin && x[0] < hi - margin; };
    c.box = {vec({lo}), vec({hi})};
    c.forward_jacobian = [](const Vec& p) -> Mat {
        const double r2 = p.squaredNorm();
        Mat j(1, 2);
        j << -p[1] / r2, p[0] / r2;
        return j;
    };
    c.inverse_jacobian = [](const Vec& x) -> Mat {
        Mat j(2, 1);
        j << -std::sin(x[0]), std::cos(x[0]);
        return j;
    };
    return c;
}

Vec concat(const Vec& a, const Vec& b) {
    Vec v(a.size() + b.size());
    v << a, b;
    return v;
}

Mat block_diag(const Mat& a, const Mat& b) {
    Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

Chart product_chart(const Chart& a, const Chart& b, int amb_a, int amb_b) {
    Chart c;
    c.id = a.id + "*" + b.id;
    c.dim = a.dim + b.dim;
    const int da = a.dim;
    const int db = b.dim;
    c.forward = [a, b, amb_a, amb_b](const Vec& p) { return concat(a.forward(p.head(amb_a)), b.forward(p.tail(amb_b))); };
    c.inverse = [a, b, da, db](const Vec& x) { return concat(a.inverse(x.head(da)), b.inverse(x.tail(db))); };
    c.domain = [a, b, amb_a, amb_b](const Vec& p, double margin) {
        return a.domain(p.head(amb_a), margin) && b.domain(p.tail(amb_b), margin);
    };
    c.coord_domain = [a, b, da, db](const Vec& x, double margin) {
        return a.coord_domain(x.head(da), margin) && b.coord_domain(x.tail(db), margin);
    };
    c.box = {concat(a.box.lo, b.box.lo), concat(a.box.hi, b.box.hi)};
    if (a.has_analytic_jacobians() && b.has_analytic_jacobians()) {
        c.forward_jacobian = [a, b, amb_a, amb_b](const Vec& p) -> Mat {
            return block_diag(a.forward_jacobian(p.head(amb_a)), b.forward_jacobian(p.tail(amb_b)));
        };
        c.inverse_jacobian = [a, b, da, db](const Vec& x) -> Mat {
            return block_diag(a.inverse_jacobian(x.head(da)), b.inverse_jacobian(x.tail(db)));
        };
    }
    return c;
}

std::string normalized(std::string s) {
    std::replace(s.begin(), s.end(), '_', '-');
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return s;
}

[[noreturn]] void unknown(const std::string& name, const std::string& why) {
    std::string list;
    for (const auto& n : builtin_names()) {
        list += (list.empty() ? "" : ", ") + n;
    }
    throw UnknownBuiltinError(why + " '" + name + "'; available: " + list);
}

}  // namespace

ManifoldSpec euclidean(int n) {
    if (n < 1) {
        throw std::invalid_argument("euclidean needs n >= 1");
    }
    ManifoldSpec m;
    m.name = "euclidean:" + std::to_string(n);
    m.dim = m.ambient_dim = n;
    m.atlas = {identity_chart("id", n, kEuclidBox)};
    m.sample = [n](Rng& rng) { return gaussian_vec(rng, n, 2.0); };
    m.landmarks = {Vec::Zero(n)};
    return m;
}

ManifoldSpec graph_manifold(std::string name, int n, std::function<double(const Vec&)> f,
                            std::function<Vec(const Vec&)> gradient) {
    if (n < 1) {
        throw std::invalid_argument("graph_manifold needs n >= 1");
    }
    const auto lift = [f, n](const Vec& x) {
        Vec p(n + 1);
        p.head(n) = x;
        p[n] = f(x);
        return p;
    };
    Chart c;
    c.id = "graph";
    c.dim = n;
    c.forward = [n](const Vec& p) -> Vec { return p.head(n); };
    c.inverse = lift;
    c.domain = always;
    c.coord_domain = always;
    c.box = cube_box(n, -kEuclidBox, kEuclidBox);
    if (gradient) {
        c.forward_jacobian = [n](const Vec&) -> Mat { return Mat::Identity(n, n + 1); };
        c.inverse_jacobian = [n, gradient](const Vec& x) -> Mat {
            Mat j(n + 1, n);
            j.topRows(n) = Mat::Identity(n, n);
            j.row(n) = gradient(x).transpose();
            return j;
        };
    }
    ManifoldSpec m;
    m.name = std::move(name);
    m.dim = n;
    m.ambient_dim = n + 1;
    m.atlas = {c};
    m.sample = [lift, n](Rng& rng) { return lift(gaussian_vec(rng, n, 2.0)); };
    m.landmarks = {lift(Vec::Zero(n))};
    return m;
}

ManifoldSpec sphere_hemispheres() {
    ManifoldSpec m = sphere_base("sphere-hemispheres");
    for (int k = 2; k >= 0; --k) {
        m.atlas.push_back(hemisphere_chart(k, 1.0));
        m.atlas.push_back(hemisphere_chart(k, -1.0));
    }
    return m;
}

ManifoldSpec sphere_stereo() {
    ManifoldSpec m = sphere_base("sphere-stereo");
    m.atlas = {stereo_chart("north", 1.0), stereo_chart("south", -1.0)};
    return m;
}

ManifoldSpec sphere_truncated() {
    ManifoldSpec m = sphere_base("sphere-truncated");
    m.atlas = {hemisphere_chart(2, 1.0), hemisphere_chart(2, -1.0)};
    return m;
}

Vec rp2_normalize(const Vec& v) {
    const double r = v.norm();
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("the zero vector has no projective class");
    }
    return first_nonzero_sign(v) * v / r;
}

ManifoldSpec projective_plane() {
    ManifoldSpec m;
    m.name = "projective-plane";
    m.dim = 2;
    m.ambient_dim = 3;
    m.atlas = {rp2_chart(0), rp2_chart(1), rp2_chart(2)};
    m.sample = [](Rng& rng) { return rp2_normalize(unit_gaussian(rng, 3)); };
    for (const Vec& v : {vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1}), vec({1, 1, 0}), vec({1, -1, 0}),
                         vec({1, 0, 1}), vec({0, 1, -1}), vec({1, 1, 1}), vec({-1, 2, 3})}) {
        m.landmarks.push_back(rp2_normalize(v));
    }
    m.distance = [](const Vec& a, const Vec& b) { return std::min(max_abs(Vec(a - b)), max_abs(Vec(a + b))); };
    return m;
}

ManifoldSpec real_line() {
    ManifoldSpec m = euclidean(1);
    m.name = "real-line";
    return m;
}

ManifoldSpec cubic_line() {
    Chart c;
    c.id = "cube";
    c.dim = 1;
    c.forward = [](const Vec& p) { return vec({p[0] * p[0] * p[0]}); };
    c.inverse = [](const Vec& y) { return vec({std::cbrt(y[0])}); };
    c.domain = always;
    c.coord_domain = always;
    c.box = cube_box(1, -kEuclidBox, kEuclidBox);
    // cbrt has no derivative at 0, so the chart carries no analytic Jacobians.
    ManifoldSpec m = euclidean(1);
    m.name = "cubic-line";
    m.atlas = {c};
    return m;
}

ManifoldSpec real_line_cubic() {
    ManifoldSpec m = real_line();
    m.name = "real-line-cubic";
    m.atlas.push_back(cubic_line().atlas.front());
    return m;
}

ManifoldSpec circle() {
    ManifoldSpec m;
    m.name = "circle";
    m.dim = 1;
    m.ambient_dim = 2;
    m.atlas = {angle_chart("a", false), angle_chart("b", true)};
    m.sample = [](Rng& rng) {
        const double t = rng.uniform(0.0, 2.0 * kPi);
        return vec({std::cos(t), std::sin(t)});
    };
    m.landmarks = {vec({1, 0}), vec({0, 1}), vec({-1, 0}), vec({0, -1})};
    return m;
}

ManifoldSpec product(const ManifoldSpec& m1, const ManifoldSpec& m2) {
    ManifoldSpec m;
    m.name = m1.name + "*" + m2.name;
    m.dim = m1.dim + m2.dim;
    m.ambient_dim = m1.ambient_dim + m2.ambient_dim;
    const int n1 = m1.ambient_dim;
    const int n2 = m2.ambient_dim;
    for (const auto& a : m1.atlas) {
        for (const auto& b : m2.atlas) {
            m.atlas.push_back(product_chart(a, b, n1, n2));
        }
    }
    m.sample = [s1 = m1.sample, s2 = m2.sample](Rng& rng) {
        Vec a = s1(rng);
        return concat(a, s2(rng));
    };
    for (const auto& p : m1.landmarks) {
        for (const auto& q : m2.landmarks) {
            m.landmarks.push_back(concat(p, q));
        }
    }
    if (m1.distance || m2.distance) {
        m.distance = [m1, m2, n1, n2](const Vec& p, const Vec& q) {
            return std::max(m1.dist(p.head(n1), q.head(n1)), m2.dist(p.tail(n2), q.tail(n2)));
        };
    }
    m.connected_claim = m1.connected_claim && m2.connected_claim;
    return m;
}

ManifoldSpec cylinder() {
    ManifoldSpec m = product(circle(), euclidean(1));
    m.name = "cylinder";
    return m;
}

ManifoldSpec torus(int k) {
    if (k < 1) {
        throw std::invalid_argument("torus needs k >= 1");
    }
    ManifoldSpec m = circle();
    for (int i = 1; i < k; ++i) {
        m = product(m, circle());
    }
    m.name = "torus:" + std::to_string(k);
    return m;
}

ManifoldSpec gl_component(int n, atlas::GlComponent component) {
    if (n < 1) {
        throw std::invalid_argument("gl_component needs n >= 1");
    }
    const double sign = component == atlas::GlComponent::Plus ? 1.0 : -1.0;
    const auto signed_det = [n, sign](const Vec& p) { return sign * atlas::unflatten(p, n, n).determinant(); };
    Chart c = identity_chart("flat", n * n, kGlBox);
    c.domain = [signed_det](const Vec& p, double margin) { return signed_det(p) > margin; };
    c.coord_domain = c.domain;
    ManifoldSpec m;
    m.name = std::string(sign > 0 ? "gl-plus:" : "gl-minus:") + std::to_string(n);
    m.dim = m.ambient_dim = n * n;
    m.atlas = {c};
    m.sample = [n, signed_det](Rng& rng) {
        while (true) {
            Vec p = gaussian_vec(rng, n * n);
            const double d = signed_det(p);
            if (d == 0.0) {
                continue;
            }
            if (d < 0.0) {
                p.head(n) *= -1.0;
            }
            return p;
        }
    };
    Mat base = Mat::Identity(n, n);
    base(0, 0) = sign;
    m.landmarks = {atlas::flatten(base)};
    return m;
}

std::vector<std::string> builtin_names() {
    return {"euclidean:n",    "graph-paraboloid:n", "sphere-hemispheres", "sphere-stereo", "sphere-truncated",
            "projective-plane", "real-line",        "cubic-line",         "real-line-cubic", "circle",
            "cylinder",       "torus:k",            "gl-plus:n",          "gl-minus:n"};
}

ManifoldSpec builtin(const std::string& raw) {
    std::string name = normalized(raw);
    std::optional<int> param;
    std::string base = name;
    const auto colon = name.find(':');
    const auto paren = name.find('(');
    std::string digits;
    if (colon != std::string::npos) {
        base = name.substr(0, colon);
        digits = name.substr(colon + 1);
    } else if (paren != std::string::npos && name.back() == ')') {
        base = name.substr(0, paren);
        digits = name.substr(paren + 1, name.size() - paren - 2);
    }
    if (base != name) {
        if (digits.empty() || digits.size() > 2 ||
            !std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
            unknown(raw, "bad parameter in builtin");
        }
        param = std::stoi(digits);
    }
    const auto param_in = [&](int dflt, int lo, int hi) {
        const int v = param.value_or(dflt);
        if (v < lo || v > hi) {
            unknown(raw, "parameter out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] for builtin");
        }
        return v;
    };
    const auto no_param = [&] {
        if (param) {
            unknown(raw, "no parameter accepted by builtin");
        }
    };

    if (base == "euclidean") {
        return euclidean(param_in(2, 1, 16));
    }
    if (base == "graph-paraboloid") {
        const int n = param_in(2, 1, 16);
        return graph_manifold(
            "graph-paraboloid:" + std::to_string(n), n, [](const Vec& x) { return x.squaredNorm(); },
            [](const Vec& x) -> Vec { return 2.0 * x; });
    }
    if (base == "torus") {
        return torus(param_in(2, 1, 6));
    }
    if (base == "gl-plus") {
        return gl_component(param_in(2, 1, 8), atlas::GlComponent::Plus);
    }
    if (base == "gl-minus") {
        return gl_component(param_in(2, 1, 8), atlas::GlComponent::Minus);
    }
    using Factory = ManifoldSpec (*)();
    const std::pair<const char*, Factory> fixed[] = {
        {"sphere-hemispheres", sphere_hemispheres}, {"sphere-stereo", sphere_stereo},
        {"sphere-truncated", sphere_truncated},     {"projective-plane", projective_plane},
        {"real-line", real_line},                   {"cubic-line", cubic_line},
        {"real-line-cubic", real_line_cubic},       {"circle", circle},
        {"cylinder", cylinder},
    };
    for (const auto& [key, make] : fixed) {
        if (base == key) {
            no_param();
            return make();
        }
    }
    unknown(raw, "unknown builtin");
}

}  // namespace chartwork::zoo

#include <doctest.h>

#include <cmath>

#include <Eigen/LU>

#include "chartwork/atlas.hpp"
#include "chartwork/zoo.hpp"

using namespace chartwork;
using namespace chartwork::atlas;

namespace {

Vec v(std::initializer_list<double> xs) {
    Vec out(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        out[i++] = x;
    }
    return out;
}

VerifyConfig quick(std::size_t samples = 300) {
    VerifyConfig c;
    c.samples = samples;
    return c;
}

// Inversion map of the plane and its hand-derived Jacobian.
Vec inversion(const Vec& z) { return z / z.squaredNorm(); }

Mat inversion_jacobian(const Vec& z) {
    const double r2 = z.squaredNorm();
    const double r4 = r2 * r2;
    Mat j(2, 2);
    j << (z[1] * z[1] - z[0] * z[0]) / r4, -2 * z[0] * z[1] / r4, -2 * z[0] * z[1] / r4,
        (z[0] * z[0] - z[1] * z[1]) / r4;
    return j;
}

}  // namespace

TEST_CASE("stereographic transition is the inversion of the punctured plane") {
    const auto m = zoo::sphere_stereo();
    const auto t = transition(m, "north", "south", quick(0));
    CHECK(max_abs(Vec(t(v({1, 0})) - v({1, 0}))) <= 1e-15);
    CHECK(max_abs(Vec(t(v({2, 0})) - v({0.5, 0}))) <= 1e-15);
    CHECK(max_abs(Vec(t(v({0.3, -1.7})) - inversion(v({0.3, -1.7})))) <= 1e-14);

    const auto fd = jacobian(t, v({1, 1}), JacobianMode::FiniteDifference);
    CHECK(max_abs(Mat(fd.value - inversion_jacobian(v({1, 1})))) <= 1e-6);
    const auto an = jacobian(t, v({1, 1}), JacobianMode::Analytic);
    CHECK(an.analytic);
    CHECK(max_abs(Mat(an.value - inversion_jacobian(v({1, 1})))) <= 1e-14);
}

TEST_CASE("hemisphere transition and its determinant") {
    const auto m = zoo::sphere_hemispheres();
    const auto t = transition(m, "x3pos", "x2pos", quick(0));
    const Vec y = t(v({0.1, 0.2}));
    CHECK(y[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(std::sqrt(0.95)).epsilon(1e-15));
    // d/dx of (x1, sqrt(1 - x1^2 - x3^2)): det = -x3 / sqrt(1 - x1^2 - x3^2).
    const double expected = -0.2 / std::sqrt(0.95);
    CHECK(expected == doctest::Approx(-0.205195).epsilon(1e-6));
    CHECK(jacobian(t, v({0.1, 0.2})).value.determinant() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(jacobian(t, v({0.1, 0.2}), JacobianMode::FiniteDifference).value.determinant() ==
          doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("jacobian modes and errors") {
    const auto m = zoo::euclidean(3);
    const auto t = transition(m, "id", "id", quick(0));
    CHECK(max_abs(Mat(jacobian(t, v({1, 2, 3})).value - Mat::Identity(3, 3))) <= 1e-15);
    CHECK(max_abs(Mat(jacobian(t, v({1, 2, 3}), JacobianMode::FiniteDifference).value - Mat::Identity(3, 3))) <=
          1e-10);

    const auto s = zoo::sphere_stereo();
    const auto ts = transition(s, "north", "south", quick(0));
    CHECK_THROWS_AS((void)jacobian(ts, v({0, 0})), OutsideOverlapError);
    CHECK_THROWS_AS((void)transition(s, "north", "nowhere"), UnknownChartError);

    const auto line = zoo::real_line_cubic();
    const auto tl = transition(line, "id", "cube", quick(0));
    CHECK_FALSE(static_cast<bool>(tl.analytic_jacobian));
    CHECK_THROWS_AS((void)jacobian(tl, v({0.5}), JacobianMode::Analytic), std::invalid_argument);
    const auto est = jacobian(tl, v({0.5}));
    CHECK_FALSE(est.analytic);
    CHECK(est.value(0, 0) == doctest::Approx(1.0 / (3.0 * std::cbrt(0.25))).epsilon(1e-7));
}

TEST_CASE("finite differences shrink their step near the edge of the domain") {
    const VecFn f = [](const Vec& x) { return Vec(x.array().sqrt()); };
    const auto inside = [](const Vec& x) { return x[0] > 0.0; };
    const auto est = fd_jacobian(f, inside, v({1e-6}));
    CHECK(est.steps[0] <= 1e-8);
    CHECK(est.value(0, 0) == doctest::Approx(0.5 / std::sqrt(1e-6)).epsilon(1e-4));
    CHECK_THROWS_AS((void)fd_jacobian(f, inside, v({-1.0})), OutsideOverlapError);
}

TEST_CASE("transition Jacobians invert each other at matched points") {
    for (const auto& name : {"sphere-stereo", "sphere-hemispheres", "projective-plane", "torus:2", "gl-plus:2"}) {
        CAPTURE(name);
        const auto m = zoo::builtin(name);
        for (std::size_t i = 0; i < m.atlas.size(); ++i) {
            for (std::size_t j = 0; j < m.atlas.size(); ++j) {
                if (i == j) {
                    continue;
                }
                auto cfg = quick(20);
                const auto tij = transition(m, m.atlas[j].id, m.atlas[i].id, cfg);
                const auto tji = transition(m, m.atlas[i].id, m.atlas[j].id, quick(0));
                for (const auto& p : tij.overlap_samples) {
                    const Mat a = jacobian(tij, p).value;
                    const Mat b = jacobian(tji, tij(p)).value;
                    const Mat fd = jacobian(tji, tij(p), JacobianMode::FiniteDifference).value;
                    CHECK(max_abs(Mat(b - a.inverse())) <= 1e-5 * (1 + max_abs(b)));
                    CHECK(max_abs(Mat(fd * a - Mat::Identity(m.dim, m.dim))) <= 1e-5);
                }
            }
        }
    }
}

TEST_CASE("overlap sampling is seeded and respects the filter") {
    const auto m = zoo::sphere_stereo();
    VerifyConfig cfg = quick(100);
    cfg.seed = 9;
    const auto a = sample_overlap(m.chart("north"), m.chart("south"), cfg);
    const auto b = sample_overlap(m.chart("north"), m.chart("south"), cfg);
    REQUIRE(a.size() == 100);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
    }
    cfg.min_abs_coord = 0.5;
    for (const auto& x : sample_overlap(m.chart("north"), m.chart("south"), cfg)) {
        CHECK(x.cwiseAbs().minCoeff() >= 0.5);
    }
}

TEST_CASE("compatibility reports") {
    const auto s = zoo::sphere_stereo();
    const auto r = check_compatibility(s, "north", "south", quick());
    CHECK(r.passed);
    CHECK(r.smoothness_flag);
    CHECK(r.roundtrip_max_error <= 1e-9);
    CHECK(r.min_abs_det >= 1e-8);
    CHECK(r.witnesses.empty());

    const auto self = check_compatibility(s, "north", "north", quick());
    CHECK(self.passed);
    CHECK(self.roundtrip_max_error <= 1e-12);

    const auto h = zoo::sphere_hemispheres();
    const auto disjoint = check_compatibility(h, "x3pos", "x3neg", quick());
    CHECK(disjoint.passed);
    CHECK(disjoint.overlap_samples == 0);

    const auto c = zoo::real_line_cubic();
    const auto bad = check_compatibility(c, "id", "cube", quick());
    CHECK_FALSE(bad.passed);
    CHECK_FALSE(bad.smoothness_flag);
    bool near_zero = false;
    for (const auto& w : bad.witnesses) {
        near_zero = near_zero || std::abs(w.coords[0]) < 0.01;
    }
    CHECK(near_zero);

    auto away = quick();
    away.min_abs_coord = 0.1;
    CHECK(check_compatibility(c, "id", "cube", away).passed);
}

TEST_CASE("atlas verification") {
    CHECK(verify_atlas(zoo::sphere_hemispheres(), quick()).passed);
    CHECK(verify_atlas(zoo::sphere_stereo(), quick()).passed);
    CHECK(verify_atlas(zoo::projective_plane(), quick()).passed);

    const auto t = verify_atlas(zoo::sphere_truncated(), quick());
    CHECK_FALSE(t.passed);
    CHECK(t.uncovered > 0);
    REQUIRE(t.covering_witness.has_value());
    CHECK(std::abs(t.covering_witness->coords[2]) <= 1e-12);

    const auto a = verify_atlas(zoo::sphere_hemispheres(), quick(200));
    const auto b = verify_atlas(zoo::sphere_hemispheres(), quick(200));
    REQUIRE(a.pairs.size() == 15);
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        CHECK(a.pairs[i].roundtrip_max_error == b.pairs[i].roundtrip_max_error);
        CHECK(a.pairs[i].max_fd_discrepancy == b.pairs[i].max_fd_discrepancy);
    }
}

TEST_CASE("atlas equivalence") {
    const auto r = atlases_equivalent(zoo::sphere_hemispheres(), zoo::sphere_stereo(), quick());
    CHECK(r.passed);
    CHECK(r.cross_pairs.size() == 12);
    CHECK(r.witnesses.empty());
    CHECK(atlases_equivalent(zoo::sphere_stereo(), zoo::sphere_stereo(), quick()).passed);

    const auto lc = atlases_equivalent(zoo::real_line(), zoo::cubic_line(), quick());
    CHECK_FALSE(lc.passed);
    REQUIRE_FALSE(lc.witnesses.empty());
    bool smooth_witness = false;
    for (const auto& w : lc.witnesses) {
        smooth_witness = smooth_witness || (w.check == "smoothness" && std::abs(w.coords[0]) < 0.01);
    }
    CHECK(smooth_witness);

    const auto u = atlas_union(zoo::sphere_stereo(), zoo::sphere_stereo());
    CHECK(u.atlas.size() == 4);
    CHECK(u.atlas[2].id == "b:north");
}

TEST_CASE("general linear group components") {
    CHECK(classify_gl_component(Mat::Identity(3, 3)) == GlComponent::Plus);
    CHECK(classify_gl_component(Vec(v({-1, 1, 1})).asDiagonal().toDenseMatrix()) == GlComponent::Minus);
    CHECK_THROWS_AS((void)classify_gl_component(Mat::Zero(3, 3)), NotInGlError);
    CHECK_THROWS_AS((void)classify_gl_component(Mat::Zero(2, 3)), std::invalid_argument);

    Mat m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    CHECK(flatten(m) == v({1, 2, 3, 4, 5, 6}));
    CHECK(unflatten(flatten(m), 2, 3) == m);
}

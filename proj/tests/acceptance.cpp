// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "chartwork/cli.hpp"
#include "chartwork/euclid_maps.hpp"
#include "chartwork/finite_topology.hpp"
#include "chartwork/tangent.hpp"
#include "chartwork/zoo.hpp"
#include "support.hpp"
#include "topology_oracle.hpp"

using namespace chartwork;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

atlas::VerifyConfig config(std::size_t samples) {
    atlas::VerifyConfig c;
    c.samples = samples;
    return c;
}

// ---------------------------------------------------------------------------

Outcome enumeration_counts() {
    Outcome o;
    const std::uint64_t expected[] = {1, 1, 4, 29, 355};
    const auto t0 = std::chrono::steady_clock::now();
    const auto four = topo::enumerate_topologies(4, true).count;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string counts;
    for (int n = 0; n <= 4; ++n) {
        const auto c = n == 4 ? four : topo::enumerate_topologies(static_cast<std::size_t>(n), true).count;
        counts += (n ? "," : "") + std::to_string(c);
        o.require(c == expected[n], "count mismatch at n=" + std::to_string(n));
        if (n >= 1) {
            o.require(testing::oracle_count(n) == expected[n], "oracle disagrees at n=" + std::to_string(n));
        }
    }
    o.require(secs < 60.0, "n=4 took " + sci(secs) + " s");
    if (o.pass) {
        o.detail = "counts " + counts + " match the set-of-sets oracle; n=4 in " + sci(secs) + " s";
    }
    return o;
}

Outcome counterexample_suite() {
    Outcome o;
    const topo::FiniteSpace tau({"1", "2", "3"}, {0, 0b001, 0b110, 0b111});
    o.require(topo::verify_topology(tau).is_topology, "tau is not a topology");
    const auto h = topo::is_hausdorff(tau);
    o.require(!h.hausdorff, "tau reported Hausdorff");
    o.require(h.witness && tau.points()[h.witness->first] == "2" && tau.points()[h.witness->second] == "3", "witness is not (2,3)");
    for (std::size_t n = 2; n <= 6; ++n) {
        const auto pts = topo::numbered_points(n);
        o.require(!topo::is_hausdorff(topo::FiniteSpace::trivial(pts)).hausdorff,
                  "trivial on " + std::to_string(n) + " points is Hausdorff");
        const auto d = topo::FiniteSpace::discrete(pts);
        o.require(topo::is_hausdorff(d).hausdorff, "discrete not Hausdorff");
        o.require(!topo::is_connected(d), "discrete on " + std::to_string(n) + " points is connected");
    }
    if (o.pass) {
        o.detail = "tau topology, not Hausdorff with witness (2,3); trivial/discrete on 2..6 points as expected";
    }
    return o;
}

Outcome hausdorff_discrete() {
    Outcome o;
    std::size_t spaces = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& s : topo::enumerate_topologies(n, false).spaces) {
            ++spaces;
            const bool discrete = s.opens().size() == (std::size_t{1} << n);
            const bool hausdorff = topo::is_hausdorff(s).hausdorff;
            o.require(hausdorff == discrete, "Hausdorff/discrete mismatch");
            if (hausdorff) {
                for (std::size_t i = 0; i < n; ++i) {
                    o.require(s.is_closed(topo::singleton(i)), "Hausdorff space with a non-closed point");
                }
            }
        }
    }
    o.detail = std::to_string(spaces) + " spaces checked" + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome homeomorphism_catalog() {
    Outcome o;
    std::vector<euclid::MapSpec> maps = {euclid::interval_line(), euclid::cube_sphere(), euclid::circle_square()};
    for (int n = 1; n <= 3; ++n) {
        maps.push_back(euclid::ball_space(n));
    }
    for (int n = 2; n <= 3; ++n) {
        maps.push_back(euclid::hemisphere_disc(n));
    }
    double worst = 0;
    for (const auto& m : maps) {
        const auto r = euclid::check_round_trip(m, 10000, 0, 1e-12);
        worst = std::max(worst, r.max_error);
        o.require(r.passed && r.samples == 10000, m.name + " round trip " + sci(r.max_error));
    }
    const double jump = euclid::detect_inverse_jump(euclid::circle_param(), 1e-3);
    const double square = euclid::detect_inverse_jump(euclid::circle_square(), 1e-3);
    o.require(std::abs(jump - 0.998) <= 1e-9, "circle-param jump " + sci(jump));
    o.require(square < 1e-2, "circle-square jump " + sci(square));
    if (o.pass) {
        o.detail = std::to_string(maps.size()) + " maps x 1e4 samples, worst round trip " + sci(worst) +
                   " (tol 1e-12); jumps " + std::to_string(jump) + " / " + sci(square);
    }
    return o;
}

Outcome sphere_proofs() {
    Outcome o;
    const auto hemi = zoo::sphere_hemispheres();
    const auto stereo = zoo::sphere_stereo();
    o.require(atlas::verify_atlas(hemi).passed, "hemisphere atlas fails");
    o.require(atlas::verify_atlas(stereo).passed, "stereographic atlas fails");
    o.require(atlas::atlases_equivalent(hemi, stereo).passed, "atlases not equivalent");

    double err_stereo = 0;
    const auto ts = atlas::transition(stereo, "north", "south", config(1000));
    o.require(ts.overlap_samples.size() == 1000, "fewer than 1e3 overlap samples");
    for (const auto& z : ts.overlap_samples) {
        const double r2 = z.squaredNorm();
        const Vec expected = v2(z[0] / r2, z[1] / r2);
        err_stereo = std::max(err_stereo, max_abs(Vec(ts(z) - expected)));
    }
    o.require(err_stereo <= 1e-10, "north<-south error " + sci(err_stereo));

    double err_hemi = 0;
    const auto th = atlas::transition(hemi, "x3pos", "x2pos", config(1000));
    for (const auto& x : th.overlap_samples) {
        const Vec expected = v2(x[0], std::sqrt(1 - x[0] * x[0] - x[1] * x[1]));
        err_hemi = std::max(err_hemi, max_abs(Vec(th(x) - expected)));
    }
    o.require(err_hemi <= 1e-10, "x3pos<-x2pos error " + sci(err_hemi));

    double err_cross = 0;
    const auto u = atlas::atlas_union(hemi, stereo);
    const auto tc = atlas::transition(u, "x2pos", "north", config(1000));
    for (const auto& z : tc.overlap_samples) {
        const double q = 1 + z.squaredNorm();
        const Vec expected = v2(2 * z[0] / q, -(1 - z.squaredNorm()) / q);
        err_cross = std::max(err_cross, max_abs(Vec(tc(z) - expected)));
    }
    o.require(err_cross <= 1e-10, "x2pos<-north error " + sci(err_cross));
    if (o.pass) {
        o.detail = "both atlases pass and are equivalent; closed-form errors " + sci(err_stereo) + ", " +
                   sci(err_hemi) + ", " + sci(err_cross) + " (tol 1e-10)";
    }
    return o;
}

Outcome projective_plane() {
    Outcome o;
    const auto m = zoo::projective_plane();
    o.require(atlas::verify_atlas(m).passed, "atlas fails");
    const auto t = atlas::transition(m, "u1", "u3", config(1000));
    double err = 0;
    for (const auto& x : t.overlap_samples) {
        const Vec expected = v2(x[1] / x[0], 1.0 / x[0]);
        err = std::max(err, max_abs(Vec(t(x) - expected)));
    }
    o.require(err <= 1e-10, "u1<-u3 error " + sci(err));
    if (o.pass) {
        o.detail = "atlas passes; u1<-u3 closed form error " + sci(err) + " over " +
                   std::to_string(t.overlap_samples.size()) + " samples (tol 1e-10)";
    }
    return o;
}

Outcome negative_control() {
    Outcome o;
    const auto r = atlas::atlases_equivalent(zoo::real_line(), zoo::cubic_line());
    o.require(!r.passed, "id and cube reported equivalent");
    double witness = std::numeric_limits<double>::infinity();
    for (const auto& w : r.witnesses) {
        if (w.check == "smoothness") {
            witness = std::min(witness, std::abs(w.coords[0]));
        }
    }
    o.require(witness < 0.01, "no smoothness witness below 0.01");
    auto away = config(1000);
    away.min_abs_coord = 0.1;
    o.require(atlas::atlases_equivalent(zoo::real_line(), zoo::cubic_line(), away).passed,
              "restricted to |x| >= 0.1 still fails");
    if (o.pass) {
        o.detail = "fails with smoothness witness at |x| = " + sci(witness) + "; passes for |x| >= 0.1";
    }
    return o;
}

Outcome jacobian_machinery() {
    Outcome o;
    double worst_rel = 0;
    double worst_det = 0;
    std::size_t points = 0;
    for (const auto* name : {"sphere-hemispheres", "sphere-stereo", "projective-plane", "circle", "cylinder",
                             "torus:2", "gl-plus:2", "gl-minus:2", "euclidean:2", "graph-paraboloid:2"}) {
        const auto m = zoo::builtin(name);
        for (const auto& a : m.atlas) {
            for (const auto& b : m.atlas) {
                if (a.id == b.id) {
                    continue;
                }
                const auto t = atlas::transition(m, b.id, a.id, config(100));
                const auto back = atlas::transition(m, a.id, b.id, config(0));
                for (const auto& x : t.overlap_samples) {
                    const Mat an = atlas::jacobian(t, x, atlas::JacobianMode::Analytic).value;
                    const Mat fd = atlas::jacobian(t, x, atlas::JacobianMode::FiniteDifference).value;
                    const Mat fd_back = atlas::jacobian(back, t(x), atlas::JacobianMode::FiniteDifference).value;
                    worst_rel = std::max(worst_rel, relative_discrepancy(an, fd));
                    worst_det = std::max(worst_det, std::abs(fd.determinant() * fd_back.determinant() - 1.0));
                    ++points;
                }
            }
        }
    }
    o.require(worst_rel <= 1e-5, "analytic vs FD " + sci(worst_rel));
    o.require(worst_det <= 1e-4, "det product off by " + sci(worst_det));

    const auto hemi = zoo::sphere_hemispheres();
    const auto t = atlas::transition(hemi, "x3pos", "x2pos", config(100));
    double worst9 = 0;
    for (const auto& x : t.overlap_samples) {
        const double expected = -x[1] / std::sqrt(1 - x[0] * x[0] - x[1] * x[1]);
        const double fd = atlas::jacobian(t, x, atlas::JacobianMode::FiniteDifference).value.determinant();
        const double an = atlas::jacobian(t, x, atlas::JacobianMode::Analytic).value.determinant();
        worst9 = std::max({worst9, std::abs(fd - expected) / (1 + std::abs(expected)),
                           std::abs(an - expected) / (1 + std::abs(expected))});
    }
    o.require(t.overlap_samples.size() == 100, "fewer than 100 hemisphere samples");
    o.require(worst9 <= 1e-5, "hemisphere determinant off by " + sci(worst9));
    if (o.pass) {
        o.detail = std::to_string(points) + " transition points: analytic/FD " + sci(worst_rel) +
                   " (tol 1e-5), det product " + sci(worst_det) + " (tol 1e-4); hemisphere det " + sci(worst9) +
                   " at 100 points";
    }
    return o;
}

Outcome tangent_calculus() {
    Outcome o;
    double duality = 0;
    double roundtrip = 0;
    double invariance = 0;
    std::size_t invariance_checks = 0;
    std::size_t derivation_checks = 0;
    bool derivations = true;
    for (const auto* name : {"euclidean:2", "sphere-stereo", "sphere-hemispheres", "projective-plane", "torus:2",
                             "cylinder", "gl-plus:2"}) {
        const auto m = zoo::builtin(name);
        Rng rng(stream_seed(0, std::hash<std::string>{}(name) & 0xffff));
        std::size_t here = 0;
        for (int trial = 0; trial < 100 || (m.atlas.size() > 1 && here < 100); ++trial) {
            const auto cp = testing::random_charted_point(m, rng);
            if (trial < 10) {
                for (int i = 0; i < m.dim; ++i) {
                    for (int j = 0; j < m.dim; ++j) {
                        const double d = tangent::apply(m, tangent::basis_vector(m, cp.point, cp.chart, i),
                                                        tangent::coordinate_function(m, cp.chart, j));
                        duality = std::max(duality, std::abs(d - (i == j ? 1.0 : 0.0)));
                    }
                }
            }
            const auto f = testing::random_field(rng, m.name, m.ambient_dim);
            const auto x = tangent::make_vector(m, cp.point, cp.chart, testing::gaussian_vec(rng, m.dim));
            const double xf = tangent::apply(m, x, f);
            for (const auto& other : cp.others) {
                const auto y = tangent::change_chart(m, x, other);
                invariance = std::max(invariance, std::abs(tangent::apply(m, y, f) - xf) / (1 + std::abs(xf)));
                roundtrip = std::max(roundtrip, max_abs(Vec(tangent::change_chart(m, y, cp.chart).components -
                                                            x.components)));
                ++invariance_checks;
                ++here;
            }
            if (trial < 100) {
                const auto g = testing::random_field(rng, m.name, m.ambient_dim);
                const auto h = testing::random_field(rng, m.name, m.ambient_dim);
                const auto outer = [](const Vec& u) { return u[0] * std::sin(u[1]) + u[2] * u[2]; };
                derivations = derivations && tangent::check_leibniz(m, x, f, g, 1e-5).passed;
                derivations = derivations && tangent::check_chain_rule(m, x, outer, {}, {f, g, h}, 1e-5).passed;
                derivations = derivations && tangent::check_chain_rule(m, x, outer, {}, {f, g, f}, 1e-5).passed;
                ++derivation_checks;
            }
        }
    }
    o.require(duality <= 1e-6, "basis duality " + sci(duality));
    o.require(roundtrip <= 1e-9, "change_chart round trip " + sci(roundtrip));
    o.require(invariance <= 1e-6, "chart invariance " + sci(invariance));
    o.require(derivations, "Leibniz or chain rule failed at 1e-5");
    const auto bundle = atlas::verify_atlas(tangent::bundle(zoo::sphere_stereo()));
    o.require(bundle.passed && bundle.pairs.size() == 1, "bundle atlas of sphere-stereo fails");
    if (o.pass) {
        o.detail = "duality " + sci(duality) + ", round trip " + sci(roundtrip) + ", invariance " + sci(invariance) +
                   " over " + std::to_string(invariance_checks) + " (v, f), " + std::to_string(derivation_checks) +
                   " derivation triples at 1e-5, T(sphere-stereo) passes";
    }
    return o;
}

Outcome vector_fields() {
    Outcome o;
    const auto s = zoo::sphere_stereo();
    const auto rot = tangent::sphere_rotation_field();
    const auto r = tangent::check_field_consistency(s, rot, 1000, 0, 1e-6);
    o.require(r.passed, "consistency error " + sci(r.max_error));
    tangent::ScalarField height;
    height.manifold = s.name;
    height.eval = [](const Vec& p) { return p[2]; };
    const auto lh = tangent::lie_derivative(s, rot, height);
    Rng rng(0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        worst = std::max(worst, std::abs(lh(s.sample(rng))));
    }
    for (const auto& p : s.landmarks) {
        worst = std::max(worst, std::abs(lh(p)));
    }
    o.require(worst <= 1e-6, "Lie derivative of height " + sci(worst));
    if (o.pass) {
        o.detail = "consistency " + sci(r.max_error) + " over " + std::to_string(r.samples) +
                   " overlap samples (tol 1e-6); |X(height)| <= " + sci(worst);
    }
    return o;
}

std::string capture(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    (void)cli::run_cli(args, out, err);
    return out.str();
}

std::string run_binary(const std::string& args) {
    const std::string cmd = std::string(CHARTWORK_BINARY) + " " + args + " 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) {
        return {};
    }
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe.get())) {
        out.append(buf.data(), n);
    }
    return out;
}

Outcome determinism() {
    Outcome o;
    const std::string data = CHARTWORK_TEST_DATA;
    const std::vector<std::vector<std::string>> verbs = {
        {"topo", "check", data + "/tau.json"},
        {"topo", "props", data + "/tau.json", "--set", "2"},
        {"topo", "enumerate", "--n", "3"},
        {"topo", "map", data + "/sierpinski.json", data + "/sierpinski_ab.json"},
        {"atlas", "verify", "sphere-hemispheres"},
        {"atlas", "transition", "sphere-stereo", "--from", "south", "--to", "north", "--point", "2,0"},
        {"atlas", "equivalent", "real-line", "cubic-line"},
        {"tangent", "transform", "sphere-stereo", "--point", "1,0", "--components", "1,0", "--from", "north", "--to",
         "south"},
        {"homeo", "check", "ball-space-3"},
        {"homeo", "jump", "circle-param"},
        {"homeo", "list"},
        {"zoo", "list"},
    };
    std::size_t compared = 0;
    for (auto args : verbs) {
        args.insert(args.begin(), {"--json", "--seed", "17", "--samples", "300"});
        const auto a = capture(args);
        const auto b = capture(args);
        o.require(!a.empty() && a == b, "in-process output differs for " + args[5] + " " + args[6]);
        std::string line;
        for (const auto& s : args) {
            line += "'" + s + "' ";
        }
        const auto c = run_binary(line);
        const auto d = run_binary(line);
        o.require(c == d && c == a, "binary output differs for " + args[5] + " " + args[6]);
        ++compared;
    }
    if (o.pass) {
        o.detail = std::to_string(compared) + " verbs byte-identical in process and through the binary";
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"topology enumeration", enumeration_counts},
        {"counterexample suite", counterexample_suite},
        {"Hausdorff iff discrete for n <= 4", hausdorff_discrete},
        {"homeomorphism catalog", homeomorphism_catalog},
        {"sphere atlases", sphere_proofs},
        {"projective plane", projective_plane},
        {"negative control", negative_control},
        {"Jacobian machinery", jacobian_machinery},
        {"tangent calculus", tangent_calculus},
        {"vector fields", vector_fields},
        {"determinism", determinism},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << index << "] " << name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "chartwork/cli.hpp"

using chartwork::cli::run_cli;
using nlohmann::json;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string data(const std::string& name) { return std::string(CHARTWORK_TEST_DATA) + "/" + name; }

json run_json(std::vector<std::string> args, int expected_code) {
    args.insert(args.begin(), "--json");
    const auto r = run(args);
    REQUIRE(r.code == expected_code);
    return json::parse(r.out);
}

bool mentions(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("space file parsing") {
    const auto s = chartwork::cli::parse_space(R"({"points": ["a", "b"], "opens": [[], ["a"], ["a"], ["b", "a"]]})");
    CHECK(s.opens().size() == 3);
    CHECK_THROWS_AS((void)chartwork::cli::parse_space("{"), chartwork::cli::SpaceFileError);
    CHECK_THROWS_AS((void)chartwork::cli::parse_space(R"({"points": ["a", ""], "opens": []})"),
                    chartwork::cli::SpaceFileError);
    CHECK_THROWS_AS((void)chartwork::cli::parse_space(R"({"points": ["a", "a"], "opens": []})"),
                    chartwork::cli::SpaceFileError);
    try {
        (void)chartwork::cli::parse_space(R"({"points": ["a"], "opens": [[], ["a"], ["a", "q"]]})");
        FAIL("expected SpaceFileError");
    } catch (const chartwork::cli::SpaceFileError& e) {
        CHECK(mentions(e.what(), "opens[2][1]"));
    }
}

TEST_CASE("topo check") {
    const auto ok = run_json({"topo", "check", data("tau.json")}, 0);
    CHECK(ok["report"]["is_topology"] == true);
    const auto bad = run_json({"topo", "check", data("not_topology.json")}, 1);
    CHECK(bad["report"]["violations"][0]["axiom"] == 2);
    CHECK(bad["report"]["violations"][0]["witness"][2] == json({"a", "b"}));
    CHECK(run({"topo", "check", data("bad_label.json")}).code == 2);
    CHECK(run({"topo", "check", data("malformed.json")}).code == 2);
    CHECK(run({"topo", "check", data("missing.json")}).code == 2);
}

TEST_CASE("topo props") {
    const auto t = run_json({"topo", "props", data("tau.json")}, 0);
    CHECK(t["hausdorff"] == false);
    CHECK(t["hausdorff_witness"] == json({"2", "3"}));
    CHECK(t["connected"] == false);
    CHECK(t["compact"] == true);

    const auto d = run_json({"topo", "props", data("discrete2.json")}, 0);
    CHECK(d["hausdorff"] == true);
    CHECK(d["connected"] == false);
    const auto tr = run_json({"topo", "props", data("trivial2.json")}, 0);
    CHECK(tr["hausdorff"] == false);
    CHECK(tr["connected"] == true);

    const auto s = run_json({"topo", "props", data("sierpinski.json"), "--set", "1"}, 0);
    CHECK(s["set"]["closure"] == json({"1", "2"}));
    CHECK(s["set"]["boundary"] == json({"2"}));
    CHECK(s["set"]["interior"] == json({"1"}));
    CHECK(s["set"]["dense"] == true);
    CHECK(run({"topo", "props", data("sierpinski.json"), "--set", "9"}).code == 2);
    CHECK(run({"topo", "props", data("not_topology.json")}).code == 1);
}

TEST_CASE("topo enumerate") {
    const std::uint64_t expected[] = {1, 1, 4, 29, 355};
    for (int n = 0; n <= 4; ++n) {
        const auto r = run({"topo", "enumerate", "--n", std::to_string(n), "--count-only"});
        CHECK(r.code == 0);
        CHECK(r.out == std::to_string(expected[n]) + "\n");
    }
    CHECK(run_json({"topo", "enumerate", "--n", "2"}, 0)["topologies"].size() == 4);
    CHECK(run({"topo", "enumerate", "--n", "5"}).code == 2);
}

TEST_CASE("topo map") {
    const auto h = run_json({"topo", "map", data("sierpinski.json"), data("sierpinski_ab.json")}, 0);
    CHECK(h["homeomorphic"] == true);
    CHECK(h["assignment"]["1"] == "b");
    CHECK(h["assignment"]["2"] == "a");
    CHECK(run({"topo", "map", data("sierpinski.json"), data("trivial2.json")}).code == 1);

    const auto c = run_json({"topo", "map", data("sierpinski.json"), data("trivial2.json"), "--assign", "1:a,2:b"}, 0);
    CHECK(c["continuous"] == true);
    CHECK(c["homeomorphism"] == false);
    CHECK(run({"topo", "map", data("trivial2.json"), data("sierpinski_ab.json"), "--assign", "a:a,b:b"}).code == 1);
    CHECK(run({"topo", "map", data("trivial2.json"), data("sierpinski_ab.json"), "--assign", "a:a"}).code == 2);
    CHECK(run({"topo", "map", data("trivial2.json"), data("sierpinski_ab.json"), "--assign", "a=b"}).code == 2);
}

TEST_CASE("atlas verify") {
    const auto r = run_json({"--samples", "200", "atlas", "verify", "sphere-stereo"}, 0);
    CHECK(r["passed"] == true);
    CHECK(r["config"]["fd_tol"] == 1e-4);
    CHECK(r["config"]["det_floor"] == 1e-8);
    CHECK(r["config"]["samples"] == 200);

    const auto c = run_json({"--samples", "200", "atlas", "verify", "real-line-cubic"}, 1);
    bool near_zero = false;
    for (const auto& w : c["pairs"][0]["witnesses"]) {
        near_zero = near_zero || std::abs(w["coords"][0].get<double>()) < 0.01;
    }
    CHECK(near_zero);

    CHECK(run({"--samples", "200", "atlas", "verify", "real-line-cubic", "--min-abs-coord", "0.1"}).code == 0);
    CHECK(run({"--samples", "100", "atlas", "verify", "sphere-stereo", "--bundle"}).code == 0);
    const auto text = run({"--samples", "100", "atlas", "verify", "sphere-truncated"});
    CHECK(text.code == 1);
    CHECK(mentions(text.out, "uncovered point"));

    const auto unknown = run({"atlas", "verify", "klein-bottle"});
    CHECK(unknown.code == 2);
    CHECK(mentions(unknown.err, "sphere-hemispheres"));
    CHECK(run({"--samples", "0", "atlas", "verify", "circle"}).code == 2);
}

TEST_CASE("atlas transition") {
    const auto t = run_json({"atlas", "transition", "sphere-stereo", "--from", "south", "--to", "north", "--point", "2,0"}, 0);
    CHECK(t["value"][0].get<double>() == doctest::Approx(0.5));
    CHECK(t["value"][1].get<double>() == 0.0);
    CHECK(t["jacobian_mode"] == "analytic");

    const auto h = run_json(
        {"atlas", "transition", "sphere-hemispheres", "--from", "x2pos", "--to", "x3pos", "--point", "0.1,0.2"}, 0);
    CHECK(h["det"].get<double>() == doctest::Approx(-0.205195).epsilon(1e-6));
    CHECK(run({"atlas", "transition", "sphere-stereo", "--from", "south", "--to", "north", "--point", "0,0"}).code == 2);
    CHECK(run({"atlas", "transition", "sphere-stereo", "--from", "south", "--to", "up", "--point", "1,0"}).code == 2);
    CHECK(run({"atlas", "transition", "sphere-stereo", "--from", "south", "--to", "north", "--point", "1,x"}).code == 2);
    CHECK(run({"atlas", "transition", "sphere-stereo", "--from", "south", "--to", "north", "--point", "1"}).code == 2);
}

TEST_CASE("atlas equivalent") {
    const auto e = run_json({"--samples", "200", "atlas", "equivalent", "sphere-hemispheres", "sphere-stereo"}, 0);
    CHECK(e["equivalent"] == true);
    CHECK(e["cross_pairs"].size() == 12);
    const auto n = run_json({"--samples", "200", "atlas", "equivalent", "real-line", "cubic-line"}, 1);
    CHECK(n["witnesses"].size() >= 1);
    CHECK(run({"--samples", "200", "atlas", "equivalent", "real-line", "cubic-line", "--min-abs-coord", "0.1"}).code ==
          0);
    CHECK(run({"atlas", "equivalent", "real-line", "circle"}).code == 2);
}

TEST_CASE("tangent transform") {
    const auto t = run_json({"tangent", "transform", "sphere-stereo", "--point", "1,0", "--components", "1,0", "--from",
                             "north", "--to", "south"},
                            0);
    CHECK(t["components_to"][0].get<double>() == doctest::Approx(-1.0));
    CHECK(t["components_to"][1].get<double>() == doctest::Approx(0.0));
    CHECK(t["roundtrip_error"].get<double>() <= 1e-9);
    CHECK(run({"tangent", "transform", "sphere-stereo", "--point", "0,0,1", "--ambient", "--components", "1,0",
               "--from", "north", "--to", "south"})
              .code == 2);
    CHECK(run({"tangent", "transform", "sphere-stereo", "--point", "0,0", "--components", "1,0", "--from", "north",
               "--to", "south"})
              .code == 2);
}

TEST_CASE("homeo verbs") {
    const auto c = run_json({"--samples", "500", "homeo", "check", "ball-space-2"}, 0);
    CHECK(c["tolerance"] == 1e-12);
    CHECK(c["passed"] == true);
    const auto j = run_json({"homeo", "jump", "circle-param", "--eps", "1e-3"}, 1);
    CHECK(std::abs(j["jump"].get<double>() - 0.998) <= 1e-9);
    CHECK(run({"homeo", "jump", "circle-square", "--eps", "1e-3"}).code == 0);
    CHECK(run({"homeo", "check", "nothing"}).code == 2);
    CHECK(run({"homeo", "jump", "ball-space-2"}).code == 2);
    CHECK(run({"homeo", "list"}).code == 0);
    CHECK(mentions(run({"zoo", "list"}).out, "torus:k"));
}

TEST_CASE("usage errors and help") {
    CHECK(run({}).code == 2);
    CHECK(run({"topo"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"atlas", "verify", "--help"}).code == 0);
}

TEST_CASE("machine-readable output is byte-identical across runs") {
    const std::vector<std::vector<std::string>> verbs = {
        {"--json", "--seed", "7", "--samples", "150", "atlas", "verify", "projective-plane"},
        {"--json", "--seed", "7", "--samples", "150", "atlas", "equivalent", "real-line", "cubic-line"},
        {"--json", "--seed", "7", "--samples", "300", "homeo", "check", "cube-sphere"},
        {"--json", "topo", "enumerate", "--n", "3"},
    };
    for (const auto& args : verbs) {
        const auto a = run(args);
        const auto b = run(args);
        CHECK(a.out == b.out);
        CHECK_FALSE(a.out.empty());
    }
    const auto s1 = run({"--json", "--seed", "1", "--samples", "150", "atlas", "verify", "sphere-stereo"});
    const auto s2 = run({"--json", "--seed", "2", "--samples", "150", "atlas", "verify", "sphere-stereo"});
    CHECK(s1.out != s2.out);
}

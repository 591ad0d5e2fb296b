#include "chartwork/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/LU>
#include <json.hpp>

#include "chartwork/atlas.hpp"
#include "chartwork/euclid_maps.hpp"
#include "chartwork/tangent.hpp"
#include "chartwork/zoo.hpp"

namespace chartwork::cli {

using nlohmann::json;

namespace {

/// Input problem detected after argument parsing; exits with kExitUsage.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t samples = 1000;
    std::optional<double> tol;
    bool json = false;
};

std::string fmt(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(num(v[i]));
    }
    return a;
}

json mat_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vec_json(m.row(i).transpose()));
    }
    return rows;
}

std::string mat_text(const Mat& m) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        s += (i ? ", " : "") + format_vec(m.row(i).transpose());
    }
    return s + "]";
}

Vec parse_vec(const std::string& text, const std::string& what) {
    std::vector<double> xs;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string item = text.substr(pos, comma - pos);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        double x = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), x);
        if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
            throw UsageError("cannot parse " + what + " '" + text + "': bad number '" + item + "'");
        }
        xs.push_back(x);
        pos = comma + 1;
    }
    Vec v(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = xs[i];
    }
    return v;
}

atlas::ManifoldSpec lookup_manifold(const std::string& name) {
    try {
        return zoo::builtin(name);
    } catch (const zoo::UnknownBuiltinError& e) {
        throw UsageError(e.what());
    }
}

std::string labels_text(const std::vector<std::string>& labels) {
    std::string s = "{";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        s += (i ? "," : "") + labels[i];
    }
    return s + "}";
}

json labels_json(const std::vector<std::string>& labels) { return json(labels); }

json opens_json(const topo::FiniteSpace& s) {
    json a = json::array();
    for (auto o : s.opens()) {
        a.push_back(labels_json(s.labels_of(o)));
    }
    return a;
}

void emit(std::ostream& out, const RunConfig& cfg, const json& doc, const std::vector<std::string>& lines) {
    if (cfg.json) {
        out << doc.dump(2) << '\n';
    } else {
        for (const auto& l : lines) {
            out << l << '\n';
        }
    }
}

// ---------------------------------------------------------------- topo

json topology_report_json(const topo::FiniteSpace& s, const topo::TopologyReport& r) {
    json v = json::array();
    for (const auto& viol : r.violations) {
        json w = json::array();
        for (auto set : viol.witness) {
            w.push_back(labels_json(s.labels_of(set)));
        }
        v.push_back({{"axiom", static_cast<int>(viol.axiom)}, {"name", topo::axiom_name(viol.axiom)}, {"witness", w}});
    }
    return {{"is_topology", r.is_topology}, {"violations", v}};
}

std::vector<std::string> topology_report_lines(const topo::FiniteSpace& s, const topo::TopologyReport& r) {
    std::vector<std::string> lines{std::string("topology: ") + (r.is_topology ? "yes" : "no")};
    for (const auto& viol : r.violations) {
        std::string w;
        for (auto set : viol.witness) {
            w += " " + labels_text(s.labels_of(set));
        }
        lines.push_back("violation: axiom " + std::to_string(static_cast<int>(viol.axiom)) + " (" +
                        topo::axiom_name(viol.axiom) + ") witness" + w);
    }
    return lines;
}

int cmd_topo_check(const RunConfig& cfg, const std::string& file, std::ostream& out) {
    const auto space = load_space(file);
    const auto report = topo::verify_topology(space);
    json doc = {{"command", "topo check"},
                {"file", file},
                {"points", space.points()},
                {"opens", opens_json(space)},
                {"report", topology_report_json(space, report)}};
    emit(out, cfg, doc, topology_report_lines(space, report));
    return report.is_topology ? kExitPass : kExitFail;
}

std::vector<std::string> split_labels(const std::string& text) {
    std::vector<std::string> labels;
    if (text.empty()) {
        return labels;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        labels.push_back(text.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return labels;
}

int cmd_topo_props(const RunConfig& cfg, const std::string& file, const std::optional<std::string>& set,
                   std::ostream& out) {
    const auto space = load_space(file);
    const auto report = topo::verify_topology(space);
    if (!report.is_topology) {
        json doc = {{"command", "topo props"}, {"file", file}, {"report", topology_report_json(space, report)}};
        emit(out, cfg, doc, topology_report_lines(space, report));
        return kExitFail;
    }
    const auto h = topo::is_hausdorff(space);
    const bool connected = topo::is_connected(space);
    json doc = {{"command", "topo props"},
                {"file", file},
                {"points", space.points()},
                {"hausdorff", h.hausdorff},
                {"connected", connected},
                {"compact", topo::is_compact(space)}};
    std::vector<std::string> lines{std::string("hausdorff: ") + (h.hausdorff ? "true" : "false")};
    if (h.witness) {
        const auto& pts = space.points();
        doc["hausdorff_witness"] = {pts[h.witness->first], pts[h.witness->second]};
        lines.push_back("hausdorff witness: " + pts[h.witness->first] + ", " + pts[h.witness->second]);
    }
    lines.push_back(std::string("connected: ") + (connected ? "true" : "false"));
    lines.push_back("compact: true");
    if (set) {
        topo::Subset a = 0;
        try {
            a = space.subset_of(split_labels(*set));
        } catch (const topo::DomainError& e) {
            throw UsageError(std::string("--set: ") + e.what());
        }
        const auto in = topo::interior(space, a);
        const auto cl = topo::closure(space, a);
        const auto bd = topo::boundary(space, a);
        const bool dense = cl == space.all();
        doc["set"] = {{"subset", space.labels_of(a)},
                      {"interior", space.labels_of(in)},
                      {"closure", space.labels_of(cl)},
                      {"boundary", space.labels_of(bd)},
                      {"dense", dense},
                      {"open", space.is_open(a)},
                      {"closed", space.is_closed(a)}};
        lines.push_back("subset: " + labels_text(space.labels_of(a)));
        lines.push_back("interior: " + labels_text(space.labels_of(in)));
        lines.push_back("closure: " + labels_text(space.labels_of(cl)));
        lines.push_back("boundary: " + labels_text(space.labels_of(bd)));
        lines.push_back(std::string("dense: ") + (dense ? "true" : "false"));
    }
    emit(out, cfg, doc, lines);
    return kExitPass;
}

int cmd_topo_enumerate(const RunConfig& cfg, int n, bool count_only, std::ostream& out) {
    if (n < 0 || static_cast<std::size_t>(n) > topo::kMaxEnumerationPoints) {
        throw UsageError("--n must lie in [0, " + std::to_string(topo::kMaxEnumerationPoints) + "]");
    }
    const auto e = topo::enumerate_topologies(static_cast<std::size_t>(n), count_only);
    json doc = {{"command", "topo enumerate"}, {"n", n}, {"count", e.count}};
    std::vector<std::string> lines{std::to_string(e.count)};
    if (!count_only) {
        json list = json::array();
        for (const auto& s : e.spaces) {
            list.push_back(opens_json(s));
            std::string line;
            for (auto o : s.opens()) {
                line += (line.empty() ? "" : " ") + labels_text(s.labels_of(o));
            }
            lines.push_back(line);
        }
        doc["topologies"] = list;
    }
    emit(out, cfg, doc, lines);
    return kExitPass;
}

int cmd_topo_map(const RunConfig& cfg, const std::string& f1, const std::string& f2,
                 const std::optional<std::string>& assign, std::ostream& out) {
    const auto s1 = load_space(f1);
    const auto s2 = load_space(f2);
    for (const auto* s : {&s1, &s2}) {
        if (!topo::verify_topology(*s).is_topology) {
            throw UsageError("input is not a topology; run 'topo check' for the violated axiom");
        }
    }
    json doc = {{"command", "topo map"}, {"source", f1}, {"target", f2}};
    std::vector<std::string> lines;
    if (!assign) {
        if (std::max(s1.size(), s2.size()) > topo::kMaxHomeomorphismSearch) {
            throw UsageError("homeomorphism search is limited to " + std::to_string(topo::kMaxHomeomorphismSearch) +
                             " points; pass --assign");
        }
        const auto h = topo::find_homeomorphism(s1, s2);
        doc["homeomorphic"] = h.has_value();
        lines.push_back(std::string("homeomorphic: ") + (h ? "true" : "false"));
        if (h) {
            json a = json::object();
            std::string text;
            for (std::size_t i = 0; i < s1.size(); ++i) {
                const auto& to = s2.points()[h->image()[i]];
                a[s1.points()[i]] = to;
                text += (text.empty() ? "" : ",") + s1.points()[i] + ":" + to;
            }
            doc["assignment"] = a;
            lines.push_back("assignment: " + text);
        }
        emit(out, cfg, doc, lines);
        return h ? kExitPass : kExitFail;
    }
    std::vector<std::size_t> image(s1.size(), s2.size());
    for (const auto& pair : split_labels(*assign)) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos) {
            throw UsageError("--assign entries look like source:target, got '" + pair + "'");
        }
        try {
            image.at(s1.index_of(pair.substr(0, colon))) = s2.index_of(pair.substr(colon + 1));
        } catch (const topo::DomainError& e) {
            throw UsageError(std::string("--assign: ") + e.what());
        }
    }
    for (std::size_t i = 0; i < image.size(); ++i) {
        if (image[i] == s2.size()) {
            throw UsageError("--assign gives no image for point '" + s1.points()[i] + "'");
        }
    }
    const topo::FiniteMap f(s1, s2, image);
    const bool cont = topo::is_continuous(f);
    const bool open = topo::is_open_map(f);
    const bool closed = topo::is_closed_map(f);
    const bool homeo = topo::is_homeomorphism(f);
    doc["continuous"] = cont;
    doc["open_map"] = open;
    doc["closed_map"] = closed;
    doc["bijective"] = f.is_bijective();
    doc["homeomorphism"] = homeo;
    lines = {std::string("continuous: ") + (cont ? "true" : "false"),
             std::string("open map: ") + (open ? "true" : "false"),
             std::string("closed map: ") + (closed ? "true" : "false"),
             std::string("bijective: ") + (f.is_bijective() ? "true" : "false"),
             std::string("homeomorphism: ") + (homeo ? "true" : "false")};
    emit(out, cfg, doc, lines);
    return cont ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- atlas

struct AtlasFlags {
    std::optional<double> fd_tol;
    std::optional<double> det_floor;
    std::optional<double> margin;
    double min_abs_coord = 0.0;
    bool bundle = false;
};

atlas::VerifyConfig verify_config(const RunConfig& cfg, const AtlasFlags& flags) {
    atlas::VerifyConfig v;
    v.seed = cfg.seed;
    v.samples = cfg.samples;
    if (cfg.tol) {
        v.transition_tol = *cfg.tol;
    }
    if (flags.fd_tol) {
        v.fd_tol = *flags.fd_tol;
    }
    if (flags.det_floor) {
        v.det_floor = *flags.det_floor;
    }
    if (flags.margin) {
        v.margin = *flags.margin;
    }
    v.min_abs_coord = flags.min_abs_coord;
    return v;
}

json config_json(const atlas::VerifyConfig& c) {
    return {{"seed", c.seed},
            {"samples", c.samples},
            {"roundtrip_tol", c.roundtrip_tol},
            {"transition_tol", c.transition_tol},
            {"det_floor", c.det_floor},
            {"fd_tol", c.fd_tol},
            {"fd_step", c.fd_step},
            {"margin", c.margin},
            {"min_overlap", c.min_overlap},
            {"min_abs_coord", c.min_abs_coord}};
}

json witness_json(const atlas::Witness& w) {
    return {{"check", w.check}, {"from", w.from}, {"to", w.to}, {"coords", vec_json(w.coords)}, {"value", num(w.value)}};
}

std::string witness_text(const atlas::Witness& w) {
    std::string s = "witness: " + w.check;
    if (!w.from.empty()) {
        s += " " + w.from + (w.to.empty() || w.to == w.from ? "" : "->" + w.to);
    }
    return s + " at " + format_vec(w.coords) + " value " + fmt(w.value);
}

json atlas_report_json(const atlas::AtlasReport& r) {
    json charts = json::array();
    for (const auto& c : r.charts) {
        json j = {{"chart", c.chart},
                  {"samples", c.samples},
                  {"roundtrip_max_error", num(c.roundtrip_max_error)},
                  {"passed", c.passed}};
        if (c.witness) {
            j["witness"] = witness_json(*c.witness);
        }
        charts.push_back(j);
    }
    json pairs = json::array();
    for (const auto& p : r.pairs) {
        json w = json::array();
        for (const auto& x : p.witnesses) {
            w.push_back(witness_json(x));
        }
        pairs.push_back({{"pair", {p.chart_a, p.chart_b}},
                         {"overlap_samples", p.overlap_samples},
                         {"thin_overlap", p.thin_overlap},
                         {"roundtrip_max_error", num(p.roundtrip_max_error)},
                         {"min_abs_det", num(p.min_abs_det)},
                         {"max_fd_discrepancy", num(p.max_fd_discrepancy)},
                         {"smoothness_flag", p.smoothness_flag},
                         {"passed", p.passed},
                         {"witnesses", w}});
    }
    json doc = {{"manifold", r.manifold},
                {"config", config_json(r.config)},
                {"covering", {{"samples", r.covering_samples}, {"uncovered", r.uncovered}}},
                {"charts", charts},
                {"pairs", pairs},
                {"passed", r.passed}};
    if (r.covering_witness) {
        doc["covering"]["witness"] = witness_json(*r.covering_witness);
    }
    return doc;
}

std::vector<std::string> atlas_report_lines(const atlas::AtlasReport& r) {
    std::vector<std::string> lines;
    const auto& c = r.config;
    lines.push_back("manifold: " + r.manifold);
    lines.push_back("tolerances: roundtrip " + fmt(c.roundtrip_tol) + ", transition " + fmt(c.transition_tol) +
                    ", det floor " + fmt(c.det_floor) + ", fd " + fmt(c.fd_tol) + ", margin " + fmt(c.margin) +
                    " (seed " + std::to_string(c.seed) + ", samples " + std::to_string(c.samples) + ")");
    lines.push_back("covering: " + std::to_string(r.covering_samples - r.uncovered) + "/" +
                    std::to_string(r.covering_samples) + " points covered");
    if (r.covering_witness) {
        lines.push_back("  uncovered point " + format_vec(r.covering_witness->coords));
    }
    for (const auto& ch : r.charts) {
        lines.push_back("chart " + ch.chart + ": " + (ch.passed ? "ok" : "FAIL") + " (roundtrip " +
                        fmt(ch.roundtrip_max_error) + " over " + std::to_string(ch.samples) + " points)");
        if (ch.witness) {
            lines.push_back("  " + witness_text(*ch.witness));
        }
    }
    for (const auto& p : r.pairs) {
        std::string line = "pair " + p.chart_a + "/" + p.chart_b + ": ";
        if (p.overlap_samples == 0) {
            line += "empty overlap";
        } else {
            line += std::string(p.passed ? "ok" : "FAIL") + " (" + std::to_string(p.overlap_samples) +
                    " samples, roundtrip " + fmt(p.roundtrip_max_error) + ", min |det| " + fmt(p.min_abs_det) +
                    ", fd discrepancy " + fmt(p.max_fd_discrepancy) + ")";
            if (p.thin_overlap) {
                line += " [thin overlap]";
            }
        }
        lines.push_back(line);
        for (const auto& w : p.witnesses) {
            lines.push_back("  " + witness_text(w));
        }
    }
    lines.push_back(std::string("result: ") + (r.passed ? "PASS" : "FAIL"));
    return lines;
}

int cmd_atlas_verify(const RunConfig& cfg, const AtlasFlags& flags, const std::string& name, std::ostream& out) {
    auto m = lookup_manifold(name);
    if (flags.bundle) {
        try {
            m = tangent::bundle(m);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    const auto r = atlas::verify_atlas(m, verify_config(cfg, flags));
    json doc = atlas_report_json(r);
    doc["command"] = "atlas verify";
    emit(out, cfg, doc, atlas_report_lines(r));
    return r.passed ? kExitPass : kExitFail;
}

int cmd_atlas_equivalent(const RunConfig& cfg, const AtlasFlags& flags, const std::string& a, const std::string& b,
                         std::ostream& out) {
    const auto ma = lookup_manifold(a);
    const auto mb = lookup_manifold(b);
    atlas::EquivalenceReport r;
    try {
        r = atlas::atlases_equivalent(ma, mb, verify_config(cfg, flags));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json cross = json::array();
    for (auto i : r.cross_pairs) {
        const auto& p = r.union_report.pairs[i];
        cross.push_back({p.chart_a, p.chart_b});
    }
    json w = json::array();
    for (const auto& x : r.witnesses) {
        w.push_back(witness_json(x));
    }
    json doc = {{"command", "atlas equivalent"},
                {"atlas_a", r.atlas_a},
                {"atlas_b", r.atlas_b},
                {"union", atlas_report_json(r.union_report)},
                {"cross_pairs", cross},
                {"witnesses", w},
                {"equivalent", r.passed}};
    auto lines = atlas_report_lines(r.union_report);
    lines.pop_back();
    lines.push_back(std::string("equivalent: ") + (r.passed ? "yes" : "no"));
    emit(out, cfg, doc, lines);
    return r.passed ? kExitPass : kExitFail;
}

int cmd_atlas_transition(const RunConfig& cfg, const std::string& name, const std::string& from, const std::string& to,
                         const std::string& point_text, std::ostream& out) {
    const auto m = lookup_manifold(name);
    const Vec x = parse_vec(point_text, "--point");
    atlas::TransitionFn t;
    atlas::VerifyConfig vc;
    vc.samples = 0;
    try {
        t = atlas::transition(m, to, from, vc);
    } catch (const atlas::UnknownChartError& e) {
        throw UsageError(e.what());
    }
    if (x.size() != m.dim) {
        throw UsageError("--point needs " + std::to_string(m.dim) + " coordinates");
    }
    atlas::JacobianEstimate jac;
    atlas::JacobianEstimate fd;
    try {
        jac = atlas::jacobian(t, x);
        fd = atlas::jacobian(t, x, atlas::JacobianMode::FiniteDifference);
    } catch (const atlas::OutsideOverlapError& e) {
        throw UsageError(e.what());
    }
    const Vec y = t(x);
    const double det = jac.value.determinant();
    json doc = {{"command", "atlas transition"},
                {"manifold", m.name},
                {"from", t.from},
                {"to", t.to},
                {"point", vec_json(x)},
                {"value", vec_json(y)},
                {"jacobian", mat_json(jac.value)},
                {"jacobian_mode", jac.analytic ? "analytic" : "finite-difference"},
                {"det", num(det)},
                {"fd_jacobian", mat_json(fd.value)},
                {"fd_richardson", num(fd.richardson)},
                {"fd_step", 1e-4}};
    (void)cfg;
    std::vector<std::string> lines{"transition " + t.from + " -> " + t.to + " at " + format_vec(x),
                                   "value: " + format_vec(y),
                                   "jacobian (" + std::string(jac.analytic ? "analytic" : "finite-difference") +
                                       "): " + mat_text(jac.value),
                                   "det: " + fmt(det),
                                   "fd richardson discrepancy: " + fmt(fd.richardson)};
    emit(out, cfg, doc, lines);
    return kExitPass;
}

// ---------------------------------------------------------------- tangent

int cmd_tangent_transform(const RunConfig& cfg, const std::string& name, const std::string& point_text,
                          const std::string& comp_text, const std::string& from, const std::string& to, bool ambient,
                          std::ostream& out) {
    const auto m = lookup_manifold(name);
    Vec p;
    try {
        const auto& src = m.chart(from);
        (void)m.chart(to);
        const Vec given = parse_vec(point_text, "--point");
        if (ambient) {
            if (given.size() != m.ambient_dim) {
                throw UsageError("--point needs " + std::to_string(m.ambient_dim) + " ambient coordinates");
            }
            p = given;
        } else {
            if (given.size() != m.dim) {
                throw UsageError("--point needs " + std::to_string(m.dim) + " chart coordinates");
            }
            if (!src.coord_domain(given, 0.0)) {
                throw UsageError("--point " + format_vec(given) + " is outside chart '" + from + "'");
            }
            p = src.inverse(given);
        }
    } catch (const atlas::UnknownChartError& e) {
        throw UsageError(e.what());
    }
    tangent::TangentVector v;
    tangent::TangentVector w;
    Mat j;
    try {
        v = tangent::make_vector(m, p, from, parse_vec(comp_text, "--components"));
        w = tangent::change_chart(m, v, to);
        j = tangent::change_of_basis(m, p, from, to);
    } catch (const tangent::ChartDomainError& e) {
        throw UsageError(e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto back = tangent::change_chart(m, w, from);
    const double rt = max_abs(Vec(back.components - v.components));
    const double tol = cfg.tol.value_or(1e-9);
    const bool ok = rt <= tol;
    json doc = {{"command", "tangent transform"},
                {"manifold", m.name},
                {"point", vec_json(p)},
                {"from", from},
                {"to", to},
                {"coords_from", vec_json(m.chart(from).forward(p))},
                {"coords_to", vec_json(m.chart(to).forward(p))},
                {"components", vec_json(v.components)},
                {"components_to", vec_json(w.components)},
                {"jacobian", mat_json(j)},
                {"roundtrip_error", num(rt)},
                {"roundtrip_tol", tol},
                {"passed", ok}};
    std::vector<std::string> lines{"point: " + format_vec(p),
                                   from + " coordinates: " + format_vec(m.chart(from).forward(p)) + ", components " +
                                       format_vec(v.components),
                                   to + " coordinates: " + format_vec(m.chart(to).forward(p)) + ", components " +
                                       format_vec(w.components),
                                   "jacobian d(" + to + ")/d(" + from + "): " + mat_text(j),
                                   "roundtrip error: " + fmt(rt) + " (tol " + fmt(tol) + ")"};
    emit(out, cfg, doc, lines);
    return ok ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- homeo

euclid::MapSpec lookup_map(const std::string& name) {
    auto m = euclid::find_map(name);
    if (!m) {
        std::string list;
        for (const auto& c : euclid::catalog()) {
            list += (list.empty() ? "" : ", ") + c.name;
        }
        throw UsageError("unknown map '" + name + "'; available: " + list +
                         " (also ball-space-<n>, hemisphere-disc-<n>, identity-<n>)");
    }
    return *m;
}

int cmd_homeo_check(const RunConfig& cfg, const std::string& name, double margin, std::ostream& out) {
    const auto map = lookup_map(name);
    const double tol = cfg.tol.value_or(1e-12);
    euclid::RoundTripReport r;
    try {
        r = euclid::check_round_trip(map, cfg.samples, cfg.seed, tol, margin);
    } catch (const euclid::UnsupportedError& e) {
        throw UsageError(e.what());
    }
    json doc = {{"command", "homeo check"},
                {"map", r.map},
                {"samples", r.samples},
                {"seed", r.seed},
                {"tolerance", r.tolerance},
                {"margin", r.margin},
                {"max_error", num(r.max_error)},
                {"worst_point", vec_json(r.worst_point)},
                {"image_max_rel_error", num(r.image_max_rel_error)},
                {"passed", r.passed}};
    emit(out, cfg, doc,
         {"map: " + r.map, "samples: " + std::to_string(r.samples) + " (seed " + std::to_string(r.seed) + ", margin " +
                               fmt(r.margin) + ")",
          "max |f^-1(f(x)) - x|: " + fmt(r.max_error) + " at " + format_vec(r.worst_point) + " (tol " +
              fmt(r.tolerance) + ")",
          "max relative |f(f^-1(y)) - y|: " + fmt(r.image_max_rel_error), std::string("result: ") + (r.passed ? "PASS" : "FAIL")});
    return r.passed ? kExitPass : kExitFail;
}

int cmd_homeo_jump(const RunConfig& cfg, const std::string& name, double eps, double threshold, std::ostream& out) {
    const auto map = lookup_map(name);
    double jump = 0;
    try {
        jump = euclid::detect_inverse_jump(map, eps);
    } catch (const std::logic_error& e) {
        throw UsageError(e.what());
    }
    const bool continuous = jump < threshold;
    json doc = {{"command", "homeo jump"}, {"map", map.name}, {"eps", eps},         {"jump", num(jump)},
                {"threshold", threshold}, {"continuous_at_probe", continuous}};
    emit(out, cfg, doc,
         {"map: " + map.name, "inverse jump at eps " + fmt(eps) + ": " + fmt(jump),
          std::string("continuous at probe (jump < ") + fmt(threshold) + "): " + (continuous ? "yes" : "no")});
    return continuous ? kExitPass : kExitFail;
}

int cmd_homeo_list(const RunConfig& cfg, std::ostream& out) {
    json list = json::array();
    std::vector<std::string> lines;
    for (const auto& m : euclid::catalog()) {
        list.push_back({{"name", m.name}, {"dim_in", m.dim_in}, {"dim_out", m.dim_out}, {"seam_probe", bool(m.seam_probe)}});
        lines.push_back(m.name + " (R^" + std::to_string(m.dim_in) + " -> R^" + std::to_string(m.dim_out) + ")");
    }
    emit(out, cfg, {{"command", "homeo list"}, {"maps", list}}, lines);
    return kExitPass;
}

int cmd_zoo_list(const RunConfig& cfg, std::ostream& out) {
    json list = json::array();
    std::vector<std::string> lines;
    for (const auto& name : zoo::builtin_names()) {
        const auto colon = name.find(':');
        const auto m = zoo::builtin(name.substr(0, colon));
        json charts = json::array();
        std::string ids;
        for (const auto& c : m.atlas) {
            charts.push_back(c.id);
            ids += (ids.empty() ? "" : ", ") + c.id;
        }
        list.push_back({{"name", name}, {"example", m.name}, {"dim", m.dim}, {"ambient_dim", m.ambient_dim}, {"charts", charts}});
        lines.push_back(name + ": dim " + std::to_string(m.dim) + " in R^" + std::to_string(m.ambient_dim) +
                        ", charts " + ids + (colon == std::string::npos ? "" : " (for " + m.name + ")"));
    }
    emit(out, cfg, {{"command", "zoo list"}, {"manifolds", list}}, lines);
    return kExitPass;
}

}  // namespace

topo::FiniteSpace parse_space(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpaceFileError(source + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("points") || !doc.contains("opens")) {
        throw SpaceFileError(source + ": expected an object with \"points\" and \"opens\"");
    }
    const auto& pts = doc["points"];
    const auto& opens = doc["opens"];
    if (!pts.is_array() || !opens.is_array()) {
        throw SpaceFileError(source + ": \"points\" and \"opens\" must be arrays");
    }
    std::vector<std::string> labels;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto where = source + ": points[" + std::to_string(i) + "]";
        if (!pts[i].is_string() || pts[i].get<std::string>().empty()) {
            throw SpaceFileError(where + ": labels must be non-empty strings");
        }
        const auto label = pts[i].get<std::string>();
        if (!index.emplace(label, i).second) {
            throw SpaceFileError(where + ": duplicate label '" + label + "'");
        }
        labels.push_back(label);
    }
    if (labels.size() > topo::kMaxPoints) {
        throw SpaceFileError(source + ": at most " + std::to_string(topo::kMaxPoints) + " points are supported");
    }
    std::set<topo::Subset> family;
    for (std::size_t i = 0; i < opens.size(); ++i) {
        const auto where = source + ": opens[" + std::to_string(i) + "]";
        if (!opens[i].is_array()) {
            throw SpaceFileError(where + ": each open set must be an array of labels");
        }
        topo::Subset s = 0;
        for (std::size_t j = 0; j < opens[i].size(); ++j) {
            const auto& l = opens[i][j];
            const auto it = l.is_string() ? index.find(l.get<std::string>()) : index.end();
            if (it == index.end()) {
                throw SpaceFileError(where + "[" + std::to_string(j) + "]: " + l.dump() + " is not a point label");
            }
            s |= topo::singleton(it->second);
        }
        family.insert(s);
    }
    return {labels, std::vector<topo::Subset>(family.begin(), family.end())};
}

topo::FiniteSpace load_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SpaceFileError(path + ": cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_space(buf.str(), path);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite topologies, coordinate maps, atlases and tangent vectors", "chartwork"};
    app.fallthrough();
    app.require_subcommand(1);

    RunConfig cfg;
    double tol = 0;
    app.add_option("--seed", cfg.seed, "PRNG seed")->capture_default_str();
    app.add_option("--samples", cfg.samples, "number of samples")->capture_default_str()->check(CLI::PositiveNumber);
    auto* tol_opt = app.add_option("--tol", tol, "override the main tolerance of the command");
    app.add_flag("--json", cfg.json, "emit one machine-readable JSON document");

    std::string file1;
    std::string file2;
    std::string name1;
    std::string name2;
    std::string from;
    std::string to;
    std::string point;
    std::string components;
    std::string set_text;
    std::string assign_text;
    int n = 0;
    bool count_only = false;
    bool ambient = false;
    double eps = 1e-3;
    double threshold = 1e-2;
    double map_margin = euclid::kDefaultMargin;
    AtlasFlags aflags;
    double fd_tol = 0;
    double det_floor = 0;
    double margin = 0;

    auto* topo_cmd = app.add_subcommand("topo", "finite topological spaces")->require_subcommand(1);
    auto* topo_check = topo_cmd->add_subcommand("check", "verify the topology axioms of a space file");
    topo_check->add_option("file", file1, "space file")->required();
    auto* topo_props = topo_cmd->add_subcommand("props", "Hausdorff, connectedness and subset operators");
    topo_props->add_option("file", file1, "space file")->required();
    auto* set_opt = topo_props->add_option("--set", set_text, "comma-separated labels of a subset");
    auto* topo_enum = topo_cmd->add_subcommand("enumerate", "all topologies on n points");
    topo_enum->add_option("--n", n, "number of points (0..4)")->required();
    topo_enum->add_flag("--count-only", count_only, "print only the count");
    auto* topo_map = topo_cmd->add_subcommand("map", "check a map between spaces, or search for a homeomorphism");
    topo_map->add_option("source", file1, "source space file")->required();
    topo_map->add_option("target", file2, "target space file")->required();
    auto* assign_opt = topo_map->add_option("--assign", assign_text, "point images, e.g. 1:a,2:b");

    auto* atlas_cmd = app.add_subcommand("atlas", "charts and atlases of builtin manifolds")->require_subcommand(1);
    const auto add_atlas_flags = [&](CLI::App* c) {
        c->add_option("--fd-tol", fd_tol, "Richardson agreement tolerance (default 1e-4)");
        c->add_option("--det-floor", det_floor, "minimum |det J| (default 1e-8)");
        c->add_option("--margin", margin, "boundary margin for sampling (default 1e-3)");
        c->add_option("--min-abs-coord", aflags.min_abs_coord, "only sample overlap coordinates with |x_k| >= value");
    };
    auto* atlas_verify = atlas_cmd->add_subcommand("verify", "covering, chart round trips and pairwise compatibility");
    atlas_verify->add_option("name", name1, "builtin manifold")->required();
    atlas_verify->add_flag("--bundle", aflags.bundle, "verify the induced atlas of the tangent bundle");
    add_atlas_flags(atlas_verify);
    auto* atlas_trans = atlas_cmd->add_subcommand("transition", "evaluate a transition function and its Jacobian");
    atlas_trans->add_option("name", name1, "builtin manifold")->required();
    atlas_trans->add_option("--from", from, "source chart id")->required();
    atlas_trans->add_option("--to", to, "target chart id")->required();
    atlas_trans->add_option("--point", point, "source coordinates, comma-separated")->required();
    auto* atlas_equiv = atlas_cmd->add_subcommand("equivalent", "check that the union of two atlases is an atlas");
    atlas_equiv->add_option("a", name1, "builtin manifold")->required();
    atlas_equiv->add_option("b", name2, "builtin manifold")->required();
    add_atlas_flags(atlas_equiv);

    auto* tangent_cmd = app.add_subcommand("tangent", "tangent vectors")->require_subcommand(1);
    auto* tangent_tr = tangent_cmd->add_subcommand("transform", "change the chart of a tangent vector");
    tangent_tr->add_option("name", name1, "builtin manifold")->required();
    tangent_tr->add_option("--point", point, "point in --from coordinates (ambient with --ambient)")->required();
    tangent_tr->add_option("--components", components, "components in the --from basis")->required();
    tangent_tr->add_option("--from", from, "source chart id")->required();
    tangent_tr->add_option("--to", to, "target chart id")->required();
    tangent_tr->add_flag("--ambient", ambient, "read --point as ambient coordinates");

    auto* homeo_cmd = app.add_subcommand("homeo", "explicit homeomorphisms between Euclidean subsets")->require_subcommand(1);
    auto* homeo_check = homeo_cmd->add_subcommand("check", "round trip f^-1(f(x)) = x on samples");
    homeo_check->add_option("map", name1, "catalog map")->required();
    homeo_check->add_option("--margin", map_margin, "boundary margin")->capture_default_str();
    auto* homeo_jump = homeo_cmd->add_subcommand("jump", "probe the inverse for a discontinuity");
    homeo_jump->add_option("map", name1, "catalog map")->required();
    homeo_jump->add_option("--eps", eps, "probe scale in (0, 0.1)")->capture_default_str();
    homeo_jump->add_option("--threshold", threshold, "jumps below this count as continuous")->capture_default_str();
    auto* homeo_list = homeo_cmd->add_subcommand("list", "list catalog maps");

    auto* zoo_cmd = app.add_subcommand("zoo", "builtin manifolds")->require_subcommand(1);
    auto* zoo_list = zoo_cmd->add_subcommand("list", "list builtin manifolds");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e, out, err);
        return kExitUsage;
    }
    if (tol_opt->count() > 0) {
        cfg.tol = tol;
    }
    const auto flag = [](CLI::App* c, const char* name, double value) -> std::optional<double> {
        return c->count(name) > 0 ? std::optional<double>(value) : std::nullopt;
    };

    try {
        if (*topo_check) {
            return cmd_topo_check(cfg, file1, out);
        }
        if (*topo_props) {
            return cmd_topo_props(cfg, file1, set_opt->count() ? std::optional(set_text) : std::nullopt, out);
        }
        if (*topo_enum) {
            return cmd_topo_enumerate(cfg, n, count_only, out);
        }
        if (*topo_map) {
            return cmd_topo_map(cfg, file1, file2, assign_opt->count() ? std::optional(assign_text) : std::nullopt,
                                out);
        }
        for (CLI::App* c : {atlas_verify, atlas_equiv}) {
            if (*c) {
                aflags.fd_tol = flag(c, "--fd-tol", fd_tol);
                aflags.det_floor = flag(c, "--det-floor", det_floor);
                aflags.margin = flag(c, "--margin", margin);
            }
        }
        if (*atlas_verify) {
            return cmd_atlas_verify(cfg, aflags, name1, out);
        }
        if (*atlas_trans) {
            return cmd_atlas_transition(cfg, name1, from, to, point, out);
        }
        if (*atlas_equiv) {
            return cmd_atlas_equivalent(cfg, aflags, name1, name2, out);
        }
        if (*tangent_tr) {
            return cmd_tangent_transform(cfg, name1, point, components, from, to, ambient, out);
        }
        if (*homeo_check) {
            return cmd_homeo_check(cfg, name1, map_margin, out);
        }
        if (*homeo_jump) {
            return cmd_homeo_jump(cfg, name1, eps, threshold, out);
        }
        if (*homeo_list) {
            return cmd_homeo_list(cfg, out);
        }
        if (*zoo_list) {
            return cmd_zoo_list(cfg, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SpaceFileError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const topo::CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace chartwork::cli

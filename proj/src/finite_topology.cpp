#include "chartwork/finite_topology.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>
#include <set>
#include <thread>

namespace chartwork::topo {

namespace {

// Upper bound on the size of any generated open family.
constexpr std::size_t kMaxOpens = std::size_t{1} << 16;

void check_capacity(std::size_t n) {
    if (n > kMaxPoints) {
        throw CapacityError("point sets are limited to 64 points, got " + std::to_string(n));
    }
}

void check_within(std::size_t n, Subset a, const char* what) {
    if (!is_subset(a, full_set(n))) {
        throw DomainError(std::string(what) + " uses points outside the point set");
    }
}

void check_open_count(std::size_t count) {
    if (count > kMaxOpens) {
        throw CapacityError("generated family exceeds " + std::to_string(kMaxOpens) + " open sets");
    }
}

std::vector<Subset> normalized(std::vector<Subset> family) {
    std::sort(family.begin(), family.end());
    family.erase(std::unique(family.begin(), family.end()), family.end());
    return family;
}

bool sorted_contains(const std::vector<Subset>& sorted, Subset a) {
    return std::binary_search(sorted.begin(), sorted.end(), a);
}

// All unions of subfamilies of `family`, including the empty union.
std::vector<Subset> all_unions(const std::vector<Subset>& family) {
    std::set<Subset> unions{Subset{0}};
    for (Subset b : family) {
        std::vector<Subset> snapshot(unions.begin(), unions.end());
        for (Subset u : snapshot) {
            unions.insert(u | b);
        }
        check_open_count(unions.size());
    }
    return {unions.begin(), unions.end()};
}

// All finite intersections of members of `family`; the empty one is `whole`.
std::vector<Subset> all_intersections(Subset whole, const std::vector<Subset>& family) {
    std::set<Subset> meets{whole};
    for (Subset s : family) {
        std::vector<Subset> snapshot(meets.begin(), meets.end());
        for (Subset m : snapshot) {
            meets.insert(m & s);
        }
        check_open_count(meets.size());
    }
    return {meets.begin(), meets.end()};
}

// Smallest open set containing point x (the intersection of all opens
// containing it; open because the family is finite).
Subset minimal_neighborhood(const FiniteSpace& space, std::size_t x) {
    Subset n = space.all();
    for (Subset u : space.opens()) {
        if (contains(u, x)) {
            n &= u;
        }
    }
    return n;
}

}  // namespace

FiniteSpace::FiniteSpace(std::vector<std::string> points, std::vector<Subset> opens)
    : points_(std::move(points)) {
    check_capacity(points_.size());
    {
        std::set<std::string> seen;
        for (const auto& p : points_) {
            if (!seen.insert(p).second) {
                throw DomainError("duplicate point label '" + p + "'");
            }
        }
    }
    for (Subset u : opens) {
        check_within(points_.size(), u, "open set");
    }
    std::sort(opens.begin(), opens.end());
    if (std::adjacent_find(opens.begin(), opens.end()) != opens.end()) {
        throw DomainError("open family contains a duplicate subset");
    }
    opens_ = std::move(opens);
}

FiniteSpace FiniteSpace::discrete(std::vector<std::string> points) {
    check_capacity(points.size());
    if (points.size() > 16) {
        throw CapacityError("discrete topology on more than 16 points is too large to list");
    }
    std::vector<Subset> opens(std::size_t{1} << points.size());
    std::iota(opens.begin(), opens.end(), Subset{0});
    return {std::move(points), std::move(opens)};
}

FiniteSpace FiniteSpace::trivial(std::vector<std::string> points) {
    check_capacity(points.size());
    const Subset x = full_set(points.size());
    std::vector<Subset> opens{Subset{0}};
    if (x != 0) {
        opens.push_back(x);
    }
    return {std::move(points), std::move(opens)};
}

bool FiniteSpace::is_open(Subset a) const noexcept { return sorted_contains(opens_, a); }

std::size_t FiniteSpace::index_of(const std::string& label) const {
    auto it = std::find(points_.begin(), points_.end(), label);
    if (it == points_.end()) {
        throw DomainError("unknown point label '" + label + "'");
    }
    return static_cast<std::size_t>(it - points_.begin());
}

Subset FiniteSpace::subset_of(const std::vector<std::string>& labels) const {
    Subset s = 0;
    for (const auto& l : labels) {
        s |= singleton(index_of(l));
    }
    return s;
}

std::vector<std::string> FiniteSpace::labels_of(Subset a) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (contains(a, i)) {
            out.push_back(points_[i]);
        }
    }
    return out;
}

const char* axiom_name(Axiom a) noexcept {
    switch (a) {
        case Axiom::ContainsEmptyAndFull: return "contains-empty-and-full";
        case Axiom::UnionClosed: return "closed-under-union";
        case Axiom::IntersectionClosed: return "closed-under-intersection";
    }
    return "unknown";
}

TopologyReport verify_topology(std::size_t n_points, const std::vector<Subset>& family) {
    check_capacity(n_points);
    for (Subset u : family) {
        check_within(n_points, u, "family member");
    }
    const std::vector<Subset> members = normalized(family);
    const Subset whole = full_set(n_points);

    TopologyReport report;
    std::vector<Subset> missing;
    if (!sorted_contains(members, 0)) {
        missing.push_back(0);
    }
    if (!sorted_contains(members, whole) && whole != 0) {
        missing.push_back(whole);
    }
    if (!missing.empty()) {
        report.violations.push_back({Axiom::ContainsEmptyAndFull, missing});
    }

    auto find_pair = [&](auto op) -> std::optional<std::vector<Subset>> {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const Subset r = op(members[i], members[j]);
                if (!sorted_contains(members, r)) {
                    return std::vector<Subset>{members[i], members[j], r};
                }
            }
        }
        return std::nullopt;
    };
    if (auto w = find_pair([](Subset a, Subset b) { return a | b; })) {
        report.violations.push_back({Axiom::UnionClosed, *w});
    }
    if (auto w = find_pair([](Subset a, Subset b) { return a & b; })) {
        report.violations.push_back({Axiom::IntersectionClosed, *w});
    }
    report.is_topology = report.violations.empty();
    return report;
}

TopologyReport verify_topology(const FiniteSpace& space) {
    return verify_topology(space.size(), space.opens());
}

FiniteSpace generate_from_subbase(std::vector<std::string> points, const std::vector<Subset>& family) {
    check_capacity(points.size());
    for (Subset s : family) {
        check_within(points.size(), s, "subbase member");
    }
    const auto meets = all_intersections(full_set(points.size()), normalized(family));
    auto opens = all_unions(meets);
    FiniteSpace space(std::move(points), std::move(opens));
    assert(verify_topology(space).is_topology);
    return space;
}

FiniteSpace generate_from_base(std::vector<std::string> points, const std::vector<Subset>& family) {
    check_capacity(points.size());
    for (Subset s : family) {
        check_within(points.size(), s, "base member");
    }
    const auto members = normalized(family);
    auto unions = all_unions(members);
    const Subset whole = full_set(points.size());
    if (!sorted_contains(unions, whole)) {
        throw NotABaseError(whole, "family does not cover the point set");
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const Subset meet = members[i] & members[j];
            if (!sorted_contains(unions, meet)) {
                throw NotABaseError(meet, "intersection of two members is not a union of members");
            }
        }
    }
    return {std::move(points), std::move(unions)};
}

bool is_base_of(const FiniteSpace& space, const std::vector<Subset>& family) {
    for (Subset b : family) {
        if (!space.is_open(b)) {
            throw DomainError("base candidate member is not open");
        }
    }
    for (Subset u : space.opens()) {
        Subset covered = 0;
        for (Subset b : family) {
            if (is_subset(b, u)) {
                covered |= b;
            }
        }
        if (covered != u) {
            return false;
        }
    }
    return true;
}

Subset interior(const FiniteSpace& space, Subset a) {
    check_within(space.size(), a, "subset");
    Subset in = 0;
    for (Subset u : space.opens()) {
        if (is_subset(u, a)) {
            in |= u;
        }
    }
    return in;
}

Subset closure(const FiniteSpace& space, Subset a) {
    check_within(space.size(), a, "subset");
    Subset cl = space.all();
    for (Subset u : space.opens()) {
        const Subset closed = space.complement(u);
        if (is_subset(a, closed)) {
            cl &= closed;
        }
    }
    return cl;
}

Subset boundary(const FiniteSpace& space, Subset a) {
    return closure(space, a) & ~interior(space, a);
}

bool is_dense(const FiniteSpace& space, Subset a, Subset b) {
    check_within(space.size(), b, "subset");
    if (!is_subset(a, b)) {
        throw DomainError("is_dense requires A to be a subset of B");
    }
    return closure(space, a) == b;
}

bool is_neighborhood(const FiniteSpace& space, Subset v, std::size_t x) {
    check_within(space.size(), v, "subset");
    if (x >= space.size()) {
        throw DomainError("point index out of range");
    }
    return std::any_of(space.opens().begin(), space.opens().end(),
                       [&](Subset u) { return contains(u, x) && is_subset(u, v); });
}

bool are_separated(const FiniteSpace& space, Subset a, Subset b) {
    return (closure(space, a) & b) == 0 && (a & closure(space, b)) == 0;
}

bool is_connected(const FiniteSpace& space, std::optional<Subset> a) {
    if (a) {
        return is_connected(relative_topology(space, *a));
    }
    const Subset whole = space.all();
    return std::none_of(space.opens().begin(), space.opens().end(), [&](Subset u) {
        return u != 0 && u != whole && space.is_open(space.complement(u));
    });
}

bool refines(const std::vector<Subset>& finer, const std::vector<Subset>& coarser) {
    return std::all_of(finer.begin(), finer.end(), [&](Subset v) {
        return std::any_of(coarser.begin(), coarser.end(), [&](Subset u) { return is_subset(v, u); });
    });
}

std::vector<Subset> minimal_subcover(const FiniteSpace& space, const std::vector<Subset>& cover, Subset a) {
    check_within(space.size(), a, "subset");
    Subset reach = 0;
    for (Subset u : cover) {
        if (!space.is_open(u)) {
            throw DomainError("cover member is not open");
        }
        reach |= u;
    }
    if (!is_subset(a, reach)) {
        throw DomainError("family does not cover the subset");
    }
    if (a == 0) {
        return {};
    }
    const std::size_t m = cover.size();
    std::vector<std::size_t> pick;
    for (std::size_t k = 1; k <= m; ++k) {
        pick.resize(k);
        std::iota(pick.begin(), pick.end(), std::size_t{0});
        while (true) {
            Subset u = 0;
            for (std::size_t i : pick) {
                u |= cover[i];
            }
            if (is_subset(a, u)) {
                std::vector<Subset> out;
                for (std::size_t i : pick) {
                    out.push_back(cover[i]);
                }
                return out;
            }
            // next combination in lexicographic order
            std::size_t i = k;
            while (i > 0 && pick[i - 1] == m - k + (i - 1)) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++pick[i - 1];
            for (std::size_t j = i; j < k; ++j) {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    throw DomainError("family does not cover the subset");  // unreachable: full cover works
}

HausdorffResult is_hausdorff(const FiniteSpace& space) {
    const std::size_t n = space.size();
    std::vector<Subset> nbhd(n);
    for (std::size_t i = 0; i < n; ++i) {
        nbhd[i] = minimal_neighborhood(space, i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if ((nbhd[i] & nbhd[j]) != 0) {
                return {false, std::pair{i, j}};
            }
        }
    }
    return {};
}

FiniteSpace relative_topology(const FiniteSpace& space, Subset a) {
    check_within(space.size(), a, "subset");
    std::vector<std::size_t> kept;
    std::vector<std::string> points;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (contains(a, i)) {
            kept.push_back(i);
            points.push_back(space.points()[i]);
        }
    }
    std::vector<Subset> opens;
    for (Subset v : space.opens()) {
        const Subset trace = v & a;
        Subset packed = 0;
        for (std::size_t k = 0; k < kept.size(); ++k) {
            if (contains(trace, kept[k])) {
                packed |= singleton(k);
            }
        }
        opens.push_back(packed);
    }
    return {std::move(points), normalized(std::move(opens))};
}

FiniteSpace product_topology(const FiniteSpace& s1, const FiniteSpace& s2) {
    const std::size_t n1 = s1.size();
    const std::size_t n2 = s2.size();
    if (n1 * n2 > kMaxPoints) {
        throw CapacityError("product has " + std::to_string(n1 * n2) + " points, limit is 64");
    }
    std::vector<std::string> points;
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            points.push_back("(" + s1.points()[i] + "," + s2.points()[j] + ")");
        }
    }
    std::vector<Subset> boxes;
    for (Subset u : s1.opens()) {
        for (Subset v : s2.opens()) {
            Subset box = 0;
            for (std::size_t i = 0; i < n1; ++i) {
                if (!contains(u, i)) {
                    continue;
                }
                for (std::size_t j = 0; j < n2; ++j) {
                    if (contains(v, j)) {
                        box |= singleton(i * n2 + j);
                    }
                }
            }
            boxes.push_back(box);
        }
    }
    return generate_from_base(std::move(points), boxes);
}

FiniteMap::FiniteMap(FiniteSpace source, FiniteSpace target, std::vector<std::size_t> image)
    : source_(std::move(source)), target_(std::move(target)), image_(std::move(image)) {
    if (image_.size() != source_.size()) {
        throw DomainError("map must assign an image to every source point");
    }
    for (std::size_t t : image_) {
        if (t >= target_.size()) {
            throw DomainError("map image index out of range");
        }
    }
}

Subset FiniteMap::preimage(Subset w) const noexcept {
    Subset pre = 0;
    for (std::size_t i = 0; i < image_.size(); ++i) {
        if (contains(w, image_[i])) {
            pre |= singleton(i);
        }
    }
    return pre;
}

Subset FiniteMap::image_of(Subset a) const noexcept {
    Subset img = 0;
    for (std::size_t i = 0; i < image_.size(); ++i) {
        if (contains(a, i)) {
            img |= singleton(image_[i]);
        }
    }
    return img;
}

bool FiniteMap::is_bijective() const noexcept {
    return source_.size() == target_.size() && image_of(source_.all()) == target_.all();
}

bool is_continuous(const FiniteMap& f) {
    return std::all_of(f.target().opens().begin(), f.target().opens().end(),
                       [&](Subset v) { return f.source().is_open(f.preimage(v)); });
}

bool is_open_map(const FiniteMap& f) {
    return std::all_of(f.source().opens().begin(), f.source().opens().end(),
                       [&](Subset u) { return f.target().is_open(f.image_of(u)); });
}

bool is_closed_map(const FiniteMap& f) {
    return std::all_of(f.source().opens().begin(), f.source().opens().end(), [&](Subset u) {
        return f.target().is_closed(f.image_of(f.source().complement(u)));
    });
}

bool is_homeomorphism(const FiniteMap& f) {
    return f.is_bijective() && is_continuous(f) && is_open_map(f);
}

FiniteMap compose(const FiniteMap& f, const FiniteMap& g) {
    if (!(f.target() == g.source())) {
        throw DomainError("cannot compose: target of f differs from source of g");
    }
    std::vector<std::size_t> image(f.image().size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        image[i] = g.image()[f.image()[i]];
    }
    return {f.source(), g.target(), std::move(image)};
}

FiniteMap inverse(const FiniteMap& f) {
    if (!f.is_bijective()) {
        throw DomainError("only bijective maps have an inverse");
    }
    std::vector<std::size_t> image(f.image().size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        image[f.image()[i]] = i;
    }
    return {f.target(), f.source(), std::move(image)};
}

std::optional<FiniteMap> find_homeomorphism(const FiniteSpace& s1, const FiniteSpace& s2) {
    if (s1.size() > kMaxHomeomorphismSearch || s2.size() > kMaxHomeomorphismSearch) {
        throw CapacityError("homeomorphism search is limited to 8 points");
    }
    if (s1.size() != s2.size() || s1.opens().size() != s2.opens().size()) {
        return std::nullopt;
    }
    std::vector<std::size_t> perm(s1.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
        FiniteMap candidate(s1, s2, perm);
        if (is_continuous(candidate) && is_open_map(candidate)) {
            return candidate;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
}

FiniteSpace induced_pushforward(const std::vector<std::size_t>& f, const FiniteSpace& source,
                                std::vector<std::string> target_points) {
    check_capacity(target_points.size());
    FiniteMap map(source, FiniteSpace(target_points, {}), f);
    const Subset hit = map.image_of(source.all());
    const Subset free_points = full_set(target_points.size()) & ~hit;

    // w is open iff f⁻¹(w) is open. Such w split into f(U) for a saturated
    // open U plus an arbitrary set of points outside the image.
    std::vector<Subset> saturated_images;
    for (Subset u : source.opens()) {
        if (map.preimage(map.image_of(u)) == u) {
            saturated_images.push_back(map.image_of(u));
        }
    }
    const auto n_free = static_cast<std::size_t>(std::popcount(free_points));
    if (n_free >= 20 || (saturated_images.size() << n_free) > kMaxOpens) {
        throw CapacityError("pushforward topology has too many open sets to list");
    }
    std::vector<Subset> opens;
    for (Subset w : saturated_images) {
        // enumerate subsets of free_points
        Subset extra = 0;
        do {
            opens.push_back(w | extra);
            extra = (extra - free_points) & free_points;
        } while (extra != 0);
    }
    FiniteSpace out(std::move(target_points), normalized(std::move(opens)));
    assert(verify_topology(out).is_topology);
    assert(is_continuous(FiniteMap(source, out, f)));
    return out;
}

FiniteSpace induced_pullback(const std::vector<std::size_t>& f, std::vector<std::string> source_points,
                             const FiniteSpace& target) {
    FiniteMap map(FiniteSpace(source_points, {}), target, f);
    std::vector<Subset> opens;
    for (Subset v : target.opens()) {
        opens.push_back(map.preimage(v));
    }
    FiniteSpace out(std::move(source_points), normalized(std::move(opens)));
    assert(verify_topology(out).is_topology);
    return out;
}

std::vector<std::string> numbered_points(std::size_t n) {
    std::vector<std::string> points;
    for (std::size_t i = 1; i <= n; ++i) {
        points.push_back(std::to_string(i));
    }
    return points;
}

Enumeration enumerate_topologies(std::size_t n, bool count_only, unsigned workers) {
    if (n > kMaxEnumerationPoints) {
        throw CapacityError("exhaustive enumeration is limited to n <= 4");
    }
    const Subset whole = full_set(n);
    std::vector<Subset> middle;
    for (Subset s = 1; s < whole; ++s) {
        middle.push_back(s);
    }
    const std::uint64_t candidates = std::uint64_t{1} << middle.size();
    const auto points = numbered_points(n);

    auto family_of = [&](std::uint64_t code) {
        std::vector<Subset> family{0};
        for (std::size_t k = 0; k < middle.size(); ++k) {
            if ((code >> k) & 1U) {
                family.push_back(middle[k]);
            }
        }
        if (whole != 0) {
            family.push_back(whole);
        }
        return family;
    };

    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(candidates)));
    std::vector<Enumeration> parts(workers);
    auto run = [&](unsigned w) {
        const std::uint64_t lo = candidates * w / workers;
        const std::uint64_t hi = candidates * (w + 1) / workers;
        for (std::uint64_t code = lo; code < hi; ++code) {
            auto family = family_of(code);
            if (verify_topology(n, family).is_topology) {
                ++parts[w].count;
                if (!count_only) {
                    parts[w].spaces.emplace_back(points, std::move(family));
                }
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back(run, w);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    Enumeration out;
    for (auto& p : parts) {
        out.count += p.count;
        std::move(p.spaces.begin(), p.spaces.end(), std::back_inserter(out.spaces));
    }
    return out;
}

}  // namespace chartwork::topo

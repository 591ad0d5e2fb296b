#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chartwork::topo {

/// A subset of a finite point set, one bit per point in point order.
using Subset = std::uint64_t;

inline constexpr std::size_t kMaxPoints = 64;

/// Thrown when a point set exceeds what a single machine word can index,
/// or an exhaustive search is asked to go past its size limit.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Thrown when an argument violates an operation's precondition
/// (a subset outside the point set, a cover that does not cover, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown by generate_from_base when the family is not a base. The witness
/// is an intersection of two members that is not a union of members.
class NotABaseError : public std::invalid_argument {
public:
    NotABaseError(Subset witness, const std::string& what)
        : std::invalid_argument(what), witness_(witness) {}
    [[nodiscard]] Subset witness() const noexcept { return witness_; }

private:
    Subset witness_;
};

[[nodiscard]] constexpr Subset full_set(std::size_t n) noexcept {
    return n >= 64 ? ~Subset{0} : ((Subset{1} << n) - 1);
}
[[nodiscard]] constexpr Subset singleton(std::size_t i) noexcept { return Subset{1} << i; }
[[nodiscard]] constexpr bool contains(Subset s, std::size_t i) noexcept { return (s >> i) & 1U; }
[[nodiscard]] constexpr bool is_subset(Subset a, Subset b) noexcept { return (a & ~b) == 0; }

/**
 * A finite point set together with a family of subsets called "opens".
 *
 * Construction checks only the representation (capacity, bit range,
 * duplicates). Whether the family is actually a topology is reported by
 * verify_topology(); the decision procedures below assume it is.
 * The open family is kept sorted by bitmask value.
 */
class FiniteSpace {
public:
    FiniteSpace() = default;
    FiniteSpace(std::vector<std::string> points, std::vector<Subset> opens);

    /// All subsets are open.
    static FiniteSpace discrete(std::vector<std::string> points);
    /// Only the empty set and the whole set are open.
    static FiniteSpace trivial(std::vector<std::string> points);

    [[nodiscard]] const std::vector<std::string>& points() const noexcept { return points_; }
    [[nodiscard]] const std::vector<Subset>& opens() const noexcept { return opens_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] Subset all() const noexcept { return full_set(points_.size()); }
    [[nodiscard]] Subset complement(Subset a) const noexcept { return all() & ~a; }

    [[nodiscard]] bool is_open(Subset a) const noexcept;
    [[nodiscard]] bool is_closed(Subset a) const noexcept { return is_open(complement(a)); }

    /// Index of a point label; throws DomainError when absent.
    [[nodiscard]] std::size_t index_of(const std::string& label) const;
    /// Bitmask of a list of labels; throws DomainError on unknown labels.
    [[nodiscard]] Subset subset_of(const std::vector<std::string>& labels) const;
    [[nodiscard]] std::vector<std::string> labels_of(Subset a) const;

    friend bool operator==(const FiniteSpace&, const FiniteSpace&) = default;

private:
    std::vector<std::string> points_;
    std::vector<Subset> opens_;
};

enum class Axiom { ContainsEmptyAndFull = 1, UnionClosed = 2, IntersectionClosed = 3 };

[[nodiscard]] const char* axiom_name(Axiom a) noexcept;

struct AxiomViolation {
    Axiom axiom;
    /// Axiom 1: the missing sets. Axioms 2/3: the two members and the
    /// offending union/intersection.
    std::vector<Subset> witness;
};

struct TopologyReport {
    bool is_topology = false;
    std::vector<AxiomViolation> violations;
};

/// Checks the three topology axioms. Union closure is checked pairwise,
/// which is equivalent for finite families.
[[nodiscard]] TopologyReport verify_topology(std::size_t n_points, const std::vector<Subset>& family);
[[nodiscard]] TopologyReport verify_topology(const FiniteSpace& space);

/// Topology generated by a subbase: all unions of finite intersections.
/// The empty intersection is the whole set.
[[nodiscard]] FiniteSpace generate_from_subbase(std::vector<std::string> points,
                                                const std::vector<Subset>& family);

/// Unions of members of `family` (plus the empty set). Throws NotABaseError
/// when the result is not a topology.
[[nodiscard]] FiniteSpace generate_from_base(std::vector<std::string> points,
                                             const std::vector<Subset>& family);

/// True iff every nonempty open set is a union of members of `family`.
/// Members must themselves be open (DomainError otherwise).
[[nodiscard]] bool is_base_of(const FiniteSpace& space, const std::vector<Subset>& family);

[[nodiscard]] Subset interior(const FiniteSpace& space, Subset a);
[[nodiscard]] Subset closure(const FiniteSpace& space, Subset a);
[[nodiscard]] Subset boundary(const FiniteSpace& space, Subset a);

/// closure(A) == B. Requires A ⊆ B.
[[nodiscard]] bool is_dense(const FiniteSpace& space, Subset a, Subset b);
[[nodiscard]] bool is_neighborhood(const FiniteSpace& space, Subset v, std::size_t x);
[[nodiscard]] bool are_separated(const FiniteSpace& space, Subset a, Subset b);

/// No proper nonempty clopen subset. With `a`, decides the relative
/// topology on `a`.
[[nodiscard]] bool is_connected(const FiniteSpace& space, std::optional<Subset> a = std::nullopt);

/// Every finite space is compact; the open-cover machinery is
/// minimal_subcover().
[[nodiscard]] constexpr bool is_compact(const FiniteSpace&) noexcept { return true; }

/// Every member of `finer` lies inside some member of `coarser`.
[[nodiscard]] bool refines(const std::vector<Subset>& finer, const std::vector<Subset>& coarser);

/// Smallest subfamily of `cover` whose union contains `a`. Subfamilies are
/// tried by increasing size, and within one size in lexicographic index order.
[[nodiscard]] std::vector<Subset> minimal_subcover(const FiniteSpace& space,
                                                   const std::vector<Subset>& cover, Subset a);

struct HausdorffResult {
    bool hausdorff = true;
    /// First pair of point indices (i < j) without disjoint neighborhoods.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

[[nodiscard]] HausdorffResult is_hausdorff(const FiniteSpace& space);

/// (A, {A ∩ V}) with A's points re-indexed in their original order.
[[nodiscard]] FiniteSpace relative_topology(const FiniteSpace& space, Subset a);

/// Points are ordered pairs "(p,q)" in row-major order.
[[nodiscard]] FiniteSpace product_topology(const FiniteSpace& s1, const FiniteSpace& s2);

/// A total function between the point sets of two spaces.
class FiniteMap {
public:
    FiniteMap(FiniteSpace source, FiniteSpace target, std::vector<std::size_t> image);

    [[nodiscard]] const FiniteSpace& source() const noexcept { return source_; }
    [[nodiscard]] const FiniteSpace& target() const noexcept { return target_; }
    [[nodiscard]] const std::vector<std::size_t>& image() const noexcept { return image_; }

    [[nodiscard]] Subset preimage(Subset w) const noexcept;
    [[nodiscard]] Subset image_of(Subset a) const noexcept;
    [[nodiscard]] bool is_bijective() const noexcept;

private:
    FiniteSpace source_;
    FiniteSpace target_;
    std::vector<std::size_t> image_;
};

[[nodiscard]] bool is_continuous(const FiniteMap& f);
[[nodiscard]] bool is_open_map(const FiniteMap& f);
[[nodiscard]] bool is_closed_map(const FiniteMap& f);
[[nodiscard]] bool is_homeomorphism(const FiniteMap& f);

/// g ∘ f. Requires f.target() == g.source().
[[nodiscard]] FiniteMap compose(const FiniteMap& f, const FiniteMap& g);

/// Inverse of a bijective map (DomainError otherwise).
[[nodiscard]] FiniteMap inverse(const FiniteMap& f);

inline constexpr std::size_t kMaxHomeomorphismSearch = 8;

/// First homeomorphism s1 → s2 in lexicographic order of the image
/// permutation, or nullopt. Both spaces must have at most 8 points.
[[nodiscard]] std::optional<FiniteMap> find_homeomorphism(const FiniteSpace& s1, const FiniteSpace& s2);

/// Finest topology on `target_points` making f continuous.
[[nodiscard]] FiniteSpace induced_pushforward(const std::vector<std::size_t>& f,
                                              const FiniteSpace& source,
                                              std::vector<std::string> target_points);

/// Coarsest topology on `source_points` making f continuous.
[[nodiscard]] FiniteSpace induced_pullback(const std::vector<std::size_t>& f,
                                           std::vector<std::string> source_points,
                                           const FiniteSpace& target);

inline constexpr std::size_t kMaxEnumerationPoints = 4;

struct Enumeration {
    std::uint64_t count = 0;
    /// Empty when count_only was requested. Points are labelled "1".."n".
    std::vector<FiniteSpace> spaces;
};

/// Exhaustive enumeration of all topologies on n ≤ 4 points, in increasing
/// order of the candidate family's encoding. `workers` splits the candidate
/// range; the result does not depend on it.
[[nodiscard]] Enumeration enumerate_topologies(std::size_t n, bool count_only, unsigned workers = 1);

/// Point labels "1".."n".
[[nodiscard]] std::vector<std::string> numbered_points(std::size_t n);

}  // namespace chartwork::topo

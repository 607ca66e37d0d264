#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace frogsim {

class GraphTopology;

/// A vertex of one of the supported graphs.
///
/// Lattice sites are coordinate vectors of length d. Tree sites are root-based
/// addresses: the first entry picks one of the d root edges (0..d-1), every
/// later entry one of the d-1 child edges (0..d-2). The root is the all-zeros
/// vector or the empty address.
///
/// Besides the encoding a Site caches a 64-bit structural key that GraphTopology
/// updates in O(1) per move; the key feeds hashing and keyed randomness.
class Site {
public:
    Site() = default;

    const std::vector<std::int32_t>& encoding() const noexcept { return enc_; }
    std::uint64_t key() const noexcept { return key_; }

    friend bool operator==(const Site& a, const Site& b) noexcept { return a.enc_ == b.enc_; }
    friend bool operator<(const Site& a, const Site& b) noexcept { return a.enc_ < b.enc_; }

    std::string to_string() const;

private:
    friend class GraphTopology;

    std::vector<std::int32_t> enc_;
    std::uint64_t key_ = 0;
    std::uint64_t scale_ = 1; // tree only: multiplier of the next address digit
};

struct SiteHash {
    std::size_t operator()(const Site& s) const noexcept;
};

enum class TopologyKind { Line, Lattice, Tree };

class GraphTopology {
public:
    static GraphTopology line();
    static GraphTopology lattice(int d);
    static GraphTopology tree(int d);

    /// Accepts `line`, `zd:<d>`, `tree:<d>`.
    static GraphTopology parse(std::string_view text);

    TopologyKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    bool is_tree() const noexcept { return kind_ == TopologyKind::Tree; }
    std::string to_string() const;

    Site root() const;
    /// Builds a site from its canonical encoding; throws on malformed input.
    Site make_site(std::vector<std::int32_t> encoding) const;
    void validate(const Site& x) const;

    std::uint32_t degree() const noexcept { return degree_; }
    std::uint32_t degree(const Site& x) const;

    /// Canonical order: lattice +e1,-e1,+e2,-e2,...; tree parent first, then
    /// children by index (the root has no parent entry).
    std::vector<Site> neighbors(const Site& x) const;
    Site neighbor(const Site& x, std::uint32_t index) const;
    /// In-place move to neighbors(x)[index]; the hot path of every walk.
    void step(Site& x, std::uint32_t index) const;

    std::uint64_t distance(const Site& x, const Site& y) const;
    std::uint64_t distance_from_root(const Site& x) const;

    /// Number of sites at distance k from the root. Throws ErrorKind::Overflow
    /// when the count does not fit in 64 bits.
    std::uint64_t sphere_size(std::uint64_t k) const;

    friend bool operator==(const GraphTopology& a, const GraphTopology& b) noexcept
    {
        return a.dim_ == b.dim_ && a.is_tree() == b.is_tree();
    }

private:
    GraphTopology(TopologyKind kind, int dim);

    TopologyKind kind_;
    int dim_;
    std::uint32_t degree_;
};

} // namespace frogsim

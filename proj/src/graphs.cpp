#include "frogsim/graphs.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <sstream>

#include "frogsim/errors.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

namespace {

constexpr int kMaxLatticeDim = 64;

// Odd multipliers: lattice key is sum_i coord_i * K_i (mod 2^64).
constexpr std::array<std::uint64_t, kMaxLatticeDim> make_axis_keys()
{
    std::array<std::uint64_t, kMaxLatticeDim> k{};
    for (int i = 0; i < kMaxLatticeDim; ++i)
        k[i] = mix64(0x51ed270b27eb7c3dULL + static_cast<std::uint64_t>(i)) | 1ULL;
    return k;
}
constexpr auto kAxisKey = make_axis_keys();

// Tree key is sum_j (digit_j + 1) * B^j (mod 2^64); B odd, so B is invertible.
constexpr std::uint64_t kTreeBase = 0x9fb21c651e98df25ULL;

constexpr std::uint64_t inverse_mod_2_64(std::uint64_t a)
{
    std::uint64_t x = a; // Newton iteration, correct bits double each round
    for (int i = 0; i < 6; ++i)
        x *= 2 - a * x;
    return x;
}
constexpr std::uint64_t kTreeBaseInv = inverse_mod_2_64(kTreeBase);
static_assert(kTreeBase * kTreeBaseInv == 1);

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        fail(ErrorKind::Overflow, "sphere size exceeds 64-bit range");
    return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r))
        fail(ErrorKind::Overflow, "sphere size exceeds 64-bit range");
    return r;
}

// C(n, r) for small r, exact or Overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r)
{
    if (r > n)
        return 0;
    unsigned __int128 acc = 1;
    for (std::uint64_t j = 1; j <= r; ++j) {
        acc = acc * (n - r + j) / j;
        if (acc > std::numeric_limits<std::uint64_t>::max())
            fail(ErrorKind::Overflow, "sphere size exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(acc);
}

int parse_int(std::string_view s, std::string_view what)
{
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorKind::Parse, "bad integer '" + std::string(s) + "' in " + std::string(what));
    return v;
}

} // namespace

std::string Site::to_string() const
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < enc_.size(); ++i)
        os << (i ? "," : "") << enc_[i];
    os << ')';
    return os.str();
}

std::size_t SiteHash::operator()(const Site& s) const noexcept
{
    return static_cast<std::size_t>(mix64(s.key()));
}

GraphTopology::GraphTopology(TopologyKind kind, int dim) : kind_(kind), dim_(dim)
{
    degree_ = kind == TopologyKind::Tree ? static_cast<std::uint32_t>(dim)
                                         : static_cast<std::uint32_t>(2 * dim);
}

GraphTopology GraphTopology::line()
{
    return GraphTopology(TopologyKind::Line, 1);
}

GraphTopology GraphTopology::lattice(int d)
{
    require(d >= 1 && d <= kMaxLatticeDim, "lattice dimension must be in [1, 64]");
    return GraphTopology(TopologyKind::Lattice, d);
}

GraphTopology GraphTopology::tree(int d)
{
    require(d >= 3 && d <= 1 << 20, "tree degree must be >= 3");
    return GraphTopology(TopologyKind::Tree, d);
}

GraphTopology GraphTopology::parse(std::string_view text)
{
    if (text == "line")
        return line();
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        fail(ErrorKind::Parse, "unknown graph '" + std::string(text) + "' (line, zd:<d>, tree:<d>)");
    auto head = text.substr(0, colon);
    int d = parse_int(text.substr(colon + 1), "graph");
    try {
        if (head == "zd")
            return lattice(d);
        if (head == "tree")
            return tree(d);
    } catch (const Error& e) {
        fail(ErrorKind::Parse, e.what());
    }
    fail(ErrorKind::Parse, "unknown graph '" + std::string(text) + "' (line, zd:<d>, tree:<d>)");
}

std::string GraphTopology::to_string() const
{
    switch (kind_) {
    case TopologyKind::Line:
        return "line";
    case TopologyKind::Lattice:
        return "zd:" + std::to_string(dim_);
    case TopologyKind::Tree:
        return "tree:" + std::to_string(dim_);
    }
    return {};
}

Site GraphTopology::root() const
{
    Site s;
    if (!is_tree())
        s.enc_.assign(static_cast<std::size_t>(dim_), 0);
    return s;
}

Site GraphTopology::make_site(std::vector<std::int32_t> encoding) const
{
    Site s;
    s.enc_ = std::move(encoding);
    validate(s);
    if (is_tree()) {
        for (auto digit : s.enc_) {
            s.key_ += static_cast<std::uint64_t>(digit + 1) * s.scale_;
            s.scale_ *= kTreeBase;
        }
    } else {
        for (std::size_t i = 0; i < s.enc_.size(); ++i)
            s.key_ += static_cast<std::uint64_t>(static_cast<std::int64_t>(s.enc_[i])) * kAxisKey[i];
    }
    return s;
}

void GraphTopology::validate(const Site& x) const
{
    if (is_tree()) {
        for (std::size_t i = 0; i < x.enc_.size(); ++i) {
            const int limit = i == 0 ? dim_ : dim_ - 1;
            if (x.enc_[i] < 0 || x.enc_[i] >= limit)
                fail(ErrorKind::InvalidArgument,
                     "malformed tree address " + x.to_string() + " for " + to_string());
        }
    } else if (x.enc_.size() != static_cast<std::size_t>(dim_)) {
        fail(ErrorKind::InvalidArgument,
             "site " + x.to_string() + " has wrong dimension for " + to_string());
    }
}

std::uint32_t GraphTopology::degree(const Site& x) const
{
    validate(x);
    return degree_;
}

std::vector<Site> GraphTopology::neighbors(const Site& x) const
{
    validate(x);
    std::vector<Site> out;
    out.reserve(degree_);
    for (std::uint32_t j = 0; j < degree_; ++j)
        out.push_back(neighbor(x, j));
    return out;
}

Site GraphTopology::neighbor(const Site& x, std::uint32_t index) const
{
    Site y = x;
    step(y, index);
    return y;
}

void GraphTopology::step(Site& x, std::uint32_t index) const
{
    if (index >= degree_)
        fail(ErrorKind::InvalidArgument, "neighbor index out of range");
    if (!is_tree()) {
        const std::uint32_t axis = index >> 1;
        std::int32_t& c = x.enc_[axis];
        if (index & 1u) {
            if (c == std::numeric_limits<std::int32_t>::min())
                fail(ErrorKind::Overflow, "lattice coordinate underflow");
            --c;
            x.key_ -= kAxisKey[axis];
        } else {
            if (c == std::numeric_limits<std::int32_t>::max())
                fail(ErrorKind::Overflow, "lattice coordinate overflow");
            ++c;
            x.key_ += kAxisKey[axis];
        }
        return;
    }
    if (x.enc_.empty()) {
        x.enc_.push_back(static_cast<std::int32_t>(index));
        x.key_ += static_cast<std::uint64_t>(index + 1) * x.scale_;
        x.scale_ *= kTreeBase;
        return;
    }
    if (index == 0) {
        x.scale_ *= kTreeBaseInv;
        x.key_ -= static_cast<std::uint64_t>(x.enc_.back() + 1) * x.scale_;
        x.enc_.pop_back();
        return;
    }
    const std::uint32_t child = index - 1;
    x.enc_.push_back(static_cast<std::int32_t>(child));
    x.key_ += static_cast<std::uint64_t>(child + 1) * x.scale_;
    x.scale_ *= kTreeBase;
}

std::uint64_t GraphTopology::distance(const Site& x, const Site& y) const
{
    if (!is_tree()) {
        std::uint64_t d = 0;
        for (std::size_t i = 0; i < x.enc_.size(); ++i) {
            const auto diff = static_cast<std::int64_t>(x.enc_[i]) - y.enc_[i];
            d += static_cast<std::uint64_t>(diff < 0 ? -diff : diff);
        }
        return d;
    }
    const auto& a = x.enc_;
    const auto& b = y.enc_;
    const auto mism = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
    const auto common = static_cast<std::uint64_t>(mism.first - a.begin());
    return a.size() + b.size() - 2 * common;
}

std::uint64_t GraphTopology::distance_from_root(const Site& x) const
{
    if (is_tree())
        return x.enc_.size();
    std::uint64_t d = 0;
    for (auto c : x.enc_)
        d += static_cast<std::uint64_t>(c < 0 ? -static_cast<std::int64_t>(c) : c);
    return d;
}

std::uint64_t GraphTopology::sphere_size(std::uint64_t k) const
{
    if (k == 0)
        return 1;
    if (is_tree()) {
        std::uint64_t s = static_cast<std::uint64_t>(dim_);
        for (std::uint64_t j = 1; j < k; ++j)
            s = checked_mul(s, static_cast<std::uint64_t>(dim_ - 1));
        return s;
    }
    // |{x in Z^d : |x|_1 = k}| = sum_i 2^i C(d,i) C(k-1,i-1)
    std::uint64_t total = 0;
    const auto d = static_cast<std::uint64_t>(dim_);
    for (std::uint64_t i = 1; i <= std::min(d, k); ++i) {
        if (i >= 64)
            fail(ErrorKind::Overflow, "sphere size exceeds 64-bit range");
        std::uint64_t term = checked_mul(std::uint64_t{1} << i, binomial(d, i));
        term = checked_mul(term, binomial(k - 1, i - 1));
        total = checked_add(total, term);
    }
    return total;
}

} // namespace frogsim

#include <doctest.h>

#include <cmath>
#include <set>

#include "frogsim/errors.hpp"
#include "frogsim/percolation.hpp"

using namespace frogsim;

namespace {

FrogConfig geometric_config(const GraphTopology& g, double p, const char* eta = "det:1")
{
    FrogConfig c;
    c.topology = g;
    c.mode = GeometricDeath{p, ParticleCountLaw::parse(eta)};
    c.master_seed = 77;
    return c;
}

// Probability that a walker killed with probability 1-p before each jump ever
// reaches a fixed neighbor on a d-regular tree: F = (p/d)(1 + (d-1) F^2).
// Reaching distance k means passing k such edges in turn, so the answer is F^k.
double tree_neighbor_hit(double p, double d)
{
    if (p == 0.0)
        return 0.0;
    const double a = p * (d - 1) / d, b = -1.0, c = p / d;
    return (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

double hit_frequency(const FrogConfig& c, const Site& x, const Site& y, std::uint64_t trials)
{
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t)
        hits += single_particle_hits(c, t, x, y);
    return static_cast<double>(hits) / static_cast<double>(trials);
}

} // namespace

TEST_CASE("empty or immobile sites have the trivial range")
{
    const auto g = GraphTopology::lattice(2);
    const Site x = g.make_site({3, -1});
    for (std::uint64_t t = 0; t < 20; ++t) {
        auto r0 = sample_range(geometric_config(g, 0.9, "det:0"), t, x);
        CHECK(r0.eta_value == 0);
        CHECK(r0.ranges == SiteSet{x});
        auto r1 = sample_range(geometric_config(g, 0.0, "det:5"), t, x);
        CHECK(r1.eta_value == 5);
        CHECK(r1.ranges == SiteSet{x});
    }
    const auto cl = grow_cluster(geometric_config(g, 0.0), 0, 100);
    CHECK(cl.activated == SiteSet{g.root()});
    CHECK(cl.frontier_exhausted);
}

TEST_CASE("range points lie within the longest lifetime")
{
    const auto g = GraphTopology::tree(4);
    const Site x = g.make_site({1, 2});
    const auto c = geometric_config(g, 0.8, "pmf:0.2,0.3,0.5");
    for (std::uint64_t t = 0; t < 200; ++t) {
        const auto r = sample_range(c, t, x);
        CHECK(r.ranges.count(x) == 1);
        for (const auto& y : r.ranges)
            CHECK(g.distance(x, y) + 1 <= std::max<std::uint64_t>(r.max_lifetime, 1));
    }
}

TEST_CASE("neighbor hitting oracle")
{
    CHECK(tree_neighbor_hit(0.5, 3) == doctest::Approx((3 - std::sqrt(7.0)) / 2));
    // without death a tree walk hits a given neighbor with probability 1/(d-1)
    CHECK(tree_neighbor_hit(1.0, 3) == doctest::Approx(0.5));
    CHECK(tree_neighbor_hit(1.0, 5) == doctest::Approx(0.25));
    // the line is the 2-regular tree
    CHECK(tree_neighbor_hit(0.8, 2) == doctest::Approx(0.5));
}

TEST_CASE("single-particle tree hitting matches the generating-function value")
{
    const auto g = GraphTopology::tree(3);
    const auto c = geometric_config(g, 0.5);
    const double f = tree_neighbor_hit(0.5, 3);
    constexpr std::uint64_t kTrials = 100'000;
    const std::vector<std::vector<std::uint32_t>> targets{{0}, {0, 1}, {2, 0, 1}};
    for (const auto& addr : targets) {
        const Site y = g.make_site(std::vector<std::int32_t>(addr.begin(), addr.end()));
        const double exact = std::pow(f, static_cast<double>(addr.size()));
        const double freq = hit_frequency(c, g.root(), y, kTrials);
        const double sigma = std::sqrt(exact * (1 - exact) / kTrials);
        CHECK_MESSAGE(std::fabs(freq - exact) <= 3 * sigma, "dist " << addr.size() << " freq " << freq);
    }
}

TEST_CASE("single-particle line hitting")
{
    const auto g = GraphTopology::line();
    const auto c = geometric_config(g, 0.8);
    constexpr std::uint64_t kTrials = 100'000;
    const double freq = hit_frequency(c, g.root(), g.make_site({1}), kTrials);
    CHECK(std::fabs(freq - 0.5) <= 3 * std::sqrt(0.25 / kTrials));
    const auto rep = range_bound_check(c, g.root(), g.make_site({1}), 20'000);
    CHECK(rep.consistent);
    CHECK(rep.upper == doctest::Approx(0.8));
    // hitting on the first step alone already gives p/2
    CHECK(rep.empirical > 0.4);
}

TEST_CASE("range bound arithmetic")
{
    const auto g = GraphTopology::lattice(2);
    const auto rep = range_bound_check(geometric_config(g, 0.6), g.root(), g.make_site({2, 1}), 1000);
    CHECK(rep.distance == 3);
    CHECK(rep.lower == doctest::Approx(0.003375));
    CHECK(rep.upper == doctest::Approx(0.216));
    CHECK_THROWS_AS(range_bound_check(geometric_config(g, 0.6), g.root(), g.root(), 10), Error);
}

TEST_CASE("cluster equals the engine's visited set when both finish")
{
    for (const auto& g : {GraphTopology::line(), GraphTopology::lattice(2), GraphTopology::tree(3)}) {
        auto c = geometric_config(g, 0.6);
        c.horizon = 100'000;
        std::uint64_t compared = 0;
        for (std::uint64_t t = 0; t < 300; ++t) {
            const auto tr = run_with_trace(c, t);
            const auto cl = grow_cluster(c, t, 1'000'000);
            if (tr.outcome.status != SimStatus::DiedOut || !cl.frontier_exhausted)
                continue;
            CHECK(tr.visited == cl.activated);
            ++compared;
        }
        CHECK(compared >= 250);
    }
}

TEST_CASE("line with two-position lifetimes: cluster matches a direct search")
{
    FrogConfig c;
    c.topology = GraphTopology::line();
    c.mode = GeneralLifetime{LifetimeLaw::deterministic(2)};
    for (std::uint64_t t = 0; t < 200; ++t) {
        c.master_seed = 1000 + t;
        const auto rng = KeyedRng::for_trial(c.master_seed, 0);
        // every site owns one particle that makes exactly one jump
        std::set<std::int64_t> seen{0};
        std::vector<std::int64_t> todo{0};
        while (!todo.empty() && seen.size() <= 16) {
            const std::int64_t x = todo.back();
            todo.pop_back();
            const Site sx = c.topology.make_site({static_cast<std::int32_t>(x)});
            const std::int64_t y = x + (c.jump_choice(rng, sx.key(), 1, 0) == 0 ? 1 : -1);
            if (seen.insert(y).second)
                todo.push_back(y);
        }
        const auto cl = grow_cluster(c, 0, 16);
        if (seen.size() > 16) {
            CHECK(cl.budget_hit);
            continue;
        }
        REQUIRE(cl.frontier_exhausted);
        CHECK(cl.activated.size() == seen.size());
        for (std::int64_t v : seen)
            CHECK(cl.activated.count(c.topology.make_site({static_cast<std::int32_t>(v)})) == 1);
        // an interval containing the root
        CHECK(*seen.rbegin() - *seen.begin() + 1 == static_cast<std::int64_t>(seen.size()));
    }
}

TEST_CASE("ranges grow with p under the quantile coupling")
{
    const auto g = GraphTopology::lattice(2);
    const Site x = g.make_site({1, 1});
    for (std::uint64_t t = 0; t < 300; ++t) {
        SiteSet prev;
        for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto r = sample_range(geometric_config(g, p, "det:2"), t, x);
            for (const auto& s : prev)
                CHECK(r.ranges.count(s) == 1);
            prev = r.ranges;
        }
    }
}

TEST_CASE("budget is flagged")
{
    const auto g = GraphTopology::tree(3);
    const auto cl = grow_cluster(geometric_config(g, 0.95), 0, 50);
    CHECK(cl.budget_hit);
    CHECK_FALSE(cl.frontier_exhausted);
}

TEST_CASE("trajectory cap is an explicit error")
{
    const auto g = GraphTopology::line();
    CHECK_THROWS_AS(sample_range(geometric_config(g, 1.0), 0, g.root()), Error);
    auto c = geometric_config(g, 0.5);
    c.death = DeathMechanism::PerStepCoin;
    CHECK_THROWS_AS(sample_range(c, 0, g.root()), Error);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "frogsim/engine.hpp"
#include "frogsim/errors.hpp"

using namespace frogsim;

namespace {

FrogConfig line_config(double p, std::uint64_t horizon)
{
    FrogConfig c;
    c.topology = GraphTopology::line();
    c.mode = GeometricDeath{p, ParticleCountLaw::deterministic(1)};
    c.horizon = horizon;
    c.master_seed = 2024;
    return c;
}

// Exact P[extinct by `depth`] for the frog model on Z with one particle per
// site, by summing over every die/left/right outcome. The visited set on the
// line is always an interval, so a state is (lo, hi, sorted positions).
double line_extinction_by(double p, int depth)
{
    struct State {
        int lo, hi;
        std::vector<int> pos;
        bool operator<(const State& o) const
        {
            if (lo != o.lo)
                return lo < o.lo;
            if (hi != o.hi)
                return hi < o.hi;
            return pos < o.pos;
        }
    };
    std::map<State, double> cur{{State{0, 0, {0}}, 1.0}};
    double extinct = 0.0;
    for (int step = 1; step <= depth; ++step) {
        std::map<State, double> next;
        for (const auto& [st, w] : cur) {
            const std::size_t n = st.pos.size();
            std::size_t combos = 1;
            for (std::size_t i = 0; i < n; ++i)
                combos *= 3;
            for (std::size_t c = 0; c < combos; ++c) {
                std::size_t code = c;
                double prob = w;
                std::vector<int> moved;
                for (std::size_t i = 0; i < n; ++i) {
                    const int o = static_cast<int>(code % 3);
                    code /= 3;
                    if (o == 0) {
                        prob *= 1 - p;
                    } else {
                        prob *= p / 2;
                        moved.push_back(st.pos[i] + (o == 1 ? 1 : -1));
                    }
                }
                if (prob == 0.0)
                    continue;
                State ns{st.lo, st.hi, moved};
                for (int x : moved) {
                    if (x < ns.lo) {
                        ns.lo = x;
                        ns.pos.push_back(x);
                    } else if (x > ns.hi) {
                        ns.hi = x;
                        ns.pos.push_back(x);
                    }
                }
                if (ns.pos.empty()) {
                    extinct += prob;
                    continue;
                }
                std::sort(ns.pos.begin(), ns.pos.end());
                next[ns] += prob;
            }
        }
        cur = std::move(next);
    }
    return extinct;
}

} // namespace

TEST_CASE("p = 0 dies out at time 1")
{
    const auto out = run(line_config(0.0, 10));
    CHECK(out.status == SimStatus::DiedOut);
    REQUIRE(out.extinction_time.has_value());
    CHECK(*out.extinction_time == 1);
    CHECK(out.activated_sites == 1);
    CHECK(out.root_visits == 0);
}

TEST_CASE("horizon 0 takes no steps")
{
    for (const auto& g : {GraphTopology::line(), GraphTopology::lattice(2), GraphTopology::tree(3)}) {
        auto c = line_config(0.5, 0);
        c.topology = g;
        const auto out = run(c);
        CHECK(out.status == SimStatus::AliveAtHorizon);
        CHECK(out.root_visits == 0);
        CHECK_FALSE(out.extinction_time.has_value());
    }
}

TEST_CASE("trace of the p = 0 case")
{
    const auto tr = run_with_trace(line_config(0.0, 10));
    const auto root = GraphTopology::line().root();
    REQUIRE(tr.activation.size() == 1);
    CHECK(tr.activation.at(root).time == 0);
    CHECK(tr.visited.size() == 1);
    CHECK(tr.visited.count(root) == 1);
}

TEST_CASE("extinction probability on the line matches exhaustive enumeration")
{
    const double exact = line_extinction_by(0.5, 6);
    // first step alone: the root particle dies with probability 1/2
    CHECK(line_extinction_by(0.5, 1) == doctest::Approx(0.5));
    CHECK(exact > 0.5);
    CHECK(exact < 1.0);

    constexpr std::uint64_t kTrials = 100'000;
    const double sigma = std::sqrt(exact * (1 - exact) / kTrials);
    for (auto mech : {DeathMechanism::Presampled, DeathMechanism::PerStepCoin, DeathMechanism::QuantileCoin}) {
        auto c = line_config(0.5, 6);
        c.death = mech;
        std::uint64_t died = 0, died_at_1 = 0;
        for (std::uint64_t t = 0; t < kTrials; ++t) {
            const auto out = run(c, t);
            CHECK((out.status == SimStatus::DiedOut) == out.extinction_time.has_value());
            died += out.status == SimStatus::DiedOut;
            died_at_1 += out.extinction_time == std::optional<std::uint64_t>(1);
        }
        const double freq = static_cast<double>(died) / kTrials;
        CHECK_MESSAGE(std::fabs(freq - exact) <= 3 * sigma,
                      "mechanism " << static_cast<int>(mech) << " freq " << freq << " exact " << exact);
        CHECK(std::fabs(static_cast<double>(died_at_1) / kTrials - 0.5) <= 3 * std::sqrt(0.25 / kTrials));
    }
}

TEST_CASE("activation times increase along activator chains")
{
    auto c = line_config(0.8, 60);
    c.topology = GraphTopology::lattice(2);
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto tr = run_with_trace(c, t);
        for (const auto& [site, act] : tr.activation) {
            if (site == c.topology.root())
                continue;
            REQUIRE(tr.activation.count(act.activator) == 1);
            CHECK(tr.activation.at(act.activator).time < act.time);
        }
        CHECK(tr.activation.size() == tr.outcome.activated_sites);
    }
}

TEST_CASE("deterministic lifetimes: the first jump activates its target at time 1")
{
    FrogConfig c;
    c.topology = GraphTopology::line();
    c.mode = GeneralLifetime{LifetimeLaw::deterministic(3)};
    c.horizon = 10;
    const auto root = c.topology.root();
    for (std::uint64_t t = 0; t < 200; ++t) {
        c.master_seed = t;
        const auto tr = run_with_trace(c, 0);
        const auto rng = KeyedRng::for_trial(c.master_seed, 0);
        Site first = root;
        c.topology.step(first, c.jump_choice(rng, root.key(), 1, 0));
        REQUIRE(tr.activation.count(first) == 1);
        CHECK(tr.activation.at(first).time == 1);
    }
}

TEST_CASE("same config and seed give identical outcomes")
{
    auto c = line_config(0.9, 300);
    c.topology = GraphTopology::tree(3);
    c.max_active = 5000;
    c.checkpoints = {10, 100, 300};
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto a = run(c, t);
        const auto b = run(c, t);
        CHECK(a == b);
        REQUIRE(a.root_visits_at.size() == 3);
        CHECK(a.root_visits_at[2] == a.root_visits);
        CHECK(a.root_visits_at[0] <= a.root_visits_at[1]);
    }
}

TEST_CASE("presampled and quantile-coin deaths give identical trajectories")
{
    for (const auto& g : {GraphTopology::line(), GraphTopology::lattice(2), GraphTopology::tree(3)}) {
        auto a = line_config(0.7, 200);
        a.topology = g;
        a.max_active = 5000;
        auto b = a;
        b.death = DeathMechanism::QuantileCoin;
        for (std::uint64_t t = 0; t < 100; ++t) {
            const auto ta = run_with_trace(a, t), tb = run_with_trace(b, t);
            CHECK(ta.outcome == tb.outcome);
            CHECK(ta.visited == tb.visited);
        }
    }
}

TEST_CASE("removing the particles of one site never speeds anything up")
{
    auto c = line_config(0.75, 40);
    c.topology = GraphTopology::lattice(2);
    std::uint64_t checked = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const auto base = run_with_trace(c, t);
        if (base.activation.size() < 3)
            continue;
        // pick a non-root site by trial-dependent rank
        std::vector<std::pair<Site, std::uint64_t>> sites;
        for (const auto& [s, a] : base.activation)
            if (!(s == c.topology.root()))
                sites.emplace_back(s, a.time);
        std::sort(sites.begin(), sites.end());
        const auto [x, tx] = sites[t % sites.size()];

        auto removed = c;
        removed.eta_overrides = {{x, 0}};
        const auto alt = run_with_trace(removed, t);
        for (const auto& [s, a] : alt.activation) {
            REQUIRE(base.activation.count(s) == 1);
            CHECK(a.time >= base.activation.at(s).time);
        }
        for (const auto& [s, a] : base.activation) {
            if (a.time <= tx) {
                REQUIRE(alt.activation.count(s) == 1);
                CHECK(alt.activation.at(s).time == a.time);
            }
        }
        CHECK(alt.outcome.activated_sites <= base.outcome.activated_sites);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("coupled survival flags are monotone in p")
{
    auto c = line_config(0.5, 200);
    c.topology = GraphTopology::lattice(2);
    c.max_active = 3000;
    const std::vector<double> ps{0.3, 0.6, 0.9};
    std::vector<std::uint64_t> alive(ps.size(), 0);
    for (std::uint64_t t = 0; t < 300; ++t) {
        const auto flags = survival_indicator_coupled(c, t, ps);
        for (std::size_t i = 0; i + 1 < flags.size(); ++i)
            CHECK(flags[i] <= flags[i + 1]);
        for (std::size_t i = 0; i < flags.size(); ++i)
            alive[i] += flags[i];
    }
    CHECK(alive[0] <= alive[1]);
    CHECK(alive[1] <= alive[2]);

    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto flags = survival_indicator_coupled(c, t, {0.0, 0.8});
        CHECK_FALSE(flags[0]);
    }
    CHECK_THROWS_AS(run_coupled(c, 0, {0.9, 0.1}), Error);
}

TEST_CASE("caps are reported, never silent")
{
    auto c = line_config(1.0, 500);
    c.topology = GraphTopology::tree(3);
    c.max_active = 100;
    const auto out = run(c);
    CHECK(out.status == SimStatus::CapExceeded);
    CHECK(out.survived());

    auto r = line_config(1.0, 500);
    r.max_radius = 5;
    const auto o2 = run(r);
    CHECK(o2.status == SimStatus::CapExceeded);
    CHECK(o2.max_radius == 6);
}

TEST_CASE("p = 1 never dies before the horizon")
{
    auto c = line_config(1.0, 100);
    c.topology = GraphTopology::lattice(2);
    for (std::uint64_t t = 0; t < 10; ++t)
        CHECK(run(c, t).status == SimStatus::AliveAtHorizon);
}

TEST_CASE("invalid configurations are rejected")
{
    auto c = line_config(1.5, 10);
    CHECK_THROWS_AS(run(c), Error);
    FrogConfig g;
    g.mode = GeneralLifetime{};
    CHECK_THROWS_AS((void)g.p(), Error);
}

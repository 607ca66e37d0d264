#include <doctest.h>

#include <cmath>

#include "frogsim/branching.hpp"
#include "frogsim/errors.hpp"

using namespace frogsim;

namespace {

double poly(const std::vector<double>& pmf, double s)
{
    double v = 0.0;
    for (std::size_t k = pmf.size(); k-- > 0;)
        v = v * s + pmf[k];
    return v;
}

// Smallest root of f(s) = s in [0,1] by a grid scan for the first sign
// change of f(s) - s followed by bisection.
double extinction_by_bisection(const std::vector<double>& pmf)
{
    const auto g = [&](double s) { return poly(pmf, s) - s; };
    constexpr int kGrid = 20000;
    double lo = 0.0;
    if (g(0.0) == 0.0)
        return 0.0;
    for (int i = 1; i <= kGrid; ++i) {
        const double s = static_cast<double>(i) / kGrid;
        if (g(s) <= 0.0) {
            double hi = s;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) > 0.0 ? lo : hi) = mid;
            }
            return hi;
        }
        lo = s;
    }
    return 1.0;
}

} // namespace

TEST_CASE("survival of the 1/4, 3/4 law is 2/3")
{
    const auto law = OffspringLaw::from_pmf({0.25, 0.0, 0.75});
    CHECK(std::fabs(gw_survival_prob(law) - 2.0 / 3.0) < 1e-9);
    CHECK(law.mean().value == doctest::Approx(1.5));

    SplitMix64 rng(11);
    constexpr int kTrees = 100'000;
    int extinct = 0;
    // a population of 1000 dies out with probability (1/3)^1000, so the cap decides nothing
    for (int i = 0; i < kTrees; ++i)
        extinct += gw_simulate(law, 30, rng, 1000).extinct;
    const double q = 1.0 / 3.0;
    CHECK(std::fabs(static_cast<double>(extinct) / kTrees - q) <= 3 * std::sqrt(q * (1 - q) / kTrees));
}

TEST_CASE("trivial survival cases")
{
    CHECK(gw_survival_prob(OffspringLaw::from_pmf({0.0, 1.0})) == 1.0);
    CHECK(gw_survival_prob(OffspringLaw::from_pmf({0.5, 0.0, 0.5})) == 0.0);
    CHECK(gw_survival_prob(OffspringLaw::from_pmf({0.6, 0.2, 0.2})) == 0.0);
    CHECK(gw_survival_prob(OffspringLaw::from_pmf({1.0})) == 0.0);
    SplitMix64 rng(1);
    const auto line = gw_simulate(OffspringLaw::from_pmf({0.0, 1.0}), 20, rng);
    CHECK_FALSE(line.extinct);
    CHECK(line.sizes == std::vector<std::uint64_t>(21, 1));
    const auto dead = gw_simulate(OffspringLaw::from_pmf({1.0}), 20, rng);
    CHECK(dead.extinct);
    CHECK(dead.sizes == std::vector<std::uint64_t>{1, 0});
    CHECK_FALSE(dead.alive_at(1));
    CHECK(line.alive_at(20));
}

TEST_CASE("positive survival exactly when the mean exceeds one")
{
    SplitMix64 rng(2024);
    int compared = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t len = 2 + rng.below(5);
        std::vector<double> pmf(len);
        double total = 0.0;
        for (auto& w : pmf) {
            w = rng.uniform();
            total += w;
        }
        for (auto& w : pmf)
            w /= total;
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < len; ++k)
            sum += pmf[k];
        pmf.back() = 1.0 - sum;
        const auto law = OffspringLaw::from_pmf(pmf);
        const double m = law.mean().value;
        const double surv = gw_survival_prob(law, 1e-13);
        CHECK_MESSAGE((surv > 0.0) == (m > 1.0), "mean " << m << " survival " << surv);
        if (std::fabs(m - 1.0) > 0.05) {
            CHECK(surv == doctest::Approx(1.0 - extinction_by_bisection(pmf)).epsilon(1e-6));
            ++compared;
        }
    }
    CHECK(compared > 300);
}

TEST_CASE("simulated extinction of a subcritical law matches")
{
    const auto law = OffspringLaw::from_pmf({0.4, 0.3, 0.3});
    SplitMix64 rng(9);
    constexpr int kTrees = 10'000;
    int extinct = 0;
    for (int i = 0; i < kTrees; ++i)
        extinct += !gw_simulate(law, 200, rng).alive_at(200);
    const double q = 1.0 - gw_survival_prob(law);
    CHECK(q == 1.0);
    CHECK(static_cast<double>(extinct) / kTrees >= q - 3 * std::sqrt(1.0 / kTrees));
}

TEST_CASE("prop_g law")
{
    const auto l = prop_g_law(ParticleCountLaw::deterministic(1), 0.5);
    CHECK(l.pmf(0) == doctest::Approx(0.5));
    CHECK(l.pmf(1) == 0.0);
    CHECK(l.pmf(2) == doctest::Approx(0.5));
    CHECK(l.mean().value == doctest::Approx(1.0));
    const auto z = prop_g_law(ParticleCountLaw::deterministic(0), 0.3);
    CHECK(z.pmf(0) == doctest::Approx(0.7));
    CHECK(z.pmf(1) == doctest::Approx(0.3));
    CHECK(z.mean().value == doctest::Approx(0.3));
    // critical exactly at 1/(1+E eta)
    const auto eta = ParticleCountLaw::parse("pmf:0.2,0.5,0.3");
    const double m = eta.mean().value;
    CHECK(prop_g_law(eta, 1.0 / (1.0 + m)).mean().value == doctest::Approx(1.0));
    CHECK_THROWS_AS(prop_g_law(ParticleCountLaw::power_tail(0.5, 2), 0.5), Error);
}

TEST_CASE("prop_md law")
{
    const auto eta = ParticleCountLaw::deterministic(1);
    const auto l = prop_md_law(eta, 4.0 / 7.0, 4);
    CHECK(l.mean().value == doctest::Approx(1.0));
    CHECK(prop_md_law(eta, 2.0 / 3.0, 2).mean().value == doctest::Approx(1.0));
    const auto m3 = prop_md_law(eta, 0.5, 3);
    CHECK(m3.pmf(0) == doctest::Approx(0.5));
    CHECK(m3.pmf(1) == doctest::Approx(0.5 / 3));
    CHECK(m3.pmf(2) == doctest::Approx(0.5 * 2 / 3));
    // large k approaches the prop_g mean
    CHECK(prop_md_law(eta, 0.4, 100000).mean().value == doctest::Approx(prop_g_law(eta, 0.4).mean().value).epsilon(1e-4));
    // mean stays below one on the whole subcritical grid
    for (std::uint32_t k : {2u, 3u, 4u, 6u}) {
        const double crit = k / (1.0 + (k - 1.0) * 2.0);
        for (double p = 0.01; p < crit; p += 0.01)
            CHECK(prop_md_law(eta, p, k).mean().value < 1.0);
    }
}

TEST_CASE("pt_q upper law")
{
    CHECK(pt_q_upper_law(0.8, 0.2).mean().value == doctest::Approx(0.96));
    CHECK(pt_q_upper_law(0.7, 0.0).mean().value == doctest::Approx(0.7));
    const auto one = pt_q_upper_law(0.6, 1.0);
    CHECK(one.pmf(2) == doctest::Approx(0.6));
    CHECK(one.mean().value == doctest::Approx(1.2));
}

TEST_CASE("pmf consistency and sampling")
{
    const auto l = prop_g_law(ParticleCountLaw::parse("pmf:0.1,0.2,0.3,0.4"), 0.7);
    double total = 0.0, mean = 0.0;
    for (std::uint64_t k = 0; k < 10; ++k) {
        total += l.pmf(k);
        mean += static_cast<double>(k) * l.pmf(k);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(mean - l.mean().value) < 1e-9);
    CHECK(l.pgf(1.0) == doctest::Approx(1.0));
    CHECK(l.pgf(0.0) == doctest::Approx(0.3));
    SplitMix64 rng(4);
    double sum = 0.0;
    constexpr int kDraws = 200000;
    for (int i = 0; i < kDraws; ++i)
        sum += static_cast<double>(l.sample(rng.uniform()));
    CHECK(sum / kDraws == doctest::Approx(l.mean().value).epsilon(0.01));
    CHECK_THROWS_AS(OffspringLaw::from_pmf({0.5, 0.4}), Error);
}

TEST_CASE("infinite-support eta enters lazily")
{
    const auto eta = ParticleCountLaw::power_tail(2.5, 2);
    const auto l = prop_g_law(eta, 0.5);
    CHECK_FALSE(l.finite_support());
    CHECK(l.pmf(0) == doctest::Approx(0.5));
    CHECK(l.pmf(5) == doctest::Approx(0.5 * eta.pmf(4)));
    CHECK(l.mean().value == doctest::Approx(0.5 * (1 + eta.mean().value)));
    // the pgf at s matches a long explicit sum
    double direct = 0.5;
    for (std::uint64_t n = 0; n < 200000; ++n)
        direct += 0.5 * eta.pmf(n) * std::pow(0.9, static_cast<double>(n + 1));
    CHECK(l.pgf(0.9) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("p_c lower bounds")
{
    const auto det1 = ParticleCountLaw::deterministic(1);
    const auto t3 = pc_lower_bounds(det1, GraphTopology::tree(3));
    CHECK(t3.prop_g == doctest::Approx(0.5));
    CHECK(t3.prop_md == doctest::Approx(0.6));
    CHECK(t3.md_dominates);
    CHECK(pc_lower_bounds(det1, GraphTopology::lattice(2)).prop_md == doctest::Approx(4.0 / 7.0));
    const auto inf = pc_lower_bounds(ParticleCountLaw::power_tail(0.5, 2), GraphTopology::tree(3));
    CHECK(inf.infinite_mean);
    CHECK(inf.prop_g == 0.0);
    CHECK(inf.prop_md == 0.0);
}

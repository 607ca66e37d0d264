#include <doctest.h>

#include <cmath>

#include "frogsim/distributions.hpp"
#include "frogsim/errors.hpp"
#include "frogsim/rng.hpp"

using namespace frogsim;

namespace {

// Partial sums of E eta^delta = sum_n (n^delta - (n-1)^delta) P[eta >= n].
double power_moment_partial(const ParticleCountLaw& law, double delta, std::uint64_t n_max)
{
    double s = 0.0;
    for (std::uint64_t n = 1; n <= n_max; ++n)
        s += (std::pow(static_cast<double>(n), delta) - std::pow(static_cast<double>(n - 1), delta)) * law.tail(n);
    return s;
}

template <class Law>
void check_tail_frequencies(const Law& law, std::uint64_t seed)
{
    constexpr std::uint64_t kDraws = 1'000'000;
    SplitMix64 rng(seed);
    std::uint64_t ge[4] = {0, 0, 0, 0};
    const std::uint64_t ns[4] = {1, 2, 5, 20};
    for (std::uint64_t i = 0; i < kDraws; ++i) {
        const auto v = law.sample(rng.uniform());
        for (int j = 0; j < 4; ++j)
            ge[j] += v >= ns[j];
    }
    for (int j = 0; j < 4; ++j) {
        const double t = law.tail(ns[j]);
        const double freq = static_cast<double>(ge[j]) / kDraws;
        const double sigma = std::sqrt(std::max(t * (1 - t), 1e-12) / kDraws);
        CHECK_MESSAGE(std::fabs(freq - t) <= 4 * sigma + 1e-12,
                      law.to_string() << " n=" << ns[j] << " freq=" << freq << " tail=" << t);
    }
}

} // namespace

TEST_CASE("sample examples")
{
    for (double u : {0.0, 0.3, 0.999999})
        CHECK(LifetimeLaw::geometric(0.0).sample(u) == 1);
    CHECK(LifetimeLaw::deterministic(3).sample(0.7) == 3);
    CHECK(ParticleCountLaw::deterministic(3).sample(0.7) == 3);
    for (double u : {0.0, 0.5, 0.999})
        CHECK(ParticleCountLaw::bernoulli(1.0).sample(u) == 1);
}

TEST_CASE("tail examples")
{
    CHECK(LifetimeLaw::geometric(0.5).tail(2) == doctest::Approx(0.5));
    CHECK(ParticleCountLaw::power_tail(0.3, 2).tail(8) == doctest::Approx(std::pow(8.0, -0.3)));
    CHECK(ParticleCountLaw::power_tail(0.3, 2).tail(8) == doctest::Approx(0.5358).epsilon(1e-4));
    CHECK(ParticleCountLaw::power_tail(0.3, 2).tail(1) == 1.0);
    CHECK(ParticleCountLaw::log_tail(1.5, 3).tail(2) == 1.0);
    CHECK(ParticleCountLaw::log_tail(1.5, 3).tail(100) == doctest::Approx(std::pow(std::log(100.0), -1.5)));
    for (const char* s : {"det:2", "bern:0.3", "pmf:0.5,0.5", "powertail:0.3:2", "logtail:2:2"})
        CHECK(ParticleCountLaw::parse(s).tail(0) == 1.0);
    for (const char* s : {"geom:0.4", "det:3", "sqtail:log:2:2"})
        CHECK(LifetimeLaw::parse(s).tail(0) == 1.0);
}

TEST_CASE("square-tail lifetimes equal the shape at squares and are flat between them")
{
    const auto law = LifetimeLaw::parse("sqtail:loglog:2:6");
    for (std::uint64_t n = 6; n < 200; ++n) {
        const double expected = std::min(1.0, 2.0 * std::log(std::log(double(n))) / double(n));
        CHECK(law.tail(n * n) == doctest::Approx(expected));
        // piecewise constant on ((n-1)^2, n^2]
        CHECK(law.tail((n - 1) * (n - 1) + 1) == law.tail(n * n));
        CHECK(law.tail(n * n + 1) <= law.tail(n * n));
    }
    const auto logsq = LifetimeLaw::parse("sqtail:logsq:1:3");
    CHECK(logsq.tail(100) == doctest::Approx(std::log(10.0) * std::log(10.0) / 100.0));
    const auto lg = LifetimeLaw::parse("sqtail:log:1:2");
    CHECK(lg.tail(100) == doctest::Approx(std::log(10.0) / 100.0));
    CHECK(lg.mean().infinite);
    CHECK_THROWS_AS(LifetimeLaw::parse("sqtail:loglog:1:3"), Error);
}

TEST_CASE("mean examples")
{
    CHECK(ParticleCountLaw::deterministic(1).mean().value == 1.0);
    CHECK(LifetimeLaw::geometric(0.5).mean().value == doctest::Approx(2.0));
    CHECK(ParticleCountLaw::power_tail(0.5, 3).mean().infinite);
    CHECK(ParticleCountLaw::log_tail(3.0, 2).mean().infinite);
    CHECK(ParticleCountLaw::parse("pmf:0.25,0.25,0.5").mean().value == doctest::Approx(1.25));
    CHECK(ParticleCountLaw::bernoulli(0.3).mean().value == doctest::Approx(0.3));
}

TEST_CASE("power-tail mean with beta > 1 matches a long direct tail sum")
{
    const auto law = ParticleCountLaw::power_tail(2.5, 3);
    double direct = 0.0;
    for (std::uint64_t n = 1; n <= 2'000'000; ++n)
        direct += law.tail(n);
    // remainder beyond 2e6 is below 2e6^-1.5 / 1.5 < 3e-10
    CHECK(law.mean().value == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("moment flags")
{
    const auto det = ParticleCountLaw::deterministic(1).moment_flags();
    CHECK(det.log_moment_finite);
    CHECK(det.some_power_moment_finite);
    CHECK(det.all_log_powers_finite);

    const auto lt = ParticleCountLaw::log_tail(1.5, 2);
    const auto f = lt.moment_flags();
    CHECK_FALSE(f.some_power_moment_finite);
    CHECK_FALSE(f.all_log_powers_finite);
    CHECK(f.log_moment_finite);
    CHECK(lt.log_power_moment_finite(1.0));
    CHECK_FALSE(lt.log_power_moment_finite(2.0));
    CHECK_FALSE(lt.power_moment_finite(0.01));

    const auto pt = ParticleCountLaw::power_tail(0.3, 2);
    CHECK(pt.moment_flags().some_power_moment_finite);
    CHECK(pt.power_moment_finite(0.15));
    CHECK_FALSE(pt.power_moment_finite(0.6));
}

TEST_CASE("power moment classification agrees with partial-sum growth")
{
    const auto pt = ParticleCountLaw::power_tail(0.3, 2);
    for (double delta : {0.15, 0.6}) {
        const double s4 = power_moment_partial(pt, delta, 10'000);
        const double s6 = power_moment_partial(pt, delta, 1'000'000);
        // convergent: terms ~ n^(delta-1.3), the increment over the last two decades is small
        const bool looks_finite = (s6 - s4) < 0.5 * s4;
        CHECK_MESSAGE(looks_finite == pt.power_moment_finite(delta), "delta=" << delta << " s4=" << s4 << " s6=" << s6);
    }
}

TEST_CASE("sampled tail frequencies match exact tails within 4 sigma")
{
    check_tail_frequencies(ParticleCountLaw::parse("det:3"), 1);
    check_tail_frequencies(ParticleCountLaw::parse("bern:0.3"), 2);
    check_tail_frequencies(ParticleCountLaw::parse("pmf:0.1,0.2,0.3,0.1,0,0.3"), 3);
    check_tail_frequencies(ParticleCountLaw::parse("powertail:0.3:2"), 4);
    check_tail_frequencies(ParticleCountLaw::parse("logtail:1.5:2"), 5);
    check_tail_frequencies(ParticleCountLaw::parse("trunc:powertail:0.3:2:10"), 6);
    check_tail_frequencies(LifetimeLaw::parse("geom:0.5"), 7);
    check_tail_frequencies(LifetimeLaw::parse("geom:0.9"), 8);
    check_tail_frequencies(LifetimeLaw::parse("sqtail:loglog:3:6"), 9);
    check_tail_frequencies(LifetimeLaw::parse("sqtail:log:4:2"), 10);
    check_tail_frequencies(LifetimeLaw::parse("det:3"), 11);
}

TEST_CASE("geometric sample mean within 1 percent")
{
    for (double p : {0.3, 0.9}) {
        const auto law = LifetimeLaw::geometric(p);
        SplitMix64 rng(99);
        double sum = 0.0;
        constexpr int kDraws = 1'000'000;
        for (int i = 0; i < kDraws; ++i)
            sum += static_cast<double>(law.sample(rng.uniform()));
        CHECK(sum / kDraws == doctest::Approx(1.0 / (1.0 - p)).epsilon(0.01));
    }
}

TEST_CASE("quantile-coupled geometric lifetime is monotone in p")
{
    SplitMix64 rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        std::uint64_t prev = 0;
        for (double p = 0.0; p < 1.0; p += 0.05) {
            const auto v = geometric_lifetime(p, u);
            CHECK(v >= prev);
            prev = v;
        }
    }
    CHECK(geometric_lifetime(1.0, 0.5) == kUnbounded);
}

TEST_CASE("truncation removes large values and its mean rises to the inner mean")
{
    const auto inner = ParticleCountLaw::power_tail(1.5, 1);
    SplitMix64 rng(3);
    const auto t = ParticleCountLaw::truncated(inner, 10);
    for (int i = 0; i < 100000; ++i)
        CHECK(t.sample(rng.uniform()) <= 10);
    double prev = 0.0;
    for (std::uint64_t s : {1, 10, 100, 1000, 10000, 100000}) {
        const double m = ParticleCountLaw::truncated(inner, s).mean().value;
        CHECK(m > prev);
        CHECK(m < inner.mean().value);
        prev = m;
    }
    CHECK(inner.mean().value - prev < 0.02);
    // tail of the truncated law: inner value > s maps to 0
    CHECK(t.tail(1) == doctest::Approx(1.0 - inner.tail(11)));
    CHECK(t.tail(11) == 0.0);
}

TEST_CASE("empirical pmf must sum to one")
{
    CHECK_THROWS_AS(ParticleCountLaw::parse("pmf:0.5,0.4"), Error);
    CHECK_NOTHROW(ParticleCountLaw::parse("pmf:0.5,0.5"));
    CHECK(ParticleCountLaw::parse("pmf:0,0,1").support_max() == 2);
    CHECK(ParticleCountLaw::parse("det:0").prob_positive() == 0.0);
}

TEST_CASE("law strings round-trip")
{
    for (const char* s : {"det:0", "det:7", "bern:0.25", "pmf:0.1,0.2,0.7", "powertail:0.3:2", "logtail:1.5:2",
                          "trunc:logtail:0.5:2:100", "trunc:trunc:det:5:3:2"})
        CHECK(ParticleCountLaw::parse(s).to_string() == s);
    for (const char* s : {"geom:0.9", "det:3", "sqtail:loglog:25:6", "sqtail:logsq:1.5:3", "sqtail:log:2:2"})
        CHECK(LifetimeLaw::parse(s).to_string() == s);
    CHECK(ParticleCountLaw::parse("bern:0.1").to_string() == "bern:0.1");
}

TEST_CASE("malformed law strings are parse errors")
{
    for (const char* s : {"", "det", "det:-1", "bern:2", "powertail:0:2", "logtail:1:1", "nope:1", "pmf:a"}) {
        try {
            (void)ParticleCountLaw::parse(s);
            FAIL("accepted " << s);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
        }
    }
    CHECK_THROWS_AS(LifetimeLaw::parse("geom:1.5"), Error);
    CHECK_THROWS_AS(LifetimeLaw::parse("det:0"), Error);
}

TEST_CASE("tail beyond 64 bits")
{
    const auto pt = ParticleCountLaw::power_tail(0.5, 2);
    CHECK(pt.tail_at(1e20) == doctest::Approx(1e-10));
    CHECK(pt.tail_at(8.0) == pt.tail(8));
    CHECK(ParticleCountLaw::deterministic(3).tail_at(1e19) == 0.0);
}

#include "frogsim/percolation.hpp"

#include <cmath>
#include <deque>

#include "frogsim/errors.hpp"
#include "frogsim/parallel.hpp"

namespace frogsim {

namespace {

void require_presampled(const FrogConfig& config)
{
    require(config.death == DeathMechanism::Presampled, "ranges need presampled lifetimes");
}

void check_lifetime(std::uint64_t life, std::uint64_t cap)
{
    if (life > cap)
        fail(ErrorKind::CapExceeded, "particle lifetime " + (life == kUnbounded ? std::string("unbounded") : std::to_string(life))
                                         + " exceeds trajectory cap " + std::to_string(cap));
}

} // namespace

RangeSample sample_range(const FrogConfig& config, std::uint64_t trial, const Site& x, std::uint64_t trajectory_cap)
{
    require_presampled(config);
    const GraphTopology& g = config.topology;
    g.validate(x);
    const KeyedRng rng = KeyedRng::for_trial(config.master_seed, trial);

    RangeSample out;
    out.site = x;
    out.eta_value = config.eta_at(rng, x);
    out.ranges.insert(x);
    for (std::uint64_t i = 1; i <= out.eta_value; ++i) {
        const std::uint64_t life = config.lifetime(rng, x, i);
        check_lifetime(life, trajectory_cap);
        out.max_lifetime = std::max(out.max_lifetime, life);
        Site pos = x;
        for (std::uint64_t j = 0; j + 1 < life; ++j) {
            g.step(pos, config.jump_choice(rng, x.key(), i, j));
            out.ranges.insert(pos);
        }
    }
    return out;
}

ClusterResult grow_cluster(const FrogConfig& config, std::uint64_t trial, std::uint64_t budget,
                           std::uint64_t trajectory_cap)
{
    config.validate();
    ClusterResult out;
    const Site root = config.topology.root();
    out.activated.insert(root);
    std::vector<Site> frontier{root};
    while (!frontier.empty()) {
        std::vector<Site> next;
        for (const Site& x : frontier) {
            for (const Site& y : sample_range(config, trial, x, trajectory_cap).ranges) {
                if (!out.activated.insert(y).second)
                    continue;
                next.push_back(y);
                if (out.activated.size() > budget) {
                    out.budget_hit = true;
                    return out;
                }
            }
        }
        if (!next.empty())
            ++out.generations;
        frontier = std::move(next);
    }
    out.frontier_exhausted = true;
    return out;
}

bool single_particle_hits(const FrogConfig& config, std::uint64_t trial, const Site& x, const Site& y,
                          std::uint64_t trajectory_cap)
{
    require_presampled(config);
    const GraphTopology& g = config.topology;
    const KeyedRng rng = KeyedRng::for_trial(config.master_seed, trial);
    const std::uint64_t life = config.lifetime(rng, x, 1);
    const std::uint64_t dist = g.distance(x, y);
    if (dist == 0)
        return true;
    if (life <= dist) // needs at least dist jumps, i.e. life >= dist + 1
        return false;
    check_lifetime(life, trajectory_cap);
    Site pos = x;
    for (std::uint64_t j = 0; j + 1 < life; ++j) {
        g.step(pos, config.jump_choice(rng, x.key(), 1, j));
        if (pos == y)
            return true;
    }
    return false;
}

RangeBoundReport range_bound_check(const FrogConfig& config, const Site& x, const Site& y, std::uint64_t trials,
                                   unsigned workers)
{
    require(!(x == y), "range bound check needs x != y");
    require(trials >= 1, "trials must be >= 1");
    const double p = config.p();
    std::vector<char> hit(trials, 0);
    parallel_for(trials, workers, [&](std::uint64_t t) { hit[t] = single_particle_hits(config, t, x, y) ? 1 : 0; });

    RangeBoundReport r;
    r.trials = trials;
    for (char h : hit)
        r.hits += static_cast<std::uint64_t>(h);
    r.empirical = static_cast<double>(r.hits) / static_cast<double>(trials);
    r.sigma = std::sqrt(r.empirical * (1 - r.empirical) / static_cast<double>(trials));
    r.distance = config.topology.distance(x, y);
    const double dist = static_cast<double>(r.distance);
    r.upper = std::pow(p, dist);
    r.lower = std::pow(p / config.topology.degree(), dist);
    // each side is judged with the binomial sigma of its own null value
    const auto null_sigma = [&](double v) { return std::sqrt(v * (1 - v) / static_cast<double>(trials)); };
    const double s_hi = std::max(r.sigma, null_sigma(r.upper));
    const double s_lo = std::max(r.sigma, null_sigma(r.lower));
    r.consistent = r.lower - 3 * s_lo <= r.empirical && r.empirical <= r.upper + 3 * s_hi;
    return r;
}

} // namespace frogsim

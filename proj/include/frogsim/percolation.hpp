#pragma once

#include <cstdint>
#include <unordered_set>

#include "frogsim/engine.hpp"

namespace frogsim {

inline constexpr std::uint64_t kDefaultTrajectoryCap = 100'000'000;

using SiteSet = std::unordered_set<Site, SiteHash>;

/// The virtual range R_x: every site the particles initially at x would visit
/// during their lifetimes if nothing else existed. R_x = {x} when eta(x) = 0.
struct RangeSample {
    Site site;
    std::uint64_t eta_value = 0;
    std::uint64_t max_lifetime = 0;
    SiteSet ranges;
};

struct ClusterResult {
    SiteSet activated;
    bool frontier_exhausted = false;
    bool budget_hit = false;
    std::uint64_t generations = 0;
};

/// Uses the same keyed draws as the engine for site x in trial `trial`.
/// Throws ErrorKind::CapExceeded if a lifetime exceeds `trajectory_cap`.
RangeSample sample_range(const FrogConfig& config, std::uint64_t trial, const Site& x,
                         std::uint64_t trajectory_cap = kDefaultTrajectoryCap);

/// Breadth-first growth of the root's cluster in the oriented graph x -> R_x.
/// Stops when the frontier empties or more than `budget` sites are activated.
ClusterResult grow_cluster(const FrogConfig& config, std::uint64_t trial, std::uint64_t budget,
                           std::uint64_t trajectory_cap = kDefaultTrajectoryCap);

/// Walks particle 1 of x (ignoring eta) and reports whether it hits y before dying.
bool single_particle_hits(const FrogConfig& config, std::uint64_t trial, const Site& x, const Site& y,
                          std::uint64_t trajectory_cap = kDefaultTrajectoryCap);

struct RangeBoundReport {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double empirical = 0.0;
    double sigma = 0.0;
    std::uint64_t distance = 0;
    double upper = 0.0; // p^dist
    double lower = 0.0; // (p/deg)^dist
    bool consistent = false;
};

/// Monte Carlo P[y in R_x^1] against p^dist and (p/deg)^dist, 3 sigma slack.
RangeBoundReport range_bound_check(const FrogConfig& config, const Site& x, const Site& y, std::uint64_t trials,
                                   unsigned workers = 1);

} // namespace frogsim

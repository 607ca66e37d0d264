#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "frogsim/distributions.hpp"
#include "frogsim/graphs.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

/// FM(G, p, eta): geometric lifetimes with survival parameter p.
struct GeometricDeath {
    double p = 0.5;
    ParticleCountLaw eta = ParticleCountLaw::deterministic(1);
};

/// GFM(G, Xi): one particle per site, i.i.d. lifetimes drawn from `xi`.
struct GeneralLifetime {
    LifetimeLaw xi = LifetimeLaw::geometric(0.5);
};

/// How geometric death is realised. All three give the same law; Presampled
/// and QuantileCoin give identical trajectories for the same keys.
enum class DeathMechanism {
    Presampled,  // Xi drawn at activation, Xi - 1 jumps
    PerStepCoin, // independent survival coin with probability p before each jump
    QuantileCoin // survive jump j iff U <= p^j for the particle's lifetime uniform U
};

struct FrogConfig {
    GraphTopology topology = GraphTopology::line();
    std::variant<GeometricDeath, GeneralLifetime> mode = GeometricDeath{};
    std::uint64_t horizon = 1000;
    std::uint64_t max_active = 1'000'000;
    std::uint64_t max_radius = 1'000'000;
    std::uint64_t master_seed = 0;
    DeathMechanism death = DeathMechanism::Presampled;
    /// Times at which the cumulative root-visit count is recorded.
    std::vector<std::uint64_t> checkpoints;
    /// Replaces eta at the listed sites; used by replay experiments.
    std::vector<std::pair<Site, std::uint64_t>> eta_overrides;

    void validate() const;

    bool geometric() const noexcept { return std::holds_alternative<GeometricDeath>(mode); }
    /// p for GeometricDeath; throws otherwise.
    double p() const;
    FrogConfig with_p(double p) const;

    /// Initial count at x, a pure function of (trial key, x).
    std::uint64_t eta_at(const KeyedRng& rng, const Site& x) const;
    /// Lifetime of particle `index` (1-based) originally at x.
    std::uint64_t lifetime(const KeyedRng& rng, const Site& x, std::uint64_t index) const;
    /// Neighbor index of the `jump`-th move (0-based) of that particle.
    std::uint32_t jump_choice(const KeyedRng& rng, std::uint64_t origin_key, std::uint64_t index,
                              std::uint64_t jump) const
    {
        return pick_below(rng.bits(Purpose::Jump, origin_key, index, jump), topology.degree());
    }
};

enum class SimStatus { DiedOut, AliveAtHorizon, CapExceeded };

const char* to_string(SimStatus s);

struct SimOutcome {
    SimStatus status = SimStatus::AliveAtHorizon;
    std::optional<std::uint64_t> extinction_time;
    std::uint64_t root_visits = 0;
    std::uint64_t activated_sites = 0;
    std::uint64_t max_radius = 0;
    std::uint64_t steps = 0;
    /// Cumulative root visits at each configured checkpoint.
    std::vector<std::uint64_t> root_visits_at;

    bool survived() const noexcept { return status != SimStatus::DiedOut; }
    friend bool operator==(const SimOutcome&, const SimOutcome&) = default;
};

struct SiteActivation {
    std::uint64_t time = 0;
    /// Origin of the particle that first reached the site (the root for itself).
    Site activator;
};

struct SimTrace {
    SimOutcome outcome;
    /// T(x) for every site ever occupied by an active particle.
    std::unordered_map<Site, SiteActivation, SiteHash> activation;
    std::unordered_set<Site, SiteHash> visited;
};

struct Particle {
    Site position;
    Site origin;
    std::uint64_t origin_key = 0;
    std::uint64_t index = 0;
    std::uint64_t remaining = 0; // positions left to occupy, including the current one
    std::uint64_t jumps = 0;
};

/// Runs trial `trial` of the configuration.
SimOutcome run(const FrogConfig& config, std::uint64_t trial = 0);
SimTrace run_with_trace(const FrogConfig& config, std::uint64_t trial = 0);

/// Runs every p of the ascending list against the same keyed randomness.
std::vector<SimOutcome> run_coupled(const FrogConfig& config, std::uint64_t trial,
                                    const std::vector<double>& p_list);
/// Survival flags (status != DiedOut) of run_coupled.
std::vector<bool> survival_indicator_coupled(const FrogConfig& config, std::uint64_t trial,
                                             const std::vector<double>& p_list);

} // namespace frogsim

#include "frogsim/engine.hpp"

#include <algorithm>
#include <cmath>

#include "frogsim/errors.hpp"

namespace frogsim {

const char* to_string(SimStatus s)
{
    switch (s) {
    case SimStatus::DiedOut:
        return "DiedOut";
    case SimStatus::AliveAtHorizon:
        return "AliveAtHorizon";
    case SimStatus::CapExceeded:
        return "CapExceeded";
    }
    return "?";
}

void FrogConfig::validate() const
{
    require(max_active >= 1, "max_active must be >= 1");
    require(max_radius >= 1, "max_radius must be >= 1");
    require(std::is_sorted(checkpoints.begin(), checkpoints.end()), "checkpoints must be ascending");
    if (const auto* g = std::get_if<GeometricDeath>(&mode)) {
        require(g->p >= 0.0 && g->p <= 1.0, "p must lie in [0,1]");
        require(g->eta.prob_positive() > 0.0, "eta must satisfy P[eta >= 1] > 0");
    } else {
        require(death == DeathMechanism::Presampled, "coin death mechanisms need geometric death");
    }
    for (const auto& [site, count] : eta_overrides)
        topology.validate(site);
}

double FrogConfig::p() const
{
    const auto* g = std::get_if<GeometricDeath>(&mode);
    require(g != nullptr, "configuration has no survival parameter p");
    return g->p;
}

FrogConfig FrogConfig::with_p(double p) const
{
    FrogConfig c = *this;
    auto* g = std::get_if<GeometricDeath>(&c.mode);
    require(g != nullptr, "configuration has no survival parameter p");
    g->p = p;
    return c;
}

std::uint64_t FrogConfig::eta_at(const KeyedRng& rng, const Site& x) const
{
    for (const auto& [site, count] : eta_overrides)
        if (site == x)
            return count;
    if (const auto* g = std::get_if<GeometricDeath>(&mode))
        return g->eta.sample(rng.uniform(Purpose::Eta, x.key()));
    return 1;
}

std::uint64_t FrogConfig::lifetime(const KeyedRng& rng, const Site& x, std::uint64_t index) const
{
    const double u = rng.uniform(Purpose::Lifetime, x.key(), index);
    if (const auto* g = std::get_if<GeometricDeath>(&mode)) {
        if (death == DeathMechanism::Presampled)
            return geometric_lifetime(g->p, u);
        return kUnbounded; // decided step by step
    }
    return std::get<GeneralLifetime>(mode).xi.sample(u);
}

namespace {

class Simulation {
public:
    Simulation(const FrogConfig& config, std::uint64_t trial, SimTrace* trace)
        : cfg_(config), topo_(config.topology), rng_(KeyedRng::for_trial(config.master_seed, trial)),
          trace_(trace)
    {
        cfg_.validate();
        if (cfg_.geometric()) {
            p_ = cfg_.p();
            log_p_ = p_ > 0.0 ? std::log(p_) : -INFINITY;
        }
    }

    SimOutcome run()
    {
        const Site root = topo_.root();
        visit(root, 0, root);
        std::size_t next_checkpoint = 0;
        auto record_checkpoints = [&](std::uint64_t now) {
            while (next_checkpoint < cfg_.checkpoints.size() && cfg_.checkpoints[next_checkpoint] <= now) {
                out_.root_visits_at.push_back(out_.root_visits);
                ++next_checkpoint;
            }
        };
        auto finish_checkpoints = [&] {
            while (out_.root_visits_at.size() < cfg_.checkpoints.size())
                out_.root_visits_at.push_back(out_.root_visits);
        };

        if (!activate_pending()) {
            finish_checkpoints();
            return done(SimStatus::CapExceeded);
        }
        record_checkpoints(0);
        if (active_.empty()) {
            out_.extinction_time = 0;
            finish_checkpoints();
            return done(SimStatus::DiedOut);
        }

        for (std::uint64_t t = 1; t <= cfg_.horizon; ++t) {
            out_.steps = t;
            if (!advance(t) || !activate_pending()) {
                finish_checkpoints();
                return done(SimStatus::CapExceeded);
            }
            record_checkpoints(t);
            if (active_.empty()) {
                out_.extinction_time = t;
                finish_checkpoints();
                return done(SimStatus::DiedOut);
            }
        }
        finish_checkpoints();
        return done(SimStatus::AliveAtHorizon);
    }

private:
    struct Pending {
        Site site;
    };

    SimOutcome done(SimStatus status)
    {
        out_.status = status;
        out_.activated_sites = visited_.size();
        if (trace_) {
            trace_->outcome = out_;
            trace_->visited.clear();
            for (const auto& [site, rec] : visited_)
                trace_->visited.insert(site);
        }
        return out_;
    }

    // Records the first visit of `site` at time t and queues its particles.
    void visit(const Site& site, std::uint64_t t, const Site& activator)
    {
        auto [it, inserted] = visited_.try_emplace(site, t);
        if (!inserted)
            return;
        pending_.push_back(Pending{site});
        if (trace_)
            trace_->activation.emplace(site, SiteActivation{t, activator});
    }

    bool activate_pending()
    {
        for (auto& pend : pending_) {
            const std::uint64_t count = cfg_.eta_at(rng_, pend.site);
            if (count == 0)
                continue;
            if (count > cfg_.max_active || active_.size() + count > cfg_.max_active) {
                pending_.clear();
                return false;
            }
            for (std::uint64_t i = 1; i <= count; ++i) {
                Particle part;
                part.position = pend.site;
                part.origin = pend.site;
                part.origin_key = pend.site.key();
                part.index = i;
                part.remaining = cfg_.lifetime(rng_, pend.site, i);
                active_.push_back(std::move(part));
            }
        }
        pending_.clear();
        return true;
    }

    bool survives_jump(const Particle& part)
    {
        switch (cfg_.death) {
        case DeathMechanism::Presampled:
            return part.remaining > 1;
        case DeathMechanism::PerStepCoin:
            return rng_.uniform(Purpose::Coin, part.origin_key, part.index, part.jumps) < p_;
        case DeathMechanism::QuantileCoin: {
            if (p_ <= 0.0)
                return false;
            if (p_ >= 1.0)
                return true;
            const double U = 1.0 - rng_.uniform(Purpose::Lifetime, part.origin_key, part.index);
            if (U >= 1.0)
                return false;
            return std::floor(std::log(U) / log_p_) >= static_cast<double>(part.jumps + 1);
        }
        }
        return false;
    }

    bool advance(std::uint64_t t)
    {
        std::size_t i = 0;
        while (i < active_.size()) {
            Particle& part = active_[i];
            if (!survives_jump(part)) {
                if (i + 1 != active_.size())
                    part = std::move(active_.back());
                active_.pop_back();
                continue;
            }
            if (part.remaining != kUnbounded)
                --part.remaining;
            topo_.step(part.position, cfg_.jump_choice(rng_, part.origin_key, part.index, part.jumps));
            ++part.jumps;
            const std::uint64_t r = topo_.distance_from_root(part.position);
            out_.max_radius = std::max(out_.max_radius, r);
            if (r > cfg_.max_radius)
                return false;
            if (r == 0)
                ++out_.root_visits;
            visit(part.position, t, part.origin);
            ++i;
        }
        return true;
    }

    const FrogConfig& cfg_;
    const GraphTopology& topo_;
    KeyedRng rng_;
    SimTrace* trace_;
    double p_ = 0.0;
    double log_p_ = 0.0;
    std::unordered_map<Site, std::uint64_t, SiteHash> visited_;
    std::vector<Pending> pending_;
    std::vector<Particle> active_;
    SimOutcome out_;
};

} // namespace

SimOutcome run(const FrogConfig& config, std::uint64_t trial)
{
    return Simulation(config, trial, nullptr).run();
}

SimTrace run_with_trace(const FrogConfig& config, std::uint64_t trial)
{
    SimTrace trace;
    Simulation(config, trial, &trace).run();
    return trace;
}

std::vector<SimOutcome> run_coupled(const FrogConfig& config, std::uint64_t trial,
                                    const std::vector<double>& p_list)
{
    require(std::is_sorted(p_list.begin(), p_list.end()), "p_list must be ascending");
    std::vector<SimOutcome> out;
    out.reserve(p_list.size());
    for (double p : p_list)
        out.push_back(run(config.with_p(p), trial));
    return out;
}

std::vector<bool> survival_indicator_coupled(const FrogConfig& config, std::uint64_t trial,
                                             const std::vector<double>& p_list)
{
    std::vector<bool> flags;
    for (const auto& o : run_coupled(config, trial, p_list))
        flags.push_back(o.survived());
    return flags;
}

} // namespace frogsim

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "frogsim/distributions.hpp"
#include "frogsim/graphs.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

/// Galton-Watson offspring law: explicit point masses `atoms[k] = P[k]` plus an
/// optional lazily evaluated component `weight * P[eta + shift = k]`, which is
/// how infinite-support eta enters the comparison processes.
class OffspringLaw {
public:
    static OffspringLaw from_pmf(std::vector<double> pmf);
    static OffspringLaw with_count_component(std::vector<double> atoms, double weight, std::uint64_t shift,
                                             const ParticleCountLaw& eta);

    double pmf(std::uint64_t k) const;
    /// Generating function E s^X; lazy terms are cut once their tail mass is < 1e-12.
    double pgf(double s) const;
    ExtendedReal mean() const { return mean_; }
    std::uint64_t sample(double u) const;
    bool finite_support() const { return !eta_; }
    /// Largest k with positive mass among the explicit atoms (finite laws only).
    std::uint64_t support_max() const;
    std::string describe() const;

private:
    OffspringLaw() = default;
    void finish();

    std::vector<double> atoms_;
    double weight_ = 0.0;
    std::uint64_t shift_ = 0;
    std::shared_ptr<const ParticleCountLaw> eta_;
    ExtendedReal mean_;
};

/// Any-graph comparison: P[0] = 1-p, P[j+1] = p gamma_j; mean (1+E eta) p.
OffspringLaw prop_g_law(const ParticleCountLaw& eta, double p);
/// Comparison on graphs of maximum degree k.
OffspringLaw prop_md_law(const ParticleCountLaw& eta, double p, std::uint32_t k);
/// Upper comparison for Bernoulli(q) initial counts: P = {1-p, p(1-q), pq}.
OffspringLaw pt_q_upper_law(double p, double q);

/// 1 - rho with rho the smallest fixed point of the generating function in [0,1].
double gw_survival_prob(const OffspringLaw& law, double tol = 1e-10, std::uint64_t max_iter = 50'000'000);

struct GwRun {
    std::vector<std::uint64_t> sizes; // sizes[0] = 1
    bool extinct = false;
    bool cap_hit = false;

    /// Population still alive after `generations` generations (cap hit counts as alive).
    bool alive_at(std::uint64_t generations) const;
};

GwRun gw_simulate(const OffspringLaw& law, std::uint64_t generations, SplitMix64& rng,
                  std::uint64_t population_cap = 100'000);

struct PcLowerBounds {
    double prop_g = 0.0;
    double prop_md = 0.0;
    std::uint32_t degree = 0;
    bool infinite_mean = false;
    bool md_dominates = false;
};

PcLowerBounds pc_lower_bounds(const ParticleCountLaw& eta, const GraphTopology& topology);

} // namespace frogsim

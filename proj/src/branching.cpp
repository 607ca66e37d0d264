#include "frogsim/branching.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "frogsim/errors.hpp"

namespace frogsim {

namespace {

constexpr double kLazyTailCut = 1e-12;
constexpr std::uint64_t kLazyTermCap = 50'000'000;

double finite_mean_or_throw(const ParticleCountLaw& eta)
{
    const auto m = eta.mean();
    require(!m.infinite, "comparison law needs E eta < infinity (" + eta.to_string() + ")");
    return m.value;
}

} // namespace

OffspringLaw OffspringLaw::from_pmf(std::vector<double> pmf)
{
    require(!pmf.empty(), "offspring pmf is empty");
    for (double w : pmf)
        require(w >= 0.0, "offspring pmf has a negative entry");
    OffspringLaw law;
    law.atoms_ = std::move(pmf);
    law.finish();
    return law;
}

OffspringLaw OffspringLaw::with_count_component(std::vector<double> atoms, double weight, std::uint64_t shift,
                                                const ParticleCountLaw& eta)
{
    require(weight >= 0.0, "component weight must be nonnegative");
    OffspringLaw law;
    law.atoms_ = std::move(atoms);
    law.weight_ = weight;
    law.shift_ = shift;
    const auto top = eta.support_max();
    if (weight > 0 && top != kUnbounded) {
        // finite support: fold the component into explicit atoms
        if (law.atoms_.size() < top + shift + 1)
            law.atoms_.resize(top + shift + 1, 0.0);
        for (std::uint64_t j = 0; j <= top; ++j)
            law.atoms_[j + shift] += weight * eta.pmf(j);
        law.weight_ = 0.0;
    } else if (weight > 0) {
        law.eta_ = std::make_shared<const ParticleCountLaw>(eta);
    }
    law.finish();
    return law;
}

void OffspringLaw::finish()
{
    const double total = std::accumulate(atoms_.begin(), atoms_.end(), 0.0) + weight_;
    require(std::fabs(total - 1.0) <= 1e-12, "offspring pmf must sum to 1 (got " + format_double(total) + ")");
    if (!eta_) {
        double m = 0;
        for (std::size_t k = 0; k < atoms_.size(); ++k)
            m += static_cast<double>(k) * atoms_[k];
        mean_ = ExtendedReal::finite(m);
        return;
    }
    const auto em = eta_->mean();
    double m = 0;
    for (std::size_t k = 0; k < atoms_.size(); ++k)
        m += static_cast<double>(k) * atoms_[k];
    mean_ = em.infinite ? ExtendedReal::inf()
                        : ExtendedReal::finite(m + weight_ * (em.value + static_cast<double>(shift_)));
}

double OffspringLaw::pmf(std::uint64_t k) const
{
    double v = k < atoms_.size() ? atoms_[k] : 0.0;
    if (eta_ && k >= shift_)
        v += weight_ * eta_->pmf(k - shift_);
    return v;
}

double OffspringLaw::pgf(double s) const
{
    double v = 0.0;
    double sk = 1.0;
    for (double a : atoms_) {
        v += a * sk;
        sk *= s;
    }
    if (!eta_)
        return v;
    if (s >= 1.0)
        return v + weight_;
    double g = 0.0;
    double sj = 1.0;
    for (std::uint64_t j = 0; j < kLazyTermCap; ++j) {
        const double tail_next = eta_->tail(j + 1);
        g += (eta_->tail(j) - tail_next) * sj;
        sj *= s;
        if (tail_next * sj < kLazyTailCut)
            break;
    }
    return v + weight_ * std::pow(s, static_cast<double>(shift_)) * g;
}

std::uint64_t OffspringLaw::sample(double u) const
{
    double acc = 0.0;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        acc += atoms_[k];
        if (u < acc)
            return k;
    }
    if (!eta_) {
        // rounding slack: return the last atom with positive mass
        return support_max();
    }
    const double rest = std::min(std::max((u - acc) / weight_, 0.0), std::nextafter(1.0, 0.0));
    const auto v = eta_->sample(rest);
    return v > kUnbounded - shift_ ? kUnbounded : v + shift_;
}

std::uint64_t OffspringLaw::support_max() const
{
    require(!eta_, "offspring law has unbounded support");
    std::uint64_t k = atoms_.size() - 1;
    while (k > 0 && atoms_[k] == 0.0)
        --k;
    return k;
}

std::string OffspringLaw::describe() const
{
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        if (atoms_[k] == 0.0)
            continue;
        os << (first ? "" : ", ") << k << ':' << format_double(atoms_[k]);
        first = false;
    }
    if (eta_)
        os << (first ? "" : ", ") << format_double(weight_) << "*(" << eta_->to_string() << ")+" << shift_;
    os << '}';
    return os.str();
}

OffspringLaw prop_g_law(const ParticleCountLaw& eta, double p)
{
    require(p >= 0.0 && p <= 1.0, "p must lie in [0,1]");
    finite_mean_or_throw(eta);
    return OffspringLaw::with_count_component({1.0 - p}, p, 1, eta);
}

OffspringLaw prop_md_law(const ParticleCountLaw& eta, double p, std::uint32_t k)
{
    require(p >= 0.0 && p <= 1.0, "p must lie in [0,1]");
    require(k >= 2, "maximum degree must be >= 2");
    finite_mean_or_throw(eta);
    const double kd = static_cast<double>(k);
    return OffspringLaw::with_count_component({1.0 - p, p / kd}, p * (kd - 1.0) / kd, 1, eta);
}

OffspringLaw pt_q_upper_law(double p, double q)
{
    require(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0, "p and q must lie in [0,1]");
    return OffspringLaw::from_pmf({1.0 - p, p * (1.0 - q), p * q});
}

double gw_survival_prob(const OffspringLaw& law, double tol, std::uint64_t max_iter)
{
    require(tol > 0.0, "tolerance must be positive");
    if (law.pmf(1) == 1.0)
        return 1.0;
    const auto m = law.mean();
    if (!m.infinite && m.value <= 1.0)
        return 0.0;
    double s = 0.0;
    for (std::uint64_t it = 0; it < max_iter; ++it) {
        const double next = law.pgf(s);
        if (std::fabs(next - s) < tol)
            return 1.0 - next;
        s = next;
    }
    fail(ErrorKind::NonConvergence, "generating-function iteration did not converge");
}

bool GwRun::alive_at(std::uint64_t generations) const
{
    if (cap_hit)
        return true;
    return generations < sizes.size() && sizes[generations] > 0;
}

GwRun gw_simulate(const OffspringLaw& law, std::uint64_t generations, SplitMix64& rng, std::uint64_t population_cap)
{
    GwRun run;
    run.sizes.push_back(1);
    std::uint64_t z = 1;
    for (std::uint64_t g = 1; g <= generations; ++g) {
        std::uint64_t next = 0;
        for (std::uint64_t i = 0; i < z; ++i) {
            const auto c = law.sample(rng.uniform());
            if (c > population_cap || next + c > population_cap) {
                run.cap_hit = true;
                return run;
            }
            next += c;
        }
        run.sizes.push_back(next);
        z = next;
        if (z == 0) {
            run.extinct = true;
            return run;
        }
    }
    return run;
}

PcLowerBounds pc_lower_bounds(const ParticleCountLaw& eta, const GraphTopology& topology)
{
    PcLowerBounds b;
    b.degree = topology.degree();
    const auto m = eta.mean();
    if (m.infinite) {
        b.infinite_mean = true;
        return b;
    }
    const double k = static_cast<double>(b.degree);
    b.prop_g = 1.0 / (1.0 + m.value);
    b.prop_md = k / (1.0 + (k - 1.0) * (m.value + 1.0));
    b.md_dominates = b.prop_md >= b.prop_g;
    return b;
}

} // namespace frogsim

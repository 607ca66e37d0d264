#include "frogsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frogsim/errors.hpp"
#include "frogsim/parallel.hpp"
#include "frogsim/percolation.hpp"

namespace frogsim {

namespace {

constexpr double kZ95 = 1.959963984540054;

SurvivalEstimate from_counts(std::uint64_t survived, std::uint64_t trials, std::uint64_t horizon,
                             std::uint64_t capped)
{
    const auto pr = make_proportion(survived, trials);
    SurvivalEstimate e;
    e.point = pr.estimate;
    e.ci_low = pr.ci_low;
    e.ci_high = pr.ci_high;
    e.trials = trials;
    e.survived = survived;
    e.horizon = horizon;
    e.cap_exceeded_count = capped;
    return e;
}

bool overlap(const RecurrencePoint& a, const RecurrencePoint& b)
{
    return a.ci_low <= b.ci_high && b.ci_low <= a.ci_high;
}

std::uint64_t gw_seed(std::uint64_t master_seed)
{
    return combine(mix64(master_seed), static_cast<std::uint64_t>(Purpose::Auxiliary));
}

} // namespace

std::vector<SimOutcome> run_trials(const FrogConfig& config, std::uint64_t trials, unsigned workers)
{
    config.validate();
    std::vector<SimOutcome> out(trials);
    parallel_for(trials, workers, [&](std::uint64_t t) { out[t] = run(config, t); });
    return out;
}

bool alive_at(const SimOutcome& o, std::uint64_t h)
{
    if (o.status == SimStatus::DiedOut)
        return *o.extinction_time > h;
    return true;
}

SurvivalEstimate summarize_survival(const std::vector<SimOutcome>& outcomes, std::uint64_t horizon)
{
    require(!outcomes.empty(), "trials must be >= 1");
    std::uint64_t alive = 0, capped = 0;
    for (const auto& o : outcomes) {
        alive += alive_at(o, horizon);
        capped += o.status == SimStatus::CapExceeded;
    }
    return from_counts(alive, outcomes.size(), horizon, capped);
}

SurvivalEstimate estimate_survival(const FrogConfig& config, std::uint64_t trials, unsigned workers)
{
    return summarize_survival(run_trials(config, trials, workers), config.horizon);
}

std::vector<SurvivalEstimate> estimate_survival_horizons(const FrogConfig& config,
                                                         const std::vector<std::uint64_t>& horizons,
                                                         std::uint64_t trials, unsigned workers)
{
    require(!horizons.empty(), "horizon list is empty");
    require(std::is_sorted(horizons.begin(), horizons.end()), "horizons must be ascending");
    FrogConfig c = config;
    c.horizon = horizons.back();
    const auto outcomes = run_trials(c, trials, workers);
    std::vector<SurvivalEstimate> out;
    for (auto h : horizons)
        out.push_back(summarize_survival(outcomes, h));
    return out;
}

bool PcEstimate::profile_monotone() const
{
    for (std::size_t j = 1; j < profile.size(); ++j)
        if (profile[j].survival.survived < profile[j - 1].survival.survived)
            return false;
    return true;
}

PcEstimate estimate_pc(const FrogConfig& config, std::uint64_t trials, double eps, double tol_p, unsigned workers)
{
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    require(tol_p > 0.0, "tol_p must be positive");
    require(config.geometric(), "p_c estimation needs geometric death");
    PcEstimate est;
    est.eps = eps;
    est.tol_p = tol_p;
    est.horizon = config.horizon;
    est.trials = trials;

    auto probe = [&](double p) {
        const auto s = estimate_survival(config.with_p(p), trials, workers);
        est.profile.push_back(PcProbe{p, s});
        return s.point > eps;
    };

    double lo = 0.0, hi = 1.0;
    if (probe(lo)) {
        est.degenerate = true;
        est.note = "survival exceeds eps already at p = 0";
        est.bracket_low = 0.0;
        est.bracket_high = tol_p;
    } else if (!probe(hi)) {
        est.degenerate = true;
        est.note = "survival stays at or below eps up to p = 1";
        est.bracket_low = 1.0 - tol_p;
        est.bracket_high = 1.0;
    } else {
        while (hi - lo > tol_p) {
            const double mid = 0.5 * (lo + hi);
            (probe(mid) ? hi : lo) = mid;
        }
        est.bracket_low = lo;
        est.bracket_high = hi;
        est.note = "finite-horizon proxy: survival is over-reported, bracket_low is the conservative edge";
    }
    std::sort(est.profile.begin(), est.profile.end(), [](const PcProbe& a, const PcProbe& b) { return a.p < b.p; });
    return est;
}

const char* to_string(RecurrenceVerdict v)
{
    switch (v) {
    case RecurrenceVerdict::GrowingUnbounded:
        return "GrowingUnbounded";
    case RecurrenceVerdict::Saturating:
        return "Saturating";
    case RecurrenceVerdict::Inconclusive:
        return "Inconclusive";
    }
    return "?";
}

RecurrenceVerdict classify_recurrence(const std::vector<RecurrencePoint>& pts)
{
    const std::size_t n = pts.size();
    if (n >= 3) {
        bool growing = true;
        for (std::size_t j = n - 2; j < n; ++j) {
            const auto& a = pts[j - 1];
            const auto& b = pts[j];
            if (!(b.mean >= (1.0 + kRecurrenceGrowth) * a.mean && b.mean > 0.0 && b.ci_low > a.ci_high))
                growing = false;
        }
        if (growing)
            return RecurrenceVerdict::GrowingUnbounded;
    }
    if (n >= 2) {
        const auto& a = pts[n - 2];
        const auto& b = pts[n - 1];
        if (overlap(a, b) && b.mean < (1.0 + kRecurrenceGrowth) * a.mean + 1e-12)
            return RecurrenceVerdict::Saturating;
    }
    return RecurrenceVerdict::Inconclusive;
}

RecurrenceReport recurrence_curve(const FrogConfig& config, const std::vector<std::uint64_t>& horizons,
                                  std::uint64_t trials, unsigned workers)
{
    require(!horizons.empty(), "horizon list is empty");
    require(trials >= 2, "recurrence needs at least 2 trials");
    for (std::size_t j = 1; j < horizons.size(); ++j)
        require(horizons[j] > horizons[j - 1], "horizons must be strictly increasing");
    FrogConfig c = config;
    c.horizon = horizons.back();
    c.checkpoints = horizons;
    const auto outcomes = run_trials(c, trials, workers);

    RecurrenceReport rep;
    rep.trials = trials;
    for (const auto& o : outcomes)
        rep.cap_exceeded_count += o.status == SimStatus::CapExceeded;
    const double n = static_cast<double>(trials);
    for (std::size_t j = 0; j < horizons.size(); ++j) {
        double sum = 0.0;
        for (const auto& o : outcomes)
            sum += static_cast<double>(o.root_visits_at[j]);
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& o : outcomes) {
            const double d = static_cast<double>(o.root_visits_at[j]) - mean;
            ss += d * d;
        }
        RecurrencePoint pt;
        pt.horizon = horizons[j];
        pt.mean = mean;
        pt.std_error = std::sqrt(ss / (n - 1.0) / n);
        pt.ci_low = std::max(0.0, mean - kZ95 * pt.std_error);
        pt.ci_high = mean + kZ95 * pt.std_error;
        rep.points.push_back(pt);
    }
    rep.verdict = classify_recurrence(rep.points);
    return rep;
}

SweepReport sweep_pc_vs_dimension(const FrogConfig& base, const std::string& family, const std::vector<int>& dims,
                                  std::uint64_t trials, double eps, double tol_p, unsigned workers)
{
    require(family == "tree" || family == "zd", "family must be tree or zd");
    require(!dims.empty() && std::is_sorted(dims.begin(), dims.end()), "dimension list must be ascending");
    require(base.geometric(), "dimension sweep needs geometric death");
    SweepReport rep;
    const auto& eta = std::get<GeometricDeath>(base.mode).eta;
    const auto m = eta.mean();
    rep.target = m.infinite ? 0.0 : 1.0 / (1.0 + m.value);
    for (int d : dims) {
        FrogConfig c = base;
        c.topology = family == "tree" ? GraphTopology::tree(d) : GraphTopology::lattice(d);
        SweepRow row;
        row.dim = d;
        row.estimate = estimate_pc(c, trials, eps, tol_p, workers);
        row.bounds = pc_lower_bounds(eta, c.topology);
        rep.rows.push_back(std::move(row));
    }
    rep.midpoints_non_increasing = true;
    for (std::size_t j = 1; j < rep.rows.size(); ++j)
        if (rep.rows[j].estimate.midpoint() > rep.rows[j - 1].estimate.midpoint())
            rep.midpoints_non_increasing = false;
    rep.final_gap = std::fabs(rep.rows.back().estimate.midpoint() - rep.target);
    return rep;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(parse_double(item, "grid"));
    if (parts.size() != 3)
        fail(ErrorKind::Parse, "grid must be lo:hi:step, got '" + text + "'");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(step > 0.0) || hi < lo)
        fail(ErrorKind::Parse, "grid needs lo <= hi and step > 0, got '" + text + "'");
    std::vector<double> out;
    const auto count = static_cast<std::uint64_t>(std::floor((hi - lo) / step + 1e-9));
    require(count < 1'000'000, "grid has too many points");
    for (std::uint64_t j = 0; j <= count; ++j) {
        // snap to 12 significant digits so 0.1:0.9:0.1 yields 0.3, not 0.30000000000000004
        const double v = lo + static_cast<double>(j) * step;
        out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
}

BoundsReport bounds_report(const FrogConfig& base, const std::vector<double>& p_grid, std::uint64_t trials,
                           double eps, unsigned workers)
{
    require(base.geometric(), "bounds report needs geometric death");
    require(!p_grid.empty(), "p grid is empty");
    const auto& eta = std::get<GeometricDeath>(base.mode).eta;
    BoundsReport rep;
    rep.eps = eps;
    const auto bounds = pc_lower_bounds(eta, base.topology);
    for (double p : p_grid) {
        require(p >= 0.0 && p <= 1.0, "grid values must lie in [0,1]");
        BoundsRow row;
        row.p = p;
        row.bounds = bounds;
        row.below_prop_g = !bounds.infinite_mean && p < bounds.prop_g;
        row.below_prop_md = !bounds.infinite_mean && p < bounds.prop_md;
        row.range_sum = expected_range_sum(eta, p, base.topology);
        row.survival = estimate_survival(base.with_p(p), trials, workers);
        if (row.below_prop_g && row.below_prop_md && row.range_sum.subcritical && row.survival.point > eps) {
            row.consistent = false;
            rep.consistent = false;
            std::ostringstream os;
            os << "p=" << format_double(p) << " is below both bounds (" << format_double(bounds.prop_g) << ", "
               << format_double(bounds.prop_md) << ") with expected range sum " << format_double(row.range_sum.value)
               << " but survival " << format_double(row.survival.point) << " > eps " << format_double(eps)
               << " at horizon " << base.horizon << "; ";
            rep.violations += os.str();
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

CouplingReport coupling_check(const FrogConfig& config, std::uint64_t trials, std::uint64_t budget,
                              unsigned workers)
{
    config.validate();
    enum Result : char { Match, Mismatch, Bound };
    std::vector<char> result(trials, Bound);
    parallel_for(trials, workers, [&](std::uint64_t t) {
        const auto trace = run_with_trace(config, t);
        if (trace.outcome.status != SimStatus::DiedOut)
            return;
        const auto cluster = grow_cluster(config, t, budget);
        if (cluster.budget_hit)
            return;
        result[t] = trace.visited == cluster.activated ? Match : Mismatch;
    });
    CouplingReport rep;
    rep.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        switch (result[t]) {
        case Match:
            ++rep.matches;
            break;
        case Mismatch:
            ++rep.mismatches;
            if (rep.first_mismatch < 0)
                rep.first_mismatch = static_cast<std::int64_t>(t);
            break;
        default:
            ++rep.cap_bound;
        }
    }
    return rep;
}

DominationReport gw_domination_check(const FrogConfig& config, std::uint64_t trials, unsigned workers,
                                     std::uint64_t population_cap)
{
    require(config.geometric(), "domination check needs geometric death");
    const auto& g = std::get<GeometricDeath>(config.mode);
    DominationReport rep;
    rep.frog = estimate_survival(config, trials, workers);

    auto simulate = [&](const OffspringLaw& law, std::uint64_t stream) {
        std::vector<char> alive(trials, 0);
        const std::uint64_t seed = combine(gw_seed(config.master_seed), stream);
        parallel_for(trials, workers, [&](std::uint64_t t) {
            SplitMix64 rng(combine(seed, t));
            alive[t] = gw_simulate(law, config.horizon, rng, population_cap).alive_at(config.horizon);
        });
        return make_proportion(static_cast<std::uint64_t>(std::count(alive.begin(), alive.end(), 1)), trials);
    };
    rep.gw_g = simulate(prop_g_law(g.eta, g.p), 1);
    rep.gw_md = simulate(prop_md_law(g.eta, g.p, config.topology.degree()), 2);

    const double n = static_cast<double>(trials);
    const double vf = rep.frog.point * (1.0 - rep.frog.point) / n;
    auto joint = [&](const Proportion& pr) { return std::sqrt(vf + pr.estimate * (1.0 - pr.estimate) / n); };
    rep.sigma_g = joint(rep.gw_g);
    rep.sigma_md = joint(rep.gw_md);
    rep.holds_g = rep.frog.point <= rep.gw_g.estimate + 3.0 * rep.sigma_g;
    rep.holds_md = rep.frog.point <= rep.gw_md.estimate + 3.0 * rep.sigma_md;
    return rep;
}

} // namespace frogsim

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frogsim/analytics.hpp"
#include "frogsim/branching.hpp"
#include "frogsim/engine.hpp"

namespace frogsim {

/// Runs trials 0..trials-1; slot t holds trial t whatever the worker count.
std::vector<SimOutcome> run_trials(const FrogConfig& config, std::uint64_t trials, unsigned workers = 1);

/// Alive after h steps. CapExceeded counts as alive.
bool alive_at(const SimOutcome& o, std::uint64_t h);

struct SurvivalEstimate {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t survived = 0;
    std::uint64_t horizon = 0;
    std::uint64_t cap_exceeded_count = 0;
};

SurvivalEstimate summarize_survival(const std::vector<SimOutcome>& outcomes, std::uint64_t horizon);
SurvivalEstimate estimate_survival(const FrogConfig& config, std::uint64_t trials, unsigned workers = 1);
/// One run to the largest horizon; survival read off at every listed horizon.
std::vector<SurvivalEstimate> estimate_survival_horizons(const FrogConfig& config,
                                                         const std::vector<std::uint64_t>& horizons,
                                                         std::uint64_t trials, unsigned workers = 1);

struct PcProbe {
    double p = 0.0;
    SurvivalEstimate survival;
};

/// Crossing of the survival-to-horizon frequency through eps. The proxy
/// over-reports survival at finite horizon, so bracket_low is the
/// conservative edge.
struct PcEstimate {
    double bracket_low = 0.0;
    double bracket_high = 1.0;
    double eps = 0.02;
    double tol_p = 0.01;
    std::uint64_t horizon = 0;
    std::uint64_t trials = 0;
    std::vector<PcProbe> profile; // sorted by p
    bool degenerate = false;
    std::string note;

    double midpoint() const { return 0.5 * (bracket_low + bracket_high); }
    bool profile_monotone() const;
};

/// Bisection over p with common random numbers: every probe reuses trials
/// 0..trials-1 of the same master seed.
PcEstimate estimate_pc(const FrogConfig& config, std::uint64_t trials, double eps, double tol_p,
                       unsigned workers = 1);

enum class RecurrenceVerdict { GrowingUnbounded, Saturating, Inconclusive };
const char* to_string(RecurrenceVerdict v);

struct RecurrencePoint {
    std::uint64_t horizon = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct RecurrenceReport {
    std::vector<RecurrencePoint> points;
    RecurrenceVerdict verdict = RecurrenceVerdict::Inconclusive;
    std::uint64_t trials = 0;
    std::uint64_t cap_exceeded_count = 0;
};

/// Growth threshold between consecutive horizons for the growing verdict.
inline constexpr double kRecurrenceGrowth = 0.20;

RecurrenceVerdict classify_recurrence(const std::vector<RecurrencePoint>& points);
RecurrenceReport recurrence_curve(const FrogConfig& config, const std::vector<std::uint64_t>& horizons,
                                  std::uint64_t trials, unsigned workers = 1);

struct SweepRow {
    int dim = 0;
    PcEstimate estimate;
    PcLowerBounds bounds;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double target = 0.0; // 1/(1+E eta), 0 when E eta is infinite
    bool midpoints_non_increasing = false;
    double final_gap = 0.0; // |last midpoint - target|
};

/// `family` is "tree" or "zd"; dims ascending.
SweepReport sweep_pc_vs_dimension(const FrogConfig& base, const std::string& family, const std::vector<int>& dims,
                                  std::uint64_t trials, double eps, double tol_p, unsigned workers = 1);

struct BoundsRow {
    double p = 0.0;
    PcLowerBounds bounds;
    bool below_prop_g = false;
    bool below_prop_md = false;
    RangeSum range_sum;
    SurvivalEstimate survival;
    bool consistent = true;
};

struct BoundsReport {
    std::vector<BoundsRow> rows;
    double eps = 0.02;
    bool consistent = true;
    std::string violations;
};

/// p grid as lo:hi:step, inclusive of hi up to rounding.
std::vector<double> parse_grid(const std::string& text);

BoundsReport bounds_report(const FrogConfig& base, const std::vector<double>& p_grid, std::uint64_t trials,
                           double eps, unsigned workers = 1);

struct CouplingReport {
    std::uint64_t trials = 0;
    std::uint64_t matches = 0;
    std::uint64_t mismatches = 0;
    std::uint64_t cap_bound = 0; // horizon or budget bound; excluded from matches
    std::int64_t first_mismatch = -1;

    bool passed() const { return matches == trials; }
};

/// Engine visited set against the percolation cluster, trial by trial.
CouplingReport coupling_check(const FrogConfig& config, std::uint64_t trials, std::uint64_t budget,
                              unsigned workers = 1);

struct DominationReport {
    SurvivalEstimate frog;
    Proportion gw_g;
    Proportion gw_md;
    double sigma_g = 0.0; // joint sigma of the two frequencies
    double sigma_md = 0.0;
    bool holds_g = false;
    bool holds_md = false;
};

/// Frog survival to the horizon against the prop_g and prop_md comparison trees
/// simulated to the same number of generations.
DominationReport gw_domination_check(const FrogConfig& config, std::uint64_t trials, unsigned workers = 1,
                                     std::uint64_t population_cap = 100'000);

} // namespace frogsim

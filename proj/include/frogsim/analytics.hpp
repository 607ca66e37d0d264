#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frogsim/distributions.hpp"
#include "frogsim/graphs.hpp"

namespace frogsim {

/// Probability that at least one of i independent particles survives k
/// consecutive steps: 1 - (1 - p^k)^i.
double phi(double i, std::uint64_t k, double p);
/// floor(log i / log(1/p)), exact at powers of 1/p.
std::uint64_t khat(double i, double p);

struct AnalizGrid {
    std::vector<double> p_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::uint64_t i_max = 1'000'000;
    std::uint64_t i_dense = 10'000; // every i up to here, log-spaced beyond
    std::uint64_t i_log_points = 2'000;
    std::uint64_t k_beyond = 60; // k scanned in [khat+1, khat+k_beyond]

    std::vector<std::uint64_t> i_values() const;
    std::string describe() const;
};

struct AnalizWitness {
    std::uint64_t i = 0;
    std::uint64_t k = 0;
    double p = 0.0;
};

struct AnalizConstants {
    double beta1_hat = 0.0; // min Phi over k <= khat
    double beta2_hat = 0.0; // min Phi / p^(k - khat) over k >= khat + 1
    double beta3_hat = 0.0; // max Phi / p^(k - khat - 1) over k >= khat + 1
    AnalizWitness beta1_at, beta2_at, beta3_at;
    std::uint64_t points = 0;
    std::string grid;
};

/// Scans the two-regime bound on Phi and reports the empirical constants.
/// Throws ErrorKind::Inconsistency with a witness if a bound breaks.
AnalizConstants scan_analiz(const AnalizGrid& grid = {});

/// Large-deviation rate a log(a/p) + (1-a) log((1-a)/(1-p)).
double ld_rate(double a, double p);
double ld_bound(double n, double a, double p);

struct Proportion {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double sigma = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

Proportion make_proportion(std::uint64_t successes, std::uint64_t trials);

/// Fraction of no-death SRW paths from the root that hit x within n steps.
Proportion srw_hit_prob_mc(const GraphTopology& g, const Site& x, std::uint64_t n, std::uint64_t trials,
                           std::uint64_t seed, unsigned workers = 1);

/// Exact SRW occupation probabilities on Z^d (d <= 3) by repeated one-step
/// convolution on a zero-padded box of the given radius.
class SrwDp {
public:
    SrwDp(int dim, int radius, std::uint64_t steps);

    int dim() const noexcept { return dim_; }
    int radius() const noexcept { return radius_; }
    std::uint64_t steps() const noexcept { return steps_; }
    /// Mass that left the box (always 0 when radius >= steps).
    double leakage() const noexcept { return leakage_; }

    /// p_k(x), the probability of being at x at time k.
    double occupation(std::uint64_t k, const std::vector<int>& x) const;
    /// G_n(x) = sum_{k<=n} p_k(x).
    double green(std::uint64_t n, const std::vector<int>& x) const;
    /// q(m, x) for m = 0..steps by the first-passage renewal p_j(x) = sum_k f_k(x) p_{j-k}(0).
    std::vector<double> hit_by_renewal(const std::vector<int>& x) const;
    /// Every site of the box, as coordinate vectors.
    std::vector<std::vector<int>> box_sites() const;

private:
    std::size_t index(const std::vector<int>& x) const;

    int dim_;
    int radius_;
    std::uint64_t steps_;
    std::size_t side_;
    std::size_t cells_;
    double leakage_ = 0.0;
    std::vector<double> occ_; // (steps+1) x cells
};

/// q(m, x) for m = 0..n by the absorbing recursion: walk on Z^d with x made a sink.
std::vector<double> srw_first_passage(int dim, const std::vector<int>& x, std::uint64_t n);

struct PofvisitPoint {
    double norm = 0.0;
    std::uint64_t n = 0;
    double q = 0.0;
    double q_low = 0.0; // CI lower end (equal to q for exact values)
    double scaled = 0.0;
    double scaled_low = 0.0;
    bool exact = false;
};

struct PofvisitReport {
    int dim = 0;
    std::vector<PofvisitPoint> points;
    double w_hat = 0.0;     // min scaled value
    double w_hat_low = 0.0; // min scaled CI lower end
    bool positive = false;
    bool stable = false;
    bool monotone_in_n = true;
};

/// Hitting probability at n = ceil(|x|^2) along x = r e_1, scaled by 1, log r,
/// r^(d-2). DP where dp_max_radius allows, Monte Carlo otherwise.
PofvisitReport pofvisit_check(int dim, const std::vector<int>& radii, std::uint64_t mc_trials, std::uint64_t seed,
                              int dp_max_radius, unsigned workers = 1);

struct RangeSum {
    double value = 0.0;
    double truncation_error = 0.0;
    bool infinite = false;
    bool subcritical = false;
};

/// sum_i gamma_i sum_k s_k(G) Phi(i,k,p), the bound on E|R_x \ {x}|.
RangeSum expected_range_sum(const ParticleCountLaw& eta, double p, const GraphTopology& g, double tol = 1e-9);

struct RangeSizeEstimate {
    std::uint64_t steps = 0;
    std::uint64_t trials = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean number of distinct sites among S_0..S_k of a no-death SRW.
RangeSizeEstimate srw_range_mc(const GraphTopology& g, std::uint64_t k, std::uint64_t trials, std::uint64_t seed,
                               unsigned workers = 1);

} // namespace frogsim

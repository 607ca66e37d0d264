#include "frogsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "frogsim/errors.hpp"
#include "frogsim/parallel.hpp"
#include "frogsim/rng.hpp"

namespace frogsim {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::string witness_text(const AnalizWitness& w)
{
    std::ostringstream os;
    os << "(i=" << w.i << ", k=" << w.k << ", p=" << format_double(w.p) << ")";
    return os.str();
}

// |sphere of radius k| as a double, valid past the 64-bit range.
double sphere_size_real(const GraphTopology& g, std::uint64_t k)
{
    if (k == 0)
        return 1.0;
    const double kk = static_cast<double>(k);
    if (g.is_tree()) {
        const double d = g.dim();
        return d * std::pow(d - 1.0, kk - 1.0);
    }
    const int d = g.dim();
    double total = 0.0;
    double binom_d = 1.0;    // C(d, i)
    double binom_k = 1.0;    // C(k-1, i-1)
    for (int i = 1; i <= d && static_cast<std::uint64_t>(i) <= k; ++i) {
        binom_d = binom_d * (d - i + 1) / i;
        if (i > 1)
            binom_k = binom_k * (kk - i + 1) / (i - 1);
        total += std::ldexp(binom_d * binom_k, i);
    }
    return total;
}

struct InnerSum {
    double value = 0.0;
    double error = 0.0;
    bool infinite = false;
};

// sum_k s_k Phi(i,k,p); geometric envelope once past khat, Raabe test for divergence.
InnerSum inner_range_sum(double i, double p, const GraphTopology& g, double tol)
{
    InnerSum out;
    if (p <= 0.0)
        return out;
    if (p >= 1.0) {
        out.infinite = true;
        return out;
    }
    const std::uint64_t kh = khat(i, p);
    double prev = 0.0;
    int bad = 0;
    for (std::uint64_t k = 1; k < 10'000'000; ++k) {
        const double b = sphere_size_real(g, k) * phi(i, k, p);
        if (!std::isfinite(b) || out.value + b > 1e300) {
            out.infinite = true;
            return out;
        }
        out.value += b;
        if (k > kh + 1 && prev > 0.0) {
            if (b <= 0.0)
                return out;
            const double ratio = b / prev;
            const double raabe = static_cast<double>(k) * (prev / b - 1.0);
            bad = raabe <= 1.0 ? bad + 1 : 0;
            if (bad >= 50) {
                out.infinite = true;
                return out;
            }
            if (ratio < 1.0) {
                const double tail = b * ratio / (1.0 - ratio);
                if (tail < tol * 1e-3) {
                    out.error = tail;
                    return out;
                }
            }
        }
        prev = b;
    }
    out.infinite = true;
    return out;
}

} // namespace

double phi(double i, std::uint64_t k, double p)
{
    if (p >= 1.0)
        return 1.0;
    if (p <= 0.0)
        return 0.0;
    const double pk = std::pow(p, static_cast<double>(k));
    return -std::expm1(i * std::log1p(-pk));
}

std::uint64_t khat(double i, double p)
{
    require(p > 0.0 && p < 1.0, "khat needs 0 < p < 1");
    require(i >= 1.0, "khat needs i >= 1");
    const double lip = std::log(1.0 / p);
    auto k = static_cast<std::uint64_t>(std::max(0.0, std::floor(std::log(i) / lip)));
    // largest k with p^k * i >= 1, allowing for rounding at exact powers
    const auto ok = [&](std::uint64_t kk) {
        return std::pow(p, static_cast<double>(kk)) * i >= 1.0 - 1e-12;
    };
    while (k > 0 && !ok(k))
        --k;
    while (ok(k + 1))
        ++k;
    return k;
}

std::vector<std::uint64_t> AnalizGrid::i_values() const
{
    std::vector<std::uint64_t> out;
    const std::uint64_t dense = std::min(i_dense, i_max);
    for (std::uint64_t i = 1; i <= dense; ++i)
        out.push_back(i);
    if (i_max > dense && i_log_points > 0) {
        const double lo = std::log(static_cast<double>(dense));
        const double hi = std::log(static_cast<double>(i_max));
        for (std::uint64_t j = 1; j <= i_log_points; ++j) {
            const auto v = static_cast<std::uint64_t>(
                std::llround(std::exp(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(i_log_points))));
            if (v > out.back())
                out.push_back(v);
        }
    }
    return out;
}

std::string AnalizGrid::describe() const
{
    std::ostringstream os;
    os << "i in [1," << i_dense << "] dense + " << i_log_points << " log-spaced up to " << i_max << "; p in {";
    for (std::size_t j = 0; j < p_values.size(); ++j)
        os << (j ? "," : "") << format_double(p_values[j]);
    os << "}; k in [1,khat] and [khat+1,khat+" << k_beyond << "]";
    return os.str();
}

AnalizConstants scan_analiz(const AnalizGrid& grid)
{
    AnalizConstants c;
    c.grid = grid.describe();
    c.beta1_hat = INFINITY;
    c.beta2_hat = INFINITY;
    c.beta3_hat = 0.0;
    const auto is = grid.i_values();
    for (double p : grid.p_values) {
        require(p > 0.0 && p < 1.0, "scan p values must lie in (0,1)");
        for (std::uint64_t i : is) {
            const double id = static_cast<double>(i);
            const std::uint64_t kh = khat(id, p);
            for (std::uint64_t k = 1; k <= kh + grid.k_beyond; ++k) {
                const double f = phi(id, k, p);
                const AnalizWitness w{i, k, p};
                if (!(f >= 0.0 && f <= 1.0))
                    fail(ErrorKind::Inconsistency, "Phi outside [0,1] at " + witness_text(w));
                ++c.points;
                if (k <= kh) {
                    if (f < c.beta1_hat) {
                        c.beta1_hat = f;
                        c.beta1_at = w;
                    }
                    continue;
                }
                const double r2 = f / std::pow(p, static_cast<double>(k - kh));
                const double r3 = f / std::pow(p, static_cast<double>(k - kh - 1));
                if (r2 < c.beta2_hat) {
                    c.beta2_hat = r2;
                    c.beta2_at = w;
                }
                if (r3 > c.beta3_hat) {
                    c.beta3_hat = r3;
                    c.beta3_at = w;
                }
            }
        }
    }
    if (!(c.beta1_hat > 0.0))
        fail(ErrorKind::Inconsistency, "no positive lower constant for k <= khat; minimum at " + witness_text(c.beta1_at));
    if (!(c.beta2_hat > 0.0))
        fail(ErrorKind::Inconsistency, "no positive lower constant for k > khat; minimum at " + witness_text(c.beta2_at));
    if (!std::isfinite(c.beta3_hat))
        fail(ErrorKind::Inconsistency, "upper constant is not finite; maximum at " + witness_text(c.beta3_at));
    return c;
}

double ld_rate(double a, double p)
{
    require(a > 0.0 && a < 1.0 && p > 0.0 && p < 1.0, "ld_rate needs a, p in (0,1)");
    if (a == p)
        return 0.0;
    return a * std::log(a / p) + (1.0 - a) * std::log((1.0 - a) / (1.0 - p));
}

double ld_bound(double n, double a, double p)
{
    return std::exp(-n * ld_rate(a, p));
}

Proportion make_proportion(std::uint64_t successes, std::uint64_t trials)
{
    require(trials >= 1, "trials must be >= 1");
    Proportion pr;
    pr.successes = successes;
    pr.trials = trials;
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / n;
    pr.estimate = ph;
    pr.sigma = std::sqrt(ph * (1.0 - ph) / n);
    // Wilson score interval
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double centre = (ph + z2 / (2.0 * n)) / denom;
    const double half = kZ95 * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    pr.ci_low = std::max(0.0, std::min(ph, centre - half));
    pr.ci_high = std::min(1.0, std::max(ph, centre + half));
    return pr;
}

Proportion srw_hit_prob_mc(const GraphTopology& g, const Site& x, std::uint64_t n, std::uint64_t trials,
                           std::uint64_t seed, unsigned workers)
{
    require(n >= 1, "n must be >= 1");
    g.validate(x);
    const Site root = g.root();
    const std::uint64_t dist = g.distance(root, x);
    if (dist > n || dist == 0)
        return make_proportion(dist == 0 ? trials : 0, trials);
    std::vector<char> hit(trials, 0);
    parallel_for(trials, workers, [&](std::uint64_t t) {
        SplitMix64 rng(combine(mix64(seed), t));
        Site pos = root;
        for (std::uint64_t s = 0; s < n; ++s) {
            g.step(pos, rng.below(g.degree()));
            if (pos.key() == x.key() && pos == x) {
                hit[t] = 1;
                return;
            }
        }
    });
    return make_proportion(static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1)), trials);
}

// ---------------------------------------------------------------- SRW dynamic programming

SrwDp::SrwDp(int dim, int radius, std::uint64_t steps) : dim_(dim), radius_(radius), steps_(steps)
{
    require(dim >= 1 && dim <= 3, "SRW DP supports d <= 3");
    require(radius >= 1, "box radius must be >= 1");
    if (static_cast<std::uint64_t>(radius) < steps)
        fail(ErrorKind::InvalidArgument, "box radius " + std::to_string(radius) + " is too small for " +
                                              std::to_string(steps) + " steps (mass would leak)");
    side_ = static_cast<std::size_t>(2 * radius + 1);
    cells_ = 1;
    for (int i = 0; i < dim; ++i)
        cells_ *= side_;
    require(cells_ * (steps + 1) <= 400'000'000ull, "SRW DP box too large for dense iteration");
    occ_.assign(cells_ * (steps + 1), 0.0);
    occ_[index(std::vector<int>(static_cast<std::size_t>(dim), 0))] = 1.0;

    std::vector<std::size_t> stride(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a)
        stride[static_cast<std::size_t>(a)] = a == 0 ? 1 : stride[static_cast<std::size_t>(a - 1)] * side_;
    const double w = 1.0 / (2.0 * dim);
    for (std::uint64_t k = 1; k <= steps; ++k) {
        const double* prev = &occ_[(k - 1) * cells_];
        double* cur = &occ_[k * cells_];
        for (std::size_t c = 0; c < cells_; ++c) {
            const double m = prev[c];
            if (m == 0.0)
                continue;
            for (int a = 0; a < dim; ++a) {
                const std::size_t s = stride[static_cast<std::size_t>(a)];
                const std::size_t coord = (c / s) % side_;
                if (coord + 1 < side_)
                    cur[c + s] += m * w;
                else
                    leakage_ += m * w;
                if (coord > 0)
                    cur[c - s] += m * w;
                else
                    leakage_ += m * w;
            }
        }
    }
}

std::size_t SrwDp::index(const std::vector<int>& x) const
{
    require(x.size() == static_cast<std::size_t>(dim_), "site has wrong dimension");
    std::size_t idx = 0, mul = 1;
    for (int a = 0; a < dim_; ++a) {
        const int c = x[static_cast<std::size_t>(a)];
        require(c >= -radius_ && c <= radius_, "site outside the DP box");
        idx += static_cast<std::size_t>(c + radius_) * mul;
        mul *= side_;
    }
    return idx;
}

double SrwDp::occupation(std::uint64_t k, const std::vector<int>& x) const
{
    require(k <= steps_, "time beyond the DP horizon");
    return occ_[k * cells_ + index(x)];
}

double SrwDp::green(std::uint64_t n, const std::vector<int>& x) const
{
    require(n <= steps_, "time beyond the DP horizon");
    const std::size_t idx = index(x);
    double g = 0.0;
    for (std::uint64_t k = 0; k <= n; ++k)
        g += occ_[k * cells_ + idx];
    return g;
}

std::vector<double> SrwDp::hit_by_renewal(const std::vector<int>& x) const
{
    const std::size_t idx = index(x);
    const std::size_t origin = index(std::vector<int>(static_cast<std::size_t>(dim_), 0));
    std::vector<double> f(steps_ + 1, 0.0), q(steps_ + 1, 0.0);
    for (std::uint64_t j = 0; j <= steps_; ++j) {
        double v = occ_[j * cells_ + idx];
        for (std::uint64_t k = 0; k < j; ++k)
            if (f[k] != 0.0)
                v -= f[k] * occ_[(j - k) * cells_ + origin];
        f[j] = std::max(0.0, v);
        q[j] = (j ? q[j - 1] : 0.0) + f[j];
    }
    return q;
}

std::vector<std::vector<int>> SrwDp::box_sites() const
{
    std::vector<std::vector<int>> out;
    out.reserve(cells_);
    for (std::size_t c = 0; c < cells_; ++c) {
        std::vector<int> x(static_cast<std::size_t>(dim_));
        std::size_t rest = c;
        for (int a = 0; a < dim_; ++a) {
            x[static_cast<std::size_t>(a)] = static_cast<int>(rest % side_) - radius_;
            rest /= side_;
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<double> srw_first_passage(int dim, const std::vector<int>& x, std::uint64_t n)
{
    require(dim >= 1 && dim <= 3, "first-passage DP supports d <= 3");
    require(x.size() == static_cast<std::size_t>(dim), "site has wrong dimension");
    int radius = static_cast<int>(n) + 1;
    for (int c : x)
        radius = std::max(radius, std::abs(c) + 1);
    const std::size_t side = static_cast<std::size_t>(2 * radius + 1);
    std::size_t cells = 1;
    for (int i = 0; i < dim; ++i)
        cells *= side;
    require(cells <= 200'000'000ull, "first-passage DP box too large");
    std::vector<std::size_t> stride(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a)
        stride[static_cast<std::size_t>(a)] = a == 0 ? 1 : stride[static_cast<std::size_t>(a - 1)] * side;
    auto index = [&](const std::vector<int>& v) {
        std::size_t idx = 0;
        for (int a = 0; a < dim; ++a)
            idx += static_cast<std::size_t>(v[static_cast<std::size_t>(a)] + radius) * stride[static_cast<std::size_t>(a)];
        return idx;
    };
    const std::size_t target = index(x);
    std::vector<double> cur(cells, 0.0), next(cells, 0.0), q(n + 1, 0.0);
    const std::size_t origin = index(std::vector<int>(static_cast<std::size_t>(dim), 0));
    if (origin == target) {
        std::fill(q.begin(), q.end(), 1.0);
        return q;
    }
    cur[origin] = 1.0;
    const double w = 1.0 / (2.0 * dim);
    double absorbed = 0.0;
    for (std::uint64_t k = 1; k <= n; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t c = 0; c < cells; ++c) {
            const double m = cur[c];
            if (m == 0.0)
                continue;
            for (int a = 0; a < dim; ++a) {
                const std::size_t s = stride[static_cast<std::size_t>(a)];
                const std::size_t coord = (c / s) % side;
                if (coord + 1 < side)
                    next[c + s] += m * w;
                if (coord > 0)
                    next[c - s] += m * w;
            }
        }
        absorbed += next[target];
        next[target] = 0.0;
        q[k] = absorbed;
        std::swap(cur, next);
    }
    return q;
}

PofvisitReport pofvisit_check(int dim, const std::vector<int>& radii, std::uint64_t mc_trials, std::uint64_t seed,
                              int dp_max_radius, unsigned workers)
{
    require(dim >= 1 && dim <= 3, "pofvisit check supports d in {1,2,3}");
    require(!radii.empty(), "radius list is empty");
    PofvisitReport rep;
    rep.dim = dim;
    const GraphTopology g = dim == 1 ? GraphTopology::line() : GraphTopology::lattice(dim);
    for (int r : radii) {
        require(r >= 2, "radii must be >= 2 (log|x| must be positive)");
        PofvisitPoint pt;
        pt.norm = r;
        pt.n = static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(r);
        std::vector<int> x(static_cast<std::size_t>(dim), 0);
        x[0] = r;
        if (r <= dp_max_radius) {
            const auto q = srw_first_passage(dim, x, pt.n + 1);
            pt.q = q[pt.n];
            pt.q_low = pt.q;
            pt.exact = true;
            for (std::size_t m = 1; m < q.size(); ++m)
                if (q[m] + 1e-15 < q[m - 1])
                    rep.monotone_in_n = false;
        } else {
            std::vector<std::int32_t> enc(x.begin(), x.end());
            const auto est = srw_hit_prob_mc(g, g.make_site(enc), pt.n, mc_trials,
                                             combine(seed, static_cast<std::uint64_t>(r)), workers);
            pt.q = est.estimate;
            pt.q_low = est.ci_low;
        }
        const double scale = dim == 1 ? 1.0 : dim == 2 ? std::log(static_cast<double>(r))
                                                       : std::pow(static_cast<double>(r), dim - 2);
        pt.scaled = pt.q * scale;
        pt.scaled_low = pt.q_low * scale;
        rep.points.push_back(pt);
    }
    rep.w_hat = INFINITY;
    rep.w_hat_low = INFINITY;
    for (const auto& pt : rep.points) {
        rep.w_hat = std::min(rep.w_hat, pt.scaled);
        rep.w_hat_low = std::min(rep.w_hat_low, pt.scaled_low);
    }
    rep.positive = rep.w_hat_low > 0.0;
    // stable: the scaled minimum over the far half keeps at least half the near-half minimum
    const std::size_t half = rep.points.size() / 2;
    double near_min = INFINITY, far_min = INFINITY;
    for (std::size_t j = 0; j < rep.points.size(); ++j)
        (j < half || rep.points.size() == 1 ? near_min : far_min) =
            std::min(j < half || rep.points.size() == 1 ? near_min : far_min, rep.points[j].scaled);
    rep.stable = rep.positive && (rep.points.size() < 2 || far_min >= 0.5 * near_min);
    return rep;
}

// ---------------------------------------------------------------- expected range

RangeSum expected_range_sum(const ParticleCountLaw& eta, double p, const GraphTopology& g, double tol)
{
    require(p >= 0.0 && p <= 1.0, "p must lie in [0,1]");
    RangeSum out;
    const auto top = eta.support_max();
    auto add_i = [&](double weight, double i) -> bool {
        if (weight <= 0.0)
            return true;
        const auto in = inner_range_sum(i, p, g, tol);
        if (in.infinite) {
            out.infinite = true;
            return false;
        }
        out.value += weight * in.value;
        out.truncation_error += weight * in.error;
        return true;
    };

    constexpr std::uint64_t kExactLimit = 1 << 20;
    if (top != kUnbounded && top <= kExactLimit) {
        for (std::uint64_t i = 1; i <= top; ++i)
            if (!add_i(eta.pmf(i), static_cast<double>(i)))
                return out;
        out.subcritical = out.value < 1.0;
        return out;
    }

    // exact head, then dyadic blocks [2^m, 2^{m+1}) bracketed by g at both ends
    constexpr int kHeadBits = 10;
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << kHeadBits); ++i)
        if (!add_i(eta.pmf(i), static_cast<double>(i)))
            return out;
    double prev_hi = 0.0;
    int bad = 0;
    for (int m = kHeadBits; m < 1000; ++m) {
        const double lo_i = std::ldexp(1.0, m), hi_i = std::ldexp(1.0, m + 1);
        const double mass = eta.tail_at(lo_i) - eta.tail_at(hi_i);
        if (mass <= 0.0) {
            if (eta.tail_at(hi_i) <= 0.0)
                break;
            continue;
        }
        const auto g_lo = inner_range_sum(lo_i, p, g, tol);
        const auto g_hi = inner_range_sum(hi_i, p, g, tol);
        if (g_lo.infinite || g_hi.infinite) {
            out.infinite = true;
            return out;
        }
        const double b_lo = mass * g_lo.value, b_hi = mass * g_hi.value;
        out.value += 0.5 * (b_lo + b_hi);
        out.truncation_error += 0.5 * (b_hi - b_lo) + mass * g_hi.error;
        if (!std::isfinite(out.value) || out.value > 1e300) {
            out.infinite = true;
            return out;
        }
        if (prev_hi > 0.0) {
            const double raabe = static_cast<double>(m) * (prev_hi / b_hi - 1.0);
            bad = raabe <= 1.0 ? bad + 1 : 0;
            if (bad >= 50) {
                out.infinite = true;
                return out;
            }
            if (raabe > 1.0) {
                const double ratio = b_hi / prev_hi;
                const double tail = ratio < 1.0 ? std::min(b_hi * ratio / (1.0 - ratio), b_hi * m / (raabe - 1.0))
                                                : b_hi * m / (raabe - 1.0);
                if (tail < tol) {
                    out.truncation_error += tail;
                    out.subcritical = out.value < 1.0;
                    return out;
                }
            }
        }
        prev_hi = b_hi;
    }
    // ran out of blocks: report what remains as error
    out.truncation_error += prev_hi * 1000.0;
    out.subcritical = out.value + out.truncation_error < 1.0;
    return out;
}

RangeSizeEstimate srw_range_mc(const GraphTopology& g, std::uint64_t k, std::uint64_t trials, std::uint64_t seed,
                               unsigned workers)
{
    require(k >= 1, "k must be >= 1");
    require(trials >= 1, "trials must be >= 1");
    std::vector<double> sizes(trials, 0.0);
    parallel_for(trials, workers, [&](std::uint64_t t) {
        SplitMix64 rng(combine(mix64(seed), t));
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(k + 1, 1 << 22)));
        Site pos = g.root();
        seen.insert(pos.key());
        for (std::uint64_t s = 0; s < k; ++s) {
            g.step(pos, rng.below(g.degree()));
            seen.insert(pos.key());
        }
        sizes[t] = static_cast<double>(seen.size());
    });
    RangeSizeEstimate est;
    est.steps = k;
    est.trials = trials;
    const double n = static_cast<double>(trials);
    est.mean = std::accumulate(sizes.begin(), sizes.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sizes)
        ss += (v - est.mean) * (v - est.mean);
    est.std_error = trials > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return est;
}

} // namespace frogsim

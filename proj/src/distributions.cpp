#include "frogsim/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "frogsim/errors.hpp"

namespace frogsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kTwoTo64 = 18446744073709551616.0;

std::uint64_t saturate(double x)
{
    if (!(x < kTwoTo64))
        return kUnbounded;
    return x <= 0 ? 0 : static_cast<std::uint64_t>(x);
}

// max{n : n < y}, i.e. ceil(y) - 1, saturating.
std::uint64_t largest_below(double y)
{
    if (!(y < kTwoTo64))
        return kUnbounded;
    return saturate(std::ceil(y) - 1.0);
}

std::uint64_t ceil_sqrt(std::uint64_t m)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m)));
    while (r > 0 && r * r >= m && (r - 1) * (r - 1) >= m)
        --r;
    while (r * r < m)
        ++r;
    return r;
}

double square_tail_shape(SquareTailShape shape, double n)
{
    const double ln = std::log(n);
    switch (shape) {
    case SquareTailShape::LogLog:
        return std::log(ln) / n;
    case SquareTailShape::LogSq:
        return ln * ln / (n * n);
    case SquareTailShape::Log:
        return ln / (n * n);
    }
    return 0.0;
}

// Smallest cutoff from which the shape function is positive and non-increasing.
std::uint64_t min_cutoff(SquareTailShape shape)
{
    switch (shape) {
    case SquareTailShape::LogLog:
        return 6;
    case SquareTailShape::LogSq:
        return 3;
    case SquareTailShape::Log:
        return 2;
    }
    return 2;
}

const char* shape_name(SquareTailShape s)
{
    switch (s) {
    case SquareTailShape::LogLog:
        return "loglog";
    case SquareTailShape::LogSq:
        return "logsq";
    case SquareTailShape::Log:
        return "log";
    }
    return "?";
}

// tail(n^2) of a square-tail law as a function of n >= 1.
double square_tail_at(const LifetimeLaw::SquareTail& s, std::uint64_t n)
{
    if (n < s.cutoff)
        return 1.0;
    return std::min(1.0, s.beta * square_tail_shape(s.shape, static_cast<double>(n)));
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

// sum_{n >= N} n^{-beta}, beta > 1, Euler-Maclaurin to third order.
double power_tail_remainder(double beta, double N)
{
    return std::pow(N, 1.0 - beta) / (beta - 1.0) + 0.5 * std::pow(N, -beta)
        + beta / 12.0 * std::pow(N, -beta - 1.0)
        - beta * (beta + 1.0) * (beta + 2.0) / 720.0 * std::pow(N, -beta - 3.0);
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view s, std::string_view what)
{
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        fail(ErrorKind::Parse, "bad number '" + std::string(s) + "' in " + std::string(what));
    return v;
}

std::uint64_t parse_count(std::string_view s, std::string_view what)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorKind::Parse, "bad count '" + std::string(s) + "' in " + std::string(what));
    return v;
}

std::uint64_t geometric_lifetime(double p, double u)
{
    if (p <= 0.0)
        return 1;
    if (p >= 1.0)
        return kUnbounded;
    const double U = 1.0 - u;
    if (U >= 1.0)
        return 1;
    const double jumps = std::floor(std::log(U) / std::log(p));
    if (!(jumps < kTwoTo64 - 2.0))
        return kUnbounded;
    return 1 + static_cast<std::uint64_t>(jumps);
}

// ---------------------------------------------------------------- particle counts

ParticleCountLaw ParticleCountLaw::deterministic(std::uint64_t m)
{
    return ParticleCountLaw(Deterministic{m});
}

ParticleCountLaw ParticleCountLaw::bernoulli(double q)
{
    require(q >= 0.0 && q <= 1.0, "bern: q must lie in [0,1]");
    return ParticleCountLaw(Bernoulli{q});
}

ParticleCountLaw ParticleCountLaw::empirical(std::vector<double> pmf)
{
    require(!pmf.empty(), "pmf: empty probability vector");
    for (double g : pmf)
        require(g >= 0.0 && g <= 1.0, "pmf: entries must lie in [0,1]");
    const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    require(std::fabs(total - 1.0) <= 1e-12, "pmf: probabilities must sum to 1 (got " + format_double(total) + ")");
    while (pmf.size() > 1 && pmf.back() == 0.0)
        pmf.pop_back();
    std::vector<double> suffix(pmf.size() + 1, 0.0);
    for (std::size_t j = pmf.size(); j-- > 0;)
        suffix[j] = suffix[j + 1] + pmf[j];
    suffix[0] = 1.0;
    return ParticleCountLaw(Empirical{std::move(pmf), std::move(suffix)});
}

ParticleCountLaw ParticleCountLaw::power_tail(double beta, std::uint64_t cutoff)
{
    require(beta > 0.0, "powertail: beta must be positive");
    require(cutoff >= 1, "powertail: cutoff must be >= 1");
    return ParticleCountLaw(PowerTail{beta, cutoff});
}

ParticleCountLaw ParticleCountLaw::log_tail(double beta, std::uint64_t cutoff)
{
    require(beta > 0.0, "logtail: beta must be positive");
    require(cutoff >= 2, "logtail: cutoff must be >= 2");
    return ParticleCountLaw(LogTail{beta, cutoff});
}

ParticleCountLaw ParticleCountLaw::truncated(ParticleCountLaw inner, std::uint64_t s)
{
    require(s >= 1, "trunc: s must be >= 1");
    return ParticleCountLaw(Truncated{std::make_shared<const ParticleCountLaw>(std::move(inner)), s});
}

ParticleCountLaw ParticleCountLaw::parse(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        fail(ErrorKind::Parse, "bad count law '" + std::string(text) + "'");
    const auto head = text.substr(0, colon);
    const auto rest = text.substr(colon + 1);
    try {
        if (head == "det")
            return deterministic(parse_count(rest, "det"));
        if (head == "bern")
            return bernoulli(parse_double(rest, "bern"));
        if (head == "pmf") {
            std::vector<double> pmf;
            for (auto part : split(rest, ','))
                pmf.push_back(parse_double(part, "pmf"));
            return empirical(std::move(pmf));
        }
        if (head == "powertail" || head == "logtail") {
            auto parts = split(rest, ':');
            if (parts.size() != 2)
                fail(ErrorKind::Parse, std::string(head) + " expects <beta>:<n0>");
            const double beta = parse_double(parts[0], head);
            const auto n0 = parse_count(parts[1], head);
            return head == "powertail" ? power_tail(beta, n0) : log_tail(beta, n0);
        }
        if (head == "trunc") {
            const auto last = rest.rfind(':');
            if (last == std::string_view::npos)
                fail(ErrorKind::Parse, "trunc expects <inner>:<s>");
            return truncated(parse(rest.substr(0, last)), parse_count(rest.substr(last + 1), "trunc"));
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse)
            throw;
        fail(ErrorKind::Parse, e.what());
    }
    fail(ErrorKind::Parse, "unknown count law '" + std::string(text) + "'");
}

std::string ParticleCountLaw::to_string() const
{
    return std::visit(overloaded{
                          [](const Deterministic& d) { return "det:" + std::to_string(d.m); },
                          [](const Bernoulli& b) { return "bern:" + format_double(b.q); },
                          [](const Empirical& e) {
                              std::string s = "pmf:";
                              for (std::size_t j = 0; j < e.pmf.size(); ++j)
                                  s += (j ? "," : "") + format_double(e.pmf[j]);
                              return s;
                          },
                          [](const PowerTail& t) {
                              return "powertail:" + format_double(t.beta) + ":" + std::to_string(t.cutoff);
                          },
                          [](const LogTail& t) {
                              return "logtail:" + format_double(t.beta) + ":" + std::to_string(t.cutoff);
                          },
                          [](const Truncated& t) { return "trunc:" + t.inner->to_string() + ":" + std::to_string(t.s); },
                      },
                      v_);
}

double ParticleCountLaw::tail(std::uint64_t n) const
{
    if (n == 0)
        return 1.0;
    return std::visit(overloaded{
                          [n](const Deterministic& d) { return n <= d.m ? 1.0 : 0.0; },
                          [n](const Bernoulli& b) { return n == 1 ? b.q : 0.0; },
                          [n](const Empirical& e) { return n < e.suffix.size() ? e.suffix[n] : 0.0; },
                          [n](const PowerTail& t) {
                              return n < t.cutoff ? 1.0 : std::pow(static_cast<double>(n), -t.beta);
                          },
                          [n](const LogTail& t) {
                              if (n < t.cutoff)
                                  return 1.0;
                              return std::min(1.0, std::pow(std::log(static_cast<double>(n)), -t.beta));
                          },
                          [n](const Truncated& t) {
                              if (n > t.s)
                                  return 0.0;
                              return t.inner->tail(n) - t.inner->tail(t.s + 1);
                          },
                      },
                      v_);
}

double ParticleCountLaw::tail_at(double n) const
{
    if (n < 9.0e18)
        return tail(static_cast<std::uint64_t>(std::ceil(std::max(n, 0.0))));
    if (const auto* t = std::get_if<PowerTail>(&v_))
        return std::pow(n, -t->beta);
    if (const auto* t = std::get_if<LogTail>(&v_))
        return std::min(1.0, std::pow(std::log(n), -t->beta));
    return 0.0;
}

std::uint64_t ParticleCountLaw::sample(double u) const
{
    return std::visit(overloaded{
                          [](const Deterministic& d) { return d.m; },
                          [u](const Bernoulli& b) { return u < b.q ? std::uint64_t{1} : std::uint64_t{0}; },
                          [u](const Empirical& e) {
                              // suffix is non-increasing; find the last n with suffix[n] > u
                              std::uint64_t n = 0;
                              while (n + 1 < e.suffix.size() && e.suffix[n + 1] > u)
                                  ++n;
                              return n;
                          },
                          [u](const PowerTail& t) {
                              const double y = u > 0 ? std::pow(u, -1.0 / t.beta) : kTwoTo64;
                              return std::max(t.cutoff - 1, largest_below(y));
                          },
                          [u](const LogTail& t) {
                              double y = kTwoTo64;
                              if (u > 0) {
                                  const double lg = std::pow(u, -1.0 / t.beta);
                                  y = lg < 44.0 ? std::exp(lg) : kTwoTo64;
                              }
                              return std::max(t.cutoff - 1, largest_below(y));
                          },
                          [u](const Truncated& t) {
                              const auto v = t.inner->sample(u);
                              return v <= t.s ? v : std::uint64_t{0};
                          },
                      },
                      v_);
}

ExtendedReal ParticleCountLaw::mean() const
{
    return std::visit(overloaded{
                          [](const Deterministic& d) { return ExtendedReal::finite(static_cast<double>(d.m)); },
                          [](const Bernoulli& b) { return ExtendedReal::finite(b.q); },
                          [](const Empirical& e) {
                              double m = 0;
                              for (std::size_t j = 0; j < e.pmf.size(); ++j)
                                  m += static_cast<double>(j) * e.pmf[j];
                              return ExtendedReal::finite(m);
                          },
                          [](const PowerTail& t) {
                              if (t.beta <= 1.0)
                                  return ExtendedReal::inf();
                              // E eta = sum_{n>=1} tail(n)
                              const std::uint64_t head_end = t.cutoff + 100000;
                              double s = static_cast<double>(t.cutoff - 1);
                              for (std::uint64_t n = t.cutoff; n < head_end; ++n)
                                  s += std::pow(static_cast<double>(n), -t.beta);
                              s += power_tail_remainder(t.beta, static_cast<double>(head_end));
                              return ExtendedReal::finite(s);
                          },
                          [](const LogTail&) { return ExtendedReal::inf(); },
                          [](const Truncated& t) {
                              const double top = t.inner->tail(t.s + 1);
                              double s = 0;
                              for (std::uint64_t n = 1; n <= t.s; ++n)
                                  s += t.inner->tail(n) - top;
                              return ExtendedReal::finite(s);
                          },
                      },
                      v_);
}

bool ParticleCountLaw::power_moment_finite(double delta) const
{
    require(delta > 0, "moment order must be positive");
    if (const auto* t = std::get_if<PowerTail>(&v_))
        return delta < t->beta;
    return !std::holds_alternative<LogTail>(v_);
}

bool ParticleCountLaw::log_power_moment_finite(double d) const
{
    require(d > 0, "moment order must be positive");
    if (const auto* t = std::get_if<LogTail>(&v_))
        return d < t->beta;
    return true;
}

MomentFlags ParticleCountLaw::moment_flags() const
{
    MomentFlags f;
    if (const auto* t = std::get_if<LogTail>(&v_)) {
        f.log_moment_finite = 1.0 < t->beta;
        f.some_power_moment_finite = false;
        f.all_log_powers_finite = false;
    }
    return f;
}

std::uint64_t ParticleCountLaw::support_max() const
{
    return std::visit(overloaded{
                          [](const Deterministic& d) { return d.m; },
                          [](const Bernoulli& b) { return b.q > 0 ? std::uint64_t{1} : std::uint64_t{0}; },
                          [](const Empirical& e) { return static_cast<std::uint64_t>(e.pmf.size() - 1); },
                          [](const PowerTail&) { return kUnbounded; },
                          [](const LogTail&) { return kUnbounded; },
                          [](const Truncated& t) { return std::min(t.s, t.inner->support_max()); },
                      },
                      v_);
}

// ---------------------------------------------------------------- lifetimes

LifetimeLaw LifetimeLaw::geometric(double p)
{
    require(p >= 0.0 && p <= 1.0, "geom: p must lie in [0,1]");
    return LifetimeLaw(Geometric{p});
}

LifetimeLaw LifetimeLaw::square_tail(SquareTailShape shape, double beta, std::uint64_t cutoff)
{
    require(beta > 0.0, "sqtail: beta must be positive");
    require(cutoff >= min_cutoff(shape),
            std::string("sqtail: cutoff for ") + shape_name(shape) + " must be >= " + std::to_string(min_cutoff(shape)));
    return LifetimeLaw(SquareTail{shape, beta, cutoff});
}

LifetimeLaw LifetimeLaw::deterministic(std::uint64_t k)
{
    require(k >= 1, "det lifetime must be >= 1");
    return LifetimeLaw(Deterministic{k});
}

LifetimeLaw LifetimeLaw::parse(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        fail(ErrorKind::Parse, "bad lifetime law '" + std::string(text) + "'");
    const auto head = text.substr(0, colon);
    const auto rest = text.substr(colon + 1);
    try {
        if (head == "geom")
            return geometric(parse_double(rest, "geom"));
        if (head == "det")
            return deterministic(parse_count(rest, "det"));
        if (head == "sqtail") {
            auto parts = split(rest, ':');
            if (parts.size() != 3)
                fail(ErrorKind::Parse, "sqtail expects <loglog|logsq|log>:<beta>:<n0>");
            SquareTailShape shape;
            if (parts[0] == "loglog")
                shape = SquareTailShape::LogLog;
            else if (parts[0] == "logsq")
                shape = SquareTailShape::LogSq;
            else if (parts[0] == "log")
                shape = SquareTailShape::Log;
            else
                fail(ErrorKind::Parse, "sqtail shape must be loglog, logsq or log");
            return square_tail(shape, parse_double(parts[1], "sqtail"), parse_count(parts[2], "sqtail"));
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse)
            throw;
        fail(ErrorKind::Parse, e.what());
    }
    fail(ErrorKind::Parse, "unknown lifetime law '" + std::string(text) + "'");
}

std::string LifetimeLaw::to_string() const
{
    return std::visit(overloaded{
                          [](const Geometric& g) { return "geom:" + format_double(g.p); },
                          [](const SquareTail& s) {
                              return std::string("sqtail:") + shape_name(s.shape) + ":" + format_double(s.beta) + ":"
                                  + std::to_string(s.cutoff);
                          },
                          [](const Deterministic& d) { return "det:" + std::to_string(d.k); },
                      },
                      v_);
}

double LifetimeLaw::tail(std::uint64_t n) const
{
    if (n <= 1)
        return 1.0;
    return std::visit(overloaded{
                          [n](const Geometric& g) { return std::pow(g.p, static_cast<double>(n - 1)); },
                          [n](const SquareTail& s) { return square_tail_at(s, ceil_sqrt(n)); },
                          [n](const Deterministic& d) { return n <= d.k ? 1.0 : 0.0; },
                      },
                      v_);
}

std::uint64_t LifetimeLaw::sample(double u) const
{
    return std::visit(overloaded{
                          [u](const Geometric& g) { return geometric_lifetime(g.p, u); },
                          [u](const SquareTail& s) {
                              // largest n with tail(n^2) > u; the sample is n^2
                              constexpr std::uint64_t kTop = (std::uint64_t{1} << 32) - 1;
                              if (square_tail_at(s, kTop) > u)
                                  return kUnbounded;
                              std::uint64_t lo = 1, hi = kTop; // tail(lo^2) > u >= tail(hi^2)
                              if (!(square_tail_at(s, lo) > u))
                                  return std::uint64_t{1};
                              while (hi - lo > 1) {
                                  const std::uint64_t mid = lo + (hi - lo) / 2;
                                  if (square_tail_at(s, mid) > u)
                                      lo = mid;
                                  else
                                      hi = mid;
                              }
                              return lo * lo;
                          },
                          [](const Deterministic& d) { return d.k; },
                      },
                      v_);
}

ExtendedReal LifetimeLaw::mean() const
{
    return std::visit(overloaded{
                          [](const Geometric& g) {
                              return g.p >= 1.0 ? ExtendedReal::inf() : ExtendedReal::finite(1.0 / (1.0 - g.p));
                          },
                          // sum_n (2n-1) tail(n^2) diverges for all three shapes
                          [](const SquareTail&) { return ExtendedReal::inf(); },
                          [](const Deterministic& d) { return ExtendedReal::finite(static_cast<double>(d.k)); },
                      },
                      v_);
}

} // namespace frogsim

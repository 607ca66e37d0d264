#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace frogsim {

/// Saturated value standing for "more than any experiment can use"; an
/// infinite lifetime (p = 1) or an astronomically large particle count.
inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

/// A mean that may be +infinity.
struct ExtendedReal {
    double value = 0.0;
    bool infinite = false;

    static ExtendedReal finite(double v) { return {v, false}; }
    static ExtendedReal inf() { return {std::numeric_limits<double>::infinity(), true}; }
};

struct MomentFlags {
    bool log_moment_finite = true;       // E log(eta v 1) < inf
    bool some_power_moment_finite = true; // exists delta > 0 with E eta^delta < inf
    bool all_log_powers_finite = true;   // E (log(eta v 1))^d < inf for every d
};

/// Law of the initial particle count eta.
class ParticleCountLaw {
public:
    struct Deterministic { std::uint64_t m; };
    struct Bernoulli { double q; };
    struct Empirical { std::vector<double> pmf; std::vector<double> suffix; };
    struct PowerTail { double beta; std::uint64_t cutoff; };
    struct LogTail { double beta; std::uint64_t cutoff; };
    struct Truncated { std::shared_ptr<const ParticleCountLaw> inner; std::uint64_t s; };
    using Variant = std::variant<Deterministic, Bernoulli, Empirical, PowerTail, LogTail, Truncated>;

    static ParticleCountLaw deterministic(std::uint64_t m);
    static ParticleCountLaw bernoulli(double q);
    static ParticleCountLaw empirical(std::vector<double> pmf);
    static ParticleCountLaw power_tail(double beta, std::uint64_t cutoff);
    static ParticleCountLaw log_tail(double beta, std::uint64_t cutoff);
    static ParticleCountLaw truncated(ParticleCountLaw inner, std::uint64_t s);

    /// `det:<m>`, `bern:<q>`, `pmf:<g0,g1,...>`, `powertail:<b>:<n0>`,
    /// `logtail:<b>:<n0>`, `trunc:<inner>:<s>`.
    static ParticleCountLaw parse(std::string_view text);
    std::string to_string() const;

    /// P[eta >= n], exact.
    double tail(std::uint64_t n) const;
    /// tail at a real argument n >= 1, valid beyond the 64-bit range.
    double tail_at(double n) const;
    double pmf(std::uint64_t n) const { return tail(n) - tail(n + 1); }
    /// Inverse-tail sampling: max{n : tail(n) > u}, u in [0,1).
    std::uint64_t sample(double u) const;
    ExtendedReal mean() const;
    MomentFlags moment_flags() const;
    bool power_moment_finite(double delta) const;
    bool log_power_moment_finite(double d) const;
    /// Largest value with positive mass, or kUnbounded.
    std::uint64_t support_max() const;
    double prob_positive() const { return tail(1); }

    const Variant& variant() const noexcept { return v_; }

private:
    explicit ParticleCountLaw(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

enum class SquareTailShape { LogLog, LogSq, Log };

/// Law of a particle lifetime Xi (number of positions occupied, >= 1).
class LifetimeLaw {
public:
    struct Geometric { double p; };
    struct SquareTail { SquareTailShape shape; double beta; std::uint64_t cutoff; };
    struct Deterministic { std::uint64_t k; };
    using Variant = std::variant<Geometric, SquareTail, Deterministic>;

    static LifetimeLaw geometric(double p);
    static LifetimeLaw square_tail(SquareTailShape shape, double beta, std::uint64_t cutoff);
    static LifetimeLaw deterministic(std::uint64_t k);

    /// `geom:<p>`, `sqtail:<loglog|logsq|log>:<b>:<n0>`, `det:<k>`.
    static LifetimeLaw parse(std::string_view text);
    std::string to_string() const;

    double tail(std::uint64_t n) const;
    double pmf(std::uint64_t n) const { return tail(n) - tail(n + 1); }
    /// Inverse-tail sampling from u in [0,1). Geometric uses the quantile form
    /// 1 + floor(log U / log p) with U = 1 - u, monotone in p for fixed u.
    std::uint64_t sample(double u) const;
    ExtendedReal mean() const;

    const Variant& variant() const noexcept { return v_; }

private:
    explicit LifetimeLaw(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Quantile-coupled geometric lifetime: P[result >= k+1] = p^k.
std::uint64_t geometric_lifetime(double p, double u);

/// Shortest round-trip text for a double.
std::string format_double(double v);
double parse_double(std::string_view s, std::string_view what);
std::uint64_t parse_count(std::string_view s, std::string_view what);

} // namespace frogsim

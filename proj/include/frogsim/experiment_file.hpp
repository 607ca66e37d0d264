#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "frogsim/engine.hpp"

namespace frogsim {

inline constexpr int kCsvFormatVersion = 1;

/// Plain-text experiment description: one `key = value` per line, `#` starts
/// a comment. Unknown keys are rejected on parse and on set.
class ExperimentFile {
public:
    static ExperimentFile parse(std::string_view text);
    /// Canonical text: sorted keys, one per line. parse(dump()) == *this.
    std::string dump() const;

    void set(const std::string& key, const std::string& value);
    void erase(const std::string& key) { fields_.erase(key); }
    bool has(const std::string& key) const { return fields_.count(key) != 0; }
    /// Value or the documented default; throws if neither exists.
    std::string get(const std::string& key) const;

    const std::map<std::string, std::string>& fields() const noexcept { return fields_; }
    friend bool operator==(const ExperimentFile&, const ExperimentFile&) = default;

    static const std::vector<std::string>& known_keys();
    static const std::vector<std::string>& known_kinds();
    /// Kinds that draw random numbers and so need an explicit seed.
    static bool needs_seed(const std::string& kind);

private:
    std::map<std::string, std::string> fields_;
};

/// The model configuration encoded by the file (graph, eta/p or lifetime, caps, seed).
FrogConfig build_config(const ExperimentFile& file);

std::uint64_t parse_seed(std::string_view text);
std::vector<std::uint64_t> parse_count_list(std::string_view text, std::string_view what);
/// `3..10` or `3,4,7`.
std::vector<int> parse_dims(std::string_view text);

struct ExperimentResult {
    std::string json;
    std::string csv;
    /// False when the experiment ran but its built-in consistency check failed.
    bool consistent = true;
    std::string message;
};

ExperimentResult run_experiment(const ExperimentFile& file);

} // namespace frogsim

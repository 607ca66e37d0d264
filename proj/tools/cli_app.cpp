#include "cli_app.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "frogsim/frogsim.h"

namespace frogsim::cli {

namespace {

struct ExperimentDeleter {
    void operator()(frogsim_experiment* e) const { frogsim_experiment_free(e); }
};
struct ResultDeleter {
    void operator()(frogsim_result* r) const { frogsim_result_free(r); }
};
using ExperimentPtr = std::unique_ptr<frogsim_experiment, ExperimentDeleter>;
using ResultPtr = std::unique_ptr<frogsim_result, ResultDeleter>;

struct Leaf {
    const char* name;
    const char* kind;
    const char* help;
    std::vector<const char*> keys;
};

const std::map<std::string, std::string>& key_help()
{
    static const std::map<std::string, std::string> h{
        {"graph", "line | zd:<d> | tree:<d>"},
        {"eta", "initial count law: det:<m> bern:<q> pmf:<g0,g1,...> powertail:<b>:<n0> logtail:<b>:<n0> "
                "trunc:<law>:<s>"},
        {"p", "survival parameter in [0,1]"},
        {"lifetime", "general lifetime law (one particle per site): geom:<p> sqtail:<shape>:<b>:<n0> det:<k>"},
        {"death", "presampled | coin | quantile"},
        {"horizon", "number of steps"},
        {"horizons", "comma-separated ascending horizons"},
        {"trials", "number of independent trials"},
        {"trial", "trial index"},
        {"eps", "survival threshold of the bisection"},
        {"tolp", "bracket width"},
        {"pgrid", "p grid lo:hi:step"},
        {"dims", "dimensions, 3..10 or 3,4,5"},
        {"family", "tree | zd"},
        {"budget", "cluster size budget"},
        {"site", "target site: coordinates or tree address, comma separated"},
        {"steps", "walk length"},
        {"radius", "DP box radius (defaults to steps)"},
        {"generations", "generations to simulate"},
        {"pmf", "explicit offspring pmf P0,P1,..."},
        {"which", "prop_g | prop_md | pt_q"},
        {"q", "Bernoulli parameter of pt_q"},
        {"k", "maximum degree for prop_md (defaults to the graph degree)"},
        {"tol", "fixed-point tolerance"},
        {"pop_cap", "population cap per tree"},
    };
    return h;
}

std::string dashed(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

std::string draw_seed()
{
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    return std::to_string(s);
}

bool read_file(const std::string& path, std::string& text)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    return true;
}

int fail_status(frogsim_status st, std::ostream& err)
{
    err << "error: " << frogsim_last_error() << "\n";
    return st == FROGSIM_ERR_PARSE || st == FROGSIM_ERR_INVALID_ARGUMENT ? kUsage : kFailure;
}

} // namespace

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Frog model with death: simulation, percolation, branching and random-walk oracles"};
    app.require_subcommand(1);
    app.fallthrough();

    std::map<std::string, std::string> values;
    std::vector<std::pair<CLI::Option*, std::string>> bound;

    std::string seed, config_path;
    bool dump_config = false;
    auto* seed_opt = app.add_option("--seed", seed, "master seed (integer or auto)");
    for (const char* key : {"workers", "out", "format", "max_active", "max_radius"}) {
        auto* o = app.add_option("--" + dashed(key), values[key]);
        bound.emplace_back(o, key);
    }
    app.add_option("--config", config_path, "experiment file to start from");
    app.add_flag("--dump-config", dump_config, "print the experiment file instead of running");

    const std::vector<Leaf> top{
        {"simulate", "simulate", "one trial, outcome as JSON", {"graph", "eta", "p", "lifetime", "death", "horizon", "trial"}},
        {"survival", "survival", "survival-to-horizon estimate",
         {"graph", "eta", "p", "lifetime", "death", "horizon", "horizons", "trials"}},
        {"pc", "pc", "bisection bracket for p_c", {"graph", "eta", "death", "horizon", "trials", "eps", "tolp"}},
        {"recurrence", "recurrence", "mean root visits over horizons",
         {"graph", "eta", "p", "lifetime", "death", "horizons", "trials"}},
        {"bounds", "bounds", "analytic bounds against simulation on a p grid",
         {"graph", "eta", "horizon", "trials", "eps", "pgrid"}},
        {"sweep-d", "sweep-d", "p_c brackets across dimensions",
         {"family", "eta", "horizon", "trials", "eps", "tolp", "dims"}},
        {"coupling-check", "coupling-check", "engine against percolation cluster",
         {"graph", "eta", "p", "lifetime", "death", "horizon", "trials", "budget"}},
        {"run", "", "run an experiment file given by --config", {}},
    };
    const std::vector<Leaf> srw{
        {"hit", "srw-hit", "Monte Carlo hitting probability (with exact DP on small lattices)",
         {"graph", "site", "steps", "trials"}},
        {"green", "srw-green", "exact occupation, Green's function and hitting probabilities",
         {"graph", "site", "steps", "radius"}},
        {"range", "srw-range", "mean range size", {"graph", "steps", "trials"}},
    };
    const std::vector<Leaf> gw{
        {"survival", "gw-survival", "survival probability by fixed-point iteration",
         {"eta", "p", "graph", "which", "k", "q", "pmf", "tol"}},
        {"simulate", "gw-simulate", "simulated extinction frequency",
         {"eta", "p", "graph", "which", "k", "q", "pmf", "tol", "generations", "trials", "pop_cap"}},
        {"laws", "gw-laws", "comparison offspring laws", {"eta", "p", "graph", "which", "k", "q", "pmf"}},
    };

    std::vector<std::pair<CLI::App*, std::string>> leaves;
    bool trace = false;
    CLI::Option* trace_opt = nullptr;
    auto add_leaf = [&](CLI::App* parent, const Leaf& leaf) {
        auto* sub = parent->add_subcommand(leaf.name, leaf.help);
        for (const char* key : leaf.keys) {
            const auto it = key_help().find(key);
            auto* o = sub->add_option("--" + dashed(key), values[key], it == key_help().end() ? "" : it->second);
            bound.emplace_back(o, key);
        }
        if (std::string(leaf.name) == "simulate" && parent == &app)
            trace_opt = sub->add_flag("--trace", trace, "record activation times and visited sites");
        leaves.emplace_back(sub, leaf.kind);
    };
    for (const auto& l : top)
        add_leaf(&app, l);
    auto* srw_app = app.add_subcommand("srw", "simple random walk analytics");
    srw_app->require_subcommand(1);
    for (const auto& l : srw)
        add_leaf(srw_app, l);
    auto* gw_app = app.add_subcommand("gw", "Galton-Watson oracles");
    gw_app->require_subcommand(1);
    for (const auto& l : gw)
        add_leaf(gw_app, l);

    std::vector<std::string> args(args_in.rbegin(), args_in.rend());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    std::string kind;
    for (const auto& [sub, k] : leaves)
        if (sub->parsed())
            kind = k;

    frogsim_experiment* raw = nullptr;
    if (!config_path.empty()) {
        std::string text;
        if (!read_file(config_path, text)) {
            err << "error: cannot read " << config_path << "\n";
            return kUsage;
        }
        if (const auto st = frogsim_experiment_parse(text.c_str(), &raw); st != FROGSIM_OK)
            return fail_status(st, err);
    } else if (const auto st = frogsim_experiment_new(&raw); st != FROGSIM_OK) {
        return fail_status(st, err);
    }
    ExperimentPtr exp(raw);

    if (kind.empty()) {
        if (!frogsim_experiment_has(exp.get(), "kind")) {
            err << "error: run needs --config with a kind field\n";
            return kUsage;
        }
    } else if (const auto st = frogsim_experiment_set(exp.get(), "kind", kind.c_str()); st != FROGSIM_OK) {
        return fail_status(st, err);
    }

    for (const auto& [opt, key] : bound) {
        if (opt->count() == 0)
            continue;
        if (const auto st = frogsim_experiment_set(exp.get(), key.c_str(), values[key].c_str()); st != FROGSIM_OK)
            return fail_status(st, err);
    }
    if (trace_opt && trace_opt->count() > 0)
        frogsim_experiment_set(exp.get(), "trace", trace ? "true" : "false");
    if (seed_opt->count() > 0) {
        if (seed == "auto") {
            seed = draw_seed();
            err << "seed = " << seed << "\n";
        }
        if (const auto st = frogsim_experiment_set(exp.get(), "seed", seed.c_str()); st != FROGSIM_OK)
            return fail_status(st, err);
    }

    if (dump_config) {
        char* text = nullptr;
        if (const auto st = frogsim_experiment_dump(exp.get(), &text); st != FROGSIM_OK)
            return fail_status(st, err);
        out << text;
        frogsim_string_free(text);
        return kOk;
    }

    std::string format = "json", out_path;
    char* v = nullptr;
    if (frogsim_experiment_get(exp.get(), "format", &v) == FROGSIM_OK) {
        format = v;
        frogsim_string_free(v);
    }
    if (format != "json" && format != "csv") {
        err << "error: --format must be csv or json\n";
        return kUsage;
    }
    if (frogsim_experiment_has(exp.get(), "out") && frogsim_experiment_get(exp.get(), "out", &v) == FROGSIM_OK) {
        out_path = v;
        frogsim_string_free(v);
    }

    frogsim_result* res_raw = nullptr;
    if (const auto st = frogsim_run(exp.get(), &res_raw); st != FROGSIM_OK)
        return fail_status(st, err);
    ResultPtr res(res_raw);

    const char* body = format == "csv" ? frogsim_result_csv(res.get()) : frogsim_result_json(res.get());
    if (out_path.empty()) {
        out << body;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!(f << body)) {
            err << "error: cannot write " << out_path << "\n";
            return kFailure;
        }
    }
    if (!frogsim_result_consistent(res.get())) {
        err << "inconsistency: " << frogsim_result_message(res.get()) << "\n";
        return kFailure;
    }
    return kOk;
}

} // namespace frogsim::cli

#include "frogsim/experiment_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "frogsim/analytics.hpp"
#include "frogsim/branching.hpp"
#include "frogsim/errors.hpp"
#include "frogsim/experiments.hpp"
#include "frogsim/parallel.hpp"
#include "frogsim/percolation.hpp"

#ifndef FROGSIM_VERSION
#define FROGSIM_VERSION "0.0.0"
#endif

namespace frogsim {

using json = nlohmann::ordered_json;

namespace {

struct KeyInfo {
    const char* key;
    const char* fallback; // nullptr: no default
};

// Every accepted key with its default.
const KeyInfo kKeys[] = {
    {"kind", nullptr},
    {"graph", "line"},
    {"eta", "det:1"},
    {"p", nullptr},
    {"lifetime", nullptr},
    {"death", "presampled"},
    {"horizon", "1000"},
    {"horizons", nullptr},
    {"trials", "1000"},
    {"trial", "0"},
    {"seed", nullptr},
    {"max_active", "1000000"},
    {"max_radius", "1000000"},
    {"eps", "0.02"},
    {"tolp", "0.01"},
    {"pgrid", "0.1:0.9:0.1"},
    {"dims", "3..10"},
    {"family", "tree"},
    {"budget", "1000000"},
    {"trace", "false"},
    {"site", nullptr},
    {"steps", "10"},
    {"radius", nullptr},
    {"generations", "30"},
    {"pmf", nullptr},
    {"which", "prop_g"},
    {"q", "0.5"},
    {"k", nullptr},
    {"tol", "1e-10"},
    {"pop_cap", "100000"},
    {"format", "json"},
    {"out", nullptr},
    {"workers", "1"},
};

const KeyInfo* find_key(const std::string& key)
{
    for (const auto& k : kKeys)
        if (key == k.key)
            return &k;
    return nullptr;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

bool parse_bool(const std::string& s, std::string_view what)
{
    if (s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "no")
        return false;
    fail(ErrorKind::Parse, std::string(what) + ": expected true or false, got '" + s + "'");
}

unsigned workers_of(const ExperimentFile& f)
{
    const auto w = parse_count(f.get("workers"), "workers");
    require(w >= 1 && w <= 1024, "workers must lie in [1,1024]");
    return static_cast<unsigned>(w);
}

std::uint64_t count_of(const ExperimentFile& f, const std::string& key)
{
    return parse_count(f.get(key), key);
}

double real_of(const ExperimentFile& f, const std::string& key)
{
    return parse_double(f.get(key), key);
}

Site parse_site(const GraphTopology& g, const std::string& text)
{
    if (text == "root" || text.empty())
        return g.root();
    std::vector<std::int32_t> enc;
    for (const auto& part : split(text, ',')) {
        std::int32_t v = 0;
        const auto* end = part.data() + part.size();
        const auto [ptr, ec] = std::from_chars(part.data(), end, v);
        if (ec != std::errc() || ptr != end)
            fail(ErrorKind::Parse, "site: bad coordinate '" + part + "'");
        enc.push_back(v);
    }
    return g.make_site(std::move(enc));
}

std::string csv_join(const std::vector<std::string>& cells)
{
    std::string out;
    for (std::size_t j = 0; j < cells.size(); ++j) {
        if (j)
            out += ',';
        out += cells[j];
    }
    out += '\n';
    return out;
}

std::string num(double v)
{
    return format_double(v);
}

std::string num(std::uint64_t v)
{
    return std::to_string(v);
}

json estimate_json(const SurvivalEstimate& e)
{
    return json{{"point", e.point},         {"ci_low", e.ci_low},
                {"ci_high", e.ci_high},     {"trials", e.trials},
                {"survived", e.survived},   {"horizon", e.horizon},
                {"cap_exceeded_count", e.cap_exceeded_count}};
}

json outcome_json(const SimOutcome& o)
{
    json j{{"status", to_string(o.status)}};
    j["extinction_time"] = o.extinction_time ? json(*o.extinction_time) : json(nullptr);
    j["root_visits"] = o.root_visits;
    j["activated_sites"] = o.activated_sites;
    j["max_radius"] = o.max_radius;
    j["steps"] = o.steps;
    return j;
}

json proportion_json(const Proportion& p)
{
    return json{{"estimate", p.estimate}, {"ci_low", p.ci_low},     {"ci_high", p.ci_high},
                {"successes", p.successes}, {"trials", p.trials}};
}

json bounds_json(const PcLowerBounds& b)
{
    return json{{"prop_g", b.prop_g},
                {"prop_md", b.prop_md},
                {"degree", b.degree},
                {"infinite_mean", b.infinite_mean},
                {"md_dominates", b.md_dominates}};
}

json pc_json(const PcEstimate& e)
{
    json profile = json::array();
    for (const auto& pr : e.profile) {
        json row = estimate_json(pr.survival);
        row["p"] = pr.p;
        profile.push_back(row);
    }
    return json{{"bracket_low", e.bracket_low},
                {"bracket_high", e.bracket_high},
                {"midpoint", e.midpoint()},
                {"eps", e.eps},
                {"tol_p", e.tol_p},
                {"horizon", e.horizon},
                {"trials", e.trials},
                {"degenerate", e.degenerate},
                {"profile_monotone", e.profile_monotone()},
                {"note", e.note},
                {"monotone_profile", profile}};
}

json range_sum_json(const RangeSum& r)
{
    json j{{"infinite", r.infinite}, {"subcritical", r.subcritical}};
    j["value"] = r.infinite ? json(nullptr) : json(r.value);
    j["truncation_error"] = r.truncation_error;
    return j;
}

std::string trial_csv_header()
{
    return "format_version,trial,seed,graph,mode,param,horizon,status,extinction_time,root_visits,activated_sites,"
           "max_radius\n";
}

std::string trial_csv_row(const FrogConfig& c, std::uint64_t trial, const SimOutcome& o)
{
    const bool fm = c.geometric();
    const std::string param =
        fm ? format_double(c.p()) : std::get<GeneralLifetime>(c.mode).xi.to_string();
    return csv_join({std::to_string(kCsvFormatVersion), num(trial), num(c.master_seed), c.topology.to_string(),
                     fm ? "fm:" + std::get<GeometricDeath>(c.mode).eta.to_string() : "gfm", param,
                     num(c.horizon), to_string(o.status),
                     o.extinction_time ? num(*o.extinction_time) : std::string(), num(o.root_visits),
                     num(o.activated_sites), num(o.max_radius)});
}

json config_json(const FrogConfig& c)
{
    json j{{"graph", c.topology.to_string()}};
    if (const auto* g = std::get_if<GeometricDeath>(&c.mode)) {
        j["mode"] = "fm";
        j["eta"] = g->eta.to_string();
        j["p"] = g->p;
    } else {
        j["mode"] = "gfm";
        j["lifetime"] = std::get<GeneralLifetime>(c.mode).xi.to_string();
    }
    j["horizon"] = c.horizon;
    j["max_active"] = c.max_active;
    j["max_radius"] = c.max_radius;
    return j;
}

OffspringLaw offspring_from(const ExperimentFile& f)
{
    if (f.has("pmf")) {
        std::vector<double> pmf;
        for (const auto& part : split(f.get("pmf"), ','))
            pmf.push_back(parse_double(part, "pmf"));
        return OffspringLaw::from_pmf(std::move(pmf));
    }
    const std::string which = f.get("which");
    const double p = real_of(f, "p");
    if (which == "pt_q")
        return pt_q_upper_law(p, real_of(f, "q"));
    const auto eta = ParticleCountLaw::parse(f.get("eta"));
    if (which == "prop_g")
        return prop_g_law(eta, p);
    if (which == "prop_md") {
        const std::uint64_t k =
            f.has("k") ? count_of(f, "k") : GraphTopology::parse(f.get("graph")).degree();
        require(k >= 2 && k < (1u << 31), "k must be >= 2");
        return prop_md_law(eta, p, static_cast<std::uint32_t>(k));
    }
    fail(ErrorKind::Parse, "which: expected prop_g, prop_md or pt_q, got '" + which + "'");
}

json law_json(const OffspringLaw& law)
{
    json j{{"description", law.describe()}};
    const auto m = law.mean();
    j["mean"] = m.infinite ? json("inf") : json(m.value);
    if (law.finite_support()) {
        json pmf = json::object();
        for (std::uint64_t k = 0; k <= law.support_max(); ++k)
            if (law.pmf(k) != 0.0)
                pmf[std::to_string(k)] = law.pmf(k);
        j["pmf"] = pmf;
    }
    return j;
}

std::vector<int> lattice_coords(const Site& x)
{
    return {x.encoding().begin(), x.encoding().end()};
}

} // namespace

// ---------------------------------------------------------------- file format

const std::vector<std::string>& ExperimentFile::known_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> v;
        for (const auto& k : kKeys)
            v.emplace_back(k.key);
        return v;
    }();
    return keys;
}

const std::vector<std::string>& ExperimentFile::known_kinds()
{
    static const std::vector<std::string> kinds{"simulate",    "survival",  "pc",        "recurrence",
                                                "bounds",      "sweep-d",   "srw-hit",   "srw-green",
                                                "srw-range",   "gw-survival", "gw-simulate", "gw-laws",
                                                "coupling-check"};
    return kinds;
}

bool ExperimentFile::needs_seed(const std::string& kind)
{
    return kind != "srw-green" && kind != "gw-survival" && kind != "gw-laws";
}

void ExperimentFile::set(const std::string& key, const std::string& value)
{
    if (!find_key(key))
        fail(ErrorKind::Parse, "unknown key '" + key + "'");
    if (key == "kind") {
        const auto& kinds = known_kinds();
        if (std::find(kinds.begin(), kinds.end(), value) == kinds.end())
            fail(ErrorKind::Parse, "unknown experiment kind '" + value + "'");
    }
    if (value.find('\n') != std::string::npos)
        fail(ErrorKind::Parse, "value of '" + key + "' contains a newline");
    fields_[key] = value;
}

std::string ExperimentFile::get(const std::string& key) const
{
    const auto it = fields_.find(key);
    if (it != fields_.end())
        return it->second;
    const auto* info = find_key(key);
    if (!info)
        fail(ErrorKind::Parse, "unknown key '" + key + "'");
    if (!info->fallback)
        fail(ErrorKind::InvalidArgument, "missing required field '" + key + "'");
    return info->fallback;
}

ExperimentFile ExperimentFile::parse(std::string_view text)
{
    ExperimentFile f;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        if (f.has(key))
            fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        try {
            f.set(key, trim(body.substr(eq + 1)));
        } catch (const Error& e) {
            fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return f;
}

std::string ExperimentFile::dump() const
{
    std::string out = "# frogsim experiment file\n";
    for (const auto& [k, v] : fields_)
        out += k + " = " + v + "\n";
    return out;
}

std::uint64_t parse_seed(std::string_view text)
{
    return parse_count(text, "seed");
}

std::vector<std::uint64_t> parse_count_list(std::string_view text, std::string_view what)
{
    std::vector<std::uint64_t> out;
    for (const auto& part : split(text, ','))
        out.push_back(parse_count(part, what));
    return out;
}

std::vector<int> parse_dims(std::string_view text)
{
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string_view::npos) {
        const auto lo = parse_count(trim(text.substr(0, dots)), "dims");
        const auto hi = parse_count(trim(text.substr(dots + 2)), "dims");
        if (lo > hi || hi > 64)
            fail(ErrorKind::Parse, "dims: bad range '" + std::string(text) + "'");
        for (auto d = lo; d <= hi; ++d)
            out.push_back(static_cast<int>(d));
        return out;
    }
    for (auto v : parse_count_list(text, "dims")) {
        if (v > 64)
            fail(ErrorKind::Parse, "dims: dimension too large");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

FrogConfig build_config(const ExperimentFile& f)
{
    FrogConfig c;
    c.topology = GraphTopology::parse(f.get("graph"));
    if (f.has("lifetime")) {
        if (f.has("p") || f.has("eta"))
            fail(ErrorKind::InvalidArgument, "lifetime excludes p and eta (one particle per site)");
        c.mode = GeneralLifetime{LifetimeLaw::parse(f.get("lifetime"))};
    } else {
        GeometricDeath g;
        g.eta = ParticleCountLaw::parse(f.get("eta"));
        g.p = f.has("p") ? real_of(f, "p") : 0.5;
        c.mode = g;
    }
    const std::string death = f.get("death");
    if (death == "presampled")
        c.death = DeathMechanism::Presampled;
    else if (death == "coin")
        c.death = DeathMechanism::PerStepCoin;
    else if (death == "quantile")
        c.death = DeathMechanism::QuantileCoin;
    else
        fail(ErrorKind::Parse, "death: expected presampled, coin or quantile");
    c.horizon = count_of(f, "horizon");
    c.max_active = count_of(f, "max_active");
    c.max_radius = count_of(f, "max_radius");
    c.master_seed = f.has("seed") ? parse_seed(f.get("seed")) : 0;
    c.validate();
    return c;
}

// ---------------------------------------------------------------- dispatch

ExperimentResult run_experiment(const ExperimentFile& f)
{
    const std::string kind = f.get("kind");
    if (ExperimentFile::needs_seed(kind) && !f.has("seed"))
        fail(ErrorKind::InvalidArgument, "experiment '" + kind + "' needs an explicit seed");
    const unsigned workers = workers_of(f);
    const std::string ver = std::to_string(kCsvFormatVersion);

    ExperimentResult res;
    json doc{{"kind", kind}};
    std::string csv;

    if (kind == "simulate" || kind == "survival" || kind == "pc" || kind == "recurrence" || kind == "bounds" ||
        kind == "sweep-d" || kind == "coupling-check") {
        const FrogConfig cfg = build_config(f);
        doc["config"] = config_json(cfg);

        if (kind == "simulate") {
            const auto trial = count_of(f, "trial");
            const bool want_trace = parse_bool(f.get("trace"), "trace");
            SimOutcome o;
            if (want_trace) {
                const auto tr = run_with_trace(cfg, trial);
                o = tr.outcome;
                std::vector<std::pair<Site, SiteActivation>> acts(tr.activation.begin(), tr.activation.end());
                std::sort(acts.begin(), acts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
                json ja = json::array();
                for (const auto& [site, act] : acts)
                    ja.push_back(json{{"site", site.to_string()},
                                      {"time", act.time},
                                      {"activator", act.activator.to_string()}});
                std::vector<Site> vis(tr.visited.begin(), tr.visited.end());
                std::sort(vis.begin(), vis.end());
                json jv = json::array();
                for (const auto& s : vis)
                    jv.push_back(s.to_string());
                doc["outcome"] = outcome_json(o);
                doc["trace"] = json{{"activation_time", ja}, {"visited", jv}};
            } else {
                o = run(cfg, trial);
                doc["outcome"] = outcome_json(o);
            }
            csv = trial_csv_header() + trial_csv_row(cfg, trial, o);
        } else if (kind == "survival") {
            const auto trials = count_of(f, "trials");
            std::vector<std::uint64_t> horizons{cfg.horizon};
            if (f.has("horizons"))
                horizons = parse_count_list(f.get("horizons"), "horizons");
            FrogConfig c = cfg;
            c.horizon = *std::max_element(horizons.begin(), horizons.end());
            require(std::is_sorted(horizons.begin(), horizons.end()), "horizons must be ascending");
            doc["config"] = config_json(c);
            const auto outcomes = run_trials(c, trials, workers);
            json ests = json::array();
            for (auto h : horizons)
                ests.push_back(estimate_json(summarize_survival(outcomes, h)));
            doc["estimates"] = ests;
            csv = trial_csv_header();
            for (std::uint64_t t = 0; t < outcomes.size(); ++t)
                csv += trial_csv_row(c, t, outcomes[t]);
        } else if (kind == "pc") {
            const auto est = estimate_pc(cfg, count_of(f, "trials"), real_of(f, "eps"), real_of(f, "tolp"), workers);
            doc["estimate"] = pc_json(est);
            csv = "format_version,p,trials,survived,point,ci_low,ci_high,cap_exceeded\n";
            for (const auto& pr : est.profile)
                csv += csv_join({ver, num(pr.p), num(pr.survival.trials), num(pr.survival.survived),
                                 num(pr.survival.point), num(pr.survival.ci_low), num(pr.survival.ci_high),
                                 num(pr.survival.cap_exceeded_count)});
        } else if (kind == "recurrence") {
            const auto horizons = parse_count_list(f.get("horizons"), "horizons");
            FrogConfig shown = cfg;
            shown.horizon = horizons.empty() ? cfg.horizon : horizons.back();
            doc["config"] = config_json(shown);
            const auto rep = recurrence_curve(cfg, horizons, count_of(f, "trials"), workers);
            json pts = json::array();
            csv = "format_version,horizon,mean_root_visits,std_error,ci_low,ci_high\n";
            for (const auto& pt : rep.points) {
                pts.push_back(json{{"horizon", pt.horizon},
                                   {"mean", pt.mean},
                                   {"std_error", pt.std_error},
                                   {"ci_low", pt.ci_low},
                                   {"ci_high", pt.ci_high}});
                csv += csv_join({ver, num(pt.horizon), num(pt.mean), num(pt.std_error), num(pt.ci_low),
                                 num(pt.ci_high)});
            }
            doc["points"] = pts;
            doc["verdict"] = to_string(rep.verdict);
            doc["trials"] = rep.trials;
            doc["cap_exceeded_count"] = rep.cap_exceeded_count;
        } else if (kind == "bounds") {
            const auto rep = bounds_report(cfg, parse_grid(f.get("pgrid")), count_of(f, "trials"), real_of(f, "eps"),
                                           workers);
            json rows = json::array();
            csv = "format_version,p,prop_g,prop_md,below_prop_g,below_prop_md,range_sum,range_sum_infinite,"
                  "survival,ci_low,ci_high,consistent\n";
            for (const auto& r : rep.rows) {
                rows.push_back(json{{"p", r.p},
                                    {"bounds", bounds_json(r.bounds)},
                                    {"below_prop_g", r.below_prop_g},
                                    {"below_prop_md", r.below_prop_md},
                                    {"expected_range_sum", range_sum_json(r.range_sum)},
                                    {"survival", estimate_json(r.survival)},
                                    {"consistent", r.consistent}});
                csv += csv_join({ver, num(r.p), num(r.bounds.prop_g), num(r.bounds.prop_md),
                                 r.below_prop_g ? "1" : "0", r.below_prop_md ? "1" : "0",
                                 r.range_sum.infinite ? "" : num(r.range_sum.value),
                                 r.range_sum.infinite ? "1" : "0", num(r.survival.point), num(r.survival.ci_low),
                                 num(r.survival.ci_high), r.consistent ? "1" : "0"});
            }
            doc["rows"] = rows;
            doc["eps"] = rep.eps;
            doc["consistent"] = rep.consistent;
            res.consistent = rep.consistent;
            res.message = rep.violations;
        } else if (kind == "sweep-d") {
            const auto rep = sweep_pc_vs_dimension(cfg, f.get("family"), parse_dims(f.get("dims")),
                                                   count_of(f, "trials"), real_of(f, "eps"), real_of(f, "tolp"),
                                                   workers);
            json rows = json::array();
            csv = "format_version,dim,bracket_low,bracket_high,midpoint,degenerate,prop_g,prop_md\n";
            for (const auto& r : rep.rows) {
                rows.push_back(json{{"dim", r.dim}, {"estimate", pc_json(r.estimate)}, {"bounds", bounds_json(r.bounds)}});
                csv += csv_join({ver, std::to_string(r.dim), num(r.estimate.bracket_low), num(r.estimate.bracket_high),
                                 num(r.estimate.midpoint()), r.estimate.degenerate ? "1" : "0", num(r.bounds.prop_g),
                                 num(r.bounds.prop_md)});
            }
            doc["rows"] = rows;
            doc["target"] = rep.target;
            doc["midpoints_non_increasing"] = rep.midpoints_non_increasing;
            doc["final_gap"] = rep.final_gap;
        } else {
            const auto rep = coupling_check(cfg, count_of(f, "trials"), count_of(f, "budget"), workers);
            doc["trials"] = rep.trials;
            doc["matches"] = rep.matches;
            doc["mismatches"] = rep.mismatches;
            doc["cap_bound"] = rep.cap_bound;
            doc["first_mismatch"] = rep.first_mismatch < 0 ? json(nullptr) : json(rep.first_mismatch);
            doc["passed"] = rep.passed();
            csv = "format_version,trials,matches,mismatches,cap_bound,passed\n" +
                  csv_join({ver, num(rep.trials), num(rep.matches), num(rep.mismatches), num(rep.cap_bound),
                            rep.passed() ? "1" : "0"});
            res.consistent = rep.mismatches == 0;
            if (!res.consistent)
                res.message = "engine visited set differs from the percolation cluster in trial " +
                              std::to_string(rep.first_mismatch);
        }
    } else if (kind == "srw-hit" || kind == "srw-range" || kind == "srw-green") {
        const auto g = GraphTopology::parse(f.get("graph"));
        const auto n = count_of(f, "steps");
        doc["graph"] = g.to_string();
        doc["steps"] = n;
        if (kind == "srw-hit") {
            const Site x = parse_site(g, f.has("site") ? f.get("site") : "");
            const auto trials = count_of(f, "trials");
            const auto est = srw_hit_prob_mc(g, x, n, trials, parse_seed(f.get("seed")), workers);
            doc["site"] = x.to_string();
            doc["estimate"] = proportion_json(est);
            json exact = nullptr;
            if (!g.is_tree() && g.dim() <= 3 && n <= 200) {
                const auto q = srw_first_passage(g.dim(), lattice_coords(x), n);
                exact = q[n];
            }
            doc["exact"] = exact;
            csv = "format_version,site,steps,trials,hits,estimate,ci_low,ci_high,exact\n" +
                  csv_join({ver, "\"" + x.to_string() + "\"", num(n), num(est.trials), num(est.successes),
                            num(est.estimate), num(est.ci_low), num(est.ci_high),
                            exact.is_null() ? "" : num(exact.get<double>())});
        } else if (kind == "srw-range") {
            const auto est = srw_range_mc(g, n, count_of(f, "trials"), parse_seed(f.get("seed")), workers);
            doc["mean"] = est.mean;
            doc["std_error"] = est.std_error;
            doc["trials"] = est.trials;
            csv = "format_version,steps,trials,mean,std_error\n" +
                  csv_join({ver, num(n), num(est.trials), num(est.mean), num(est.std_error)});
        } else {
            require(!g.is_tree() && g.dim() <= 3, "srw green needs line or zd:<d> with d <= 3");
            const int radius = static_cast<int>(f.has("radius") ? count_of(f, "radius") : std::max<std::uint64_t>(n, 1));
            const SrwDp dp(g.dim(), radius, n);
            const Site x = parse_site(g, f.has("site") ? f.get("site") : "");
            const auto xc = lattice_coords(x);
            const std::vector<int> origin(static_cast<std::size_t>(g.dim()), 0);
            const auto q = dp.hit_by_renewal(xc);
            json rows = json::array();
            csv = "format_version,k,occupation,green,green_origin,hit\n";
            for (std::uint64_t k = 0; k <= n; ++k) {
                const double occ = dp.occupation(k, xc), gx = dp.green(k, xc), g0 = dp.green(k, origin);
                rows.push_back(json{{"k", k}, {"occupation", occ}, {"green", gx}, {"green_origin", g0}, {"hit", q[k]}});
                csv += csv_join({ver, num(k), num(occ), num(gx), num(g0), num(q[k])});
            }
            doc["site"] = x.to_string();
            doc["radius"] = radius;
            doc["leakage"] = dp.leakage();
            doc["rows"] = rows;
        }
    } else if (kind == "gw-laws" || kind == "gw-survival" || kind == "gw-simulate") {
        const auto law = offspring_from(f);
        doc["law"] = law_json(law);
        const double tol = real_of(f, "tol");
        if (kind == "gw-laws") {
            csv = "format_version,k,probability\n";
            if (law.finite_support())
                for (std::uint64_t k = 0; k <= law.support_max(); ++k)
                    if (law.pmf(k) != 0.0)
                        csv += csv_join({ver, num(k), num(law.pmf(k))});
        } else if (kind == "gw-survival") {
            const double s = gw_survival_prob(law, tol);
            doc["survival"] = s;
            csv = "format_version,survival\n" + csv_join({ver, num(s)});
        } else {
            const auto trials = count_of(f, "trials");
            const auto gens = count_of(f, "generations");
            const auto cap = count_of(f, "pop_cap");
            const std::uint64_t seed = combine(mix64(parse_seed(f.get("seed"))), static_cast<std::uint64_t>(Purpose::Auxiliary));
            std::vector<char> extinct(trials, 0), capped(trials, 0);
            parallel_for(trials, workers, [&](std::uint64_t t) {
                SplitMix64 rng(combine(seed, t));
                const auto run = gw_simulate(law, gens, rng, cap);
                extinct[t] = !run.alive_at(gens);
                capped[t] = run.cap_hit;
            });
            const auto ext = make_proportion(static_cast<std::uint64_t>(std::count(extinct.begin(), extinct.end(), 1)),
                                             trials);
            const double s = gw_survival_prob(law, tol);
            doc["generations"] = gens;
            doc["extinction"] = proportion_json(ext);
            doc["cap_hit_count"] = std::count(capped.begin(), capped.end(), 1);
            doc["oracle_extinction"] = 1.0 - s;
            csv = "format_version,generations,trials,extinct,extinction,ci_low,ci_high,oracle_extinction\n" +
                  csv_join({ver, num(gens), num(trials), num(ext.successes), num(ext.estimate), num(ext.ci_low),
                            num(ext.ci_high), num(1.0 - s)});
        }
    } else {
        fail(ErrorKind::Parse, "unknown experiment kind '" + kind + "'");
    }

    doc["provenance"] = json{{"master_seed", f.has("seed") ? json(parse_seed(f.get("seed"))) : json(nullptr)},
                             {"code_version", FROGSIM_VERSION}};
    res.json = doc.dump(2) + "\n";
    res.csv = std::move(csv);
    return res;
}

} // namespace frogsim

#include "frogsim/frogsim.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "frogsim/errors.hpp"
#include "frogsim/experiment_file.hpp"

#ifndef FROGSIM_VERSION
#define FROGSIM_VERSION "0.0.0"
#endif

struct frogsim_experiment {
    frogsim::ExperimentFile file;
};

struct frogsim_result {
    frogsim::ExperimentResult result;
};

namespace {

thread_local std::string last_error;

frogsim_status code_of(frogsim::ErrorKind k)
{
    using frogsim::ErrorKind;
    switch (k) {
    case ErrorKind::InvalidArgument:
        return FROGSIM_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse:
        return FROGSIM_ERR_PARSE;
    case ErrorKind::Overflow:
        return FROGSIM_ERR_OVERFLOW;
    case ErrorKind::CapExceeded:
        return FROGSIM_ERR_CAP_EXCEEDED;
    case ErrorKind::NonConvergence:
        return FROGSIM_ERR_NON_CONVERGENCE;
    case ErrorKind::Inconsistency:
        return FROGSIM_ERR_INCONSISTENT;
    }
    return FROGSIM_ERR_INTERNAL;
}

template <class Fn>
frogsim_status guarded(Fn&& fn)
{
    try {
        fn();
        last_error.clear();
        return FROGSIM_OK;
    } catch (const frogsim::Error& e) {
        last_error = e.what();
        return code_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return FROGSIM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return FROGSIM_ERR_INTERNAL;
    }
}

char* copy_string(const std::string& s)
{
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

frogsim_status null_arg(const char* what)
{
    last_error = std::string(what) + " is null";
    return FROGSIM_ERR_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char* frogsim_version(void)
{
    return FROGSIM_VERSION;
}

const char* frogsim_last_error(void)
{
    return last_error.c_str();
}

frogsim_status frogsim_experiment_new(frogsim_experiment** out)
{
    if (!out)
        return null_arg("out");
    return guarded([&] { *out = new frogsim_experiment{}; });
}

frogsim_status frogsim_experiment_parse(const char* text, frogsim_experiment** out)
{
    if (!text || !out)
        return null_arg(!text ? "text" : "out");
    return guarded([&] { *out = new frogsim_experiment{frogsim::ExperimentFile::parse(text)}; });
}

void frogsim_experiment_free(frogsim_experiment* exp)
{
    delete exp;
}

frogsim_status frogsim_experiment_set(frogsim_experiment* exp, const char* key, const char* value)
{
    if (!exp || !key || !value)
        return null_arg(!exp ? "experiment" : !key ? "key" : "value");
    return guarded([&] { exp->file.set(key, value); });
}

frogsim_status frogsim_experiment_unset(frogsim_experiment* exp, const char* key)
{
    if (!exp || !key)
        return null_arg(!exp ? "experiment" : "key");
    return guarded([&] { exp->file.erase(key); });
}

frogsim_status frogsim_experiment_get(const frogsim_experiment* exp, const char* key, char** out)
{
    if (!exp || !key || !out)
        return null_arg(!exp ? "experiment" : !key ? "key" : "out");
    return guarded([&] { *out = copy_string(exp->file.get(key)); });
}

int frogsim_experiment_has(const frogsim_experiment* exp, const char* key)
{
    return exp && key && exp->file.has(key) ? 1 : 0;
}

frogsim_status frogsim_experiment_dump(const frogsim_experiment* exp, char** out)
{
    if (!exp || !out)
        return null_arg(!exp ? "experiment" : "out");
    return guarded([&] { *out = copy_string(exp->file.dump()); });
}

frogsim_status frogsim_run(const frogsim_experiment* exp, frogsim_result** out)
{
    if (!exp || !out)
        return null_arg(!exp ? "experiment" : "out");
    return guarded([&] { *out = new frogsim_result{frogsim::run_experiment(exp->file)}; });
}

const char* frogsim_result_json(const frogsim_result* res)
{
    return res ? res->result.json.c_str() : "";
}

const char* frogsim_result_csv(const frogsim_result* res)
{
    return res ? res->result.csv.c_str() : "";
}

int frogsim_result_consistent(const frogsim_result* res)
{
    return res && res->result.consistent ? 1 : 0;
}

const char* frogsim_result_message(const frogsim_result* res)
{
    return res ? res->result.message.c_str() : "";
}

void frogsim_result_free(frogsim_result* res)
{
    delete res;
}

frogsim_status frogsim_simulate(const frogsim_experiment* exp, uint64_t trial, frogsim_outcome* out)
{
    if (!exp || !out)
        return null_arg(!exp ? "experiment" : "out");
    return guarded([&] {
        const auto o = frogsim::run(frogsim::build_config(exp->file), trial);
        out->status = static_cast<frogsim_sim_status>(o.status);
        out->has_extinction_time = o.extinction_time.has_value();
        out->extinction_time = o.extinction_time.value_or(0);
        out->root_visits = o.root_visits;
        out->activated_sites = o.activated_sites;
        out->max_radius = o.max_radius;
        out->steps = o.steps;
    });
}

void frogsim_string_free(char* s)
{
    std::free(s);
}

} // extern "C"

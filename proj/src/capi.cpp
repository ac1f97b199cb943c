#include "limsup.h"
#include "limsup/experiment.hpp"

#include <new>
#include <string>

struct limsup_config {
    limsup::ExperimentConfig cfg;
};

struct limsup_result {
    limsup::RunOutput out;
};

namespace {

thread_local std::string last_error;

limsup_status status_of(limsup::ErrorCode code)
{
    using limsup::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return LIMSUP_INVALID_ARGUMENT;
    case ErrorCode::PrecisionExhausted: return LIMSUP_PRECISION_EXHAUSTED;
    case ErrorCode::UnattainableHeight: return LIMSUP_UNATTAINABLE_HEIGHT;
    case ErrorCode::OutOfTableRange: return LIMSUP_OUT_OF_TABLE_RANGE;
    case ErrorCode::HypothesisViolated: return LIMSUP_HYPOTHESIS_VIOLATED;
    case ErrorCode::PreconditionUnmet: return LIMSUP_PRECONDITION_UNMET;
    case ErrorCode::EmptyAdmissibleSet: return LIMSUP_EMPTY_ADMISSIBLE_SET;
    case ErrorCode::BudgetExceeded: return LIMSUP_BUDGET_EXCEEDED;
    case ErrorCode::ParseError: return LIMSUP_PARSE_ERROR;
    case ErrorCode::UnknownKey: return LIMSUP_UNKNOWN_KEY;
    case ErrorCode::MissingRequired: return LIMSUP_MISSING_REQUIRED;
    case ErrorCode::IoError: return LIMSUP_IO_ERROR;
    }
    return LIMSUP_INTERNAL_ERROR;
}

template <class F>
limsup_status guarded(F&& body)
{
    last_error.clear();
    try {
        body();
        return LIMSUP_OK;
    } catch (const limsup::Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown failure";
    }
    return LIMSUP_INTERNAL_ERROR;
}

limsup_status invalid(const char* what)
{
    last_error = what;
    return LIMSUP_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char* limsup_version(void) { return limsup::kToolVersion; }

const char* limsup_status_name(limsup_status status)
{
    switch (status) {
    case LIMSUP_OK: return "ok";
    case LIMSUP_INVALID_ARGUMENT: return "invalid_argument";
    case LIMSUP_PRECISION_EXHAUSTED: return "precision_exhausted";
    case LIMSUP_UNATTAINABLE_HEIGHT: return "unattainable_height";
    case LIMSUP_OUT_OF_TABLE_RANGE: return "out_of_table_range";
    case LIMSUP_HYPOTHESIS_VIOLATED: return "hypothesis_violated";
    case LIMSUP_PRECONDITION_UNMET: return "precondition_unmet";
    case LIMSUP_EMPTY_ADMISSIBLE_SET: return "empty_admissible_set";
    case LIMSUP_BUDGET_EXCEEDED: return "budget_exceeded";
    case LIMSUP_PARSE_ERROR: return "parse_error";
    case LIMSUP_UNKNOWN_KEY: return "unknown_key";
    case LIMSUP_MISSING_REQUIRED: return "missing_required";
    case LIMSUP_IO_ERROR: return "io_error";
    case LIMSUP_INTERNAL_ERROR: return "internal_error";
    }
    return "unknown";
}

int limsup_exit_code(limsup_status status)
{
    switch (status) {
    case LIMSUP_OK: return 0;
    case LIMSUP_HYPOTHESIS_VIOLATED:
    case LIMSUP_PRECONDITION_UNMET: return 2;
    case LIMSUP_BUDGET_EXCEEDED: return 3;
    default: return 1;
    }
}

const char* limsup_last_error(void) { return last_error.c_str(); }

limsup_status limsup_config_parse(const char* text, const char* const* keys, const char* const* values,
                                  size_t override_count, limsup_config** out)
{
    if (!text || !out || (override_count && (!keys || !values)))
        return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        std::map<std::string, std::string> overrides;
        for (size_t i = 0; i < override_count; ++i) {
            if (!keys[i] || !values[i])
                limsup::fail(limsup::ErrorCode::InvalidArgument, "null override");
            overrides[keys[i]] = values[i];
        }
        *out = new limsup_config{limsup::parse_config(text, overrides)};
    });
}

const char* limsup_config_command(const limsup_config* config)
{
    return config ? limsup::command_name(config->cfg.command) : nullptr;
}

const char* limsup_config_get(const limsup_config* config, const char* key)
{
    if (!config || !key)
        return nullptr;
    auto it = config->cfg.values.find(key);
    return it == config->cfg.values.end() ? nullptr : it->second.c_str();
}

void limsup_config_free(limsup_config* config) { delete config; }

limsup_status limsup_run(const limsup_config* config, limsup_result** out)
{
    if (!config || !out)
        return invalid("null argument");
    *out = nullptr;
    return guarded([&] { *out = new limsup_result{limsup::run_experiment(config->cfg)}; });
}

size_t limsup_result_artifact_count(const limsup_result* result) { return result ? result->out.artifacts.size() : 0; }

const char* limsup_result_artifact_name(const limsup_result* result, size_t index)
{
    if (!result || index >= result->out.artifacts.size())
        return nullptr;
    return result->out.artifacts[index].name.c_str();
}

const char* limsup_result_artifact_content(const limsup_result* result, size_t index, size_t* length)
{
    if (!result || index >= result->out.artifacts.size())
        return nullptr;
    const auto& content = result->out.artifacts[index].content;
    if (length)
        *length = content.size();
    return content.c_str();
}

const char* limsup_result_summary(const limsup_result* result) { return result ? result->out.summary.c_str() : nullptr; }

limsup_status limsup_result_write(const limsup_result* result, const limsup_config* config, const char* dir)
{
    if (!result || !config || !dir)
        return invalid("null argument");
    return guarded([&] { limsup::write_artifacts(dir, result->out, config->cfg); });
}

void limsup_result_free(limsup_result* result) { delete result; }

limsup_status limsup_emit_fixtures(const char* dir)
{
    if (!dir)
        return invalid("null argument");
    return guarded([&] { limsup::emit_fixture_suite(dir); });
}

limsup_status limsup_verify_manifest(const char* dir)
{
    if (!dir)
        return invalid("null argument");
    bool ok = false;
    auto st = guarded([&] { ok = limsup::verify_manifest(dir); });
    if (st == LIMSUP_OK && !ok) {
        last_error = "digest mismatch";
        return LIMSUP_IO_ERROR;
    }
    return st;
}

} // extern "C"

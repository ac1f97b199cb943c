#pragma once

#include "limsup/error.hpp"
#include "limsup/exact.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace limsup {

enum class Command { DimEval, DimSearch, Solve, Certify, MeasureScan, BoxDim, Series, Ubiquity, CoveringSum, Fixtures };

const char* command_name(Command c);
Command parse_command(const std::string& name);
bool is_stochastic(Command c);

inline constexpr const char* kBudgetEnv = "LIMSUP_LAB_BUDGET";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Flat key=value config. Values are checked against the command's key table at
// parse time; accessors re-parse the stored text.
struct ExperimentConfig {
    Command command = Command::DimEval;
    std::map<std::string, std::string> values;
    std::string source; // config text after overrides, one key per line

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const std::string& text(const std::string& key) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;
    std::int64_t integer(const std::string& key) const;
    std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
    Rational rational(const std::string& key) const;
    Rational rational_or(const std::string& key, const Rational& fallback) const;
    std::vector<Rational> rationals(const std::string& key) const;
    std::vector<std::int64_t> integers(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::optional<std::uint64_t> seed() const;
};

// Overrides (e.g. from the command line) replace or add keys before validation.
// An overriding command must agree with the one in the text.
ExperimentConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides = {});

// Config budget, replaced by the environment variable when set (0 = no cap).
std::uint64_t effective_budget(const ExperimentConfig& config);

struct Artifact {
    std::string name;
    std::string content;
};

struct RunOutput {
    std::vector<Artifact> artifacts;
    std::string summary;
};

// Computes every artifact in memory; throws limsup::Error on failure.
RunOutput run_experiment(const ExperimentConfig& config);

// 0 success, 2 hypothesis or precondition failures, 3 budget exhaustion, 1 otherwise.
int exit_code_for(ErrorCode code);

// Writes each artifact through a temporary file and rename, then manifest.json.
void write_artifacts(const std::filesystem::path& dir, const RunOutput& out, const ExperimentConfig& config);

std::vector<Artifact> fixture_suite();
void emit_fixture_suite(const std::filesystem::path& dir);

std::string sha256_hex(const std::string& bytes);
// Recomputes every output digest listed in dir/manifest.json.
bool verify_manifest(const std::filesystem::path& dir);

} // namespace limsup

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbflow/ansatz.hpp"
#include "rbflow/reduced_flow.hpp"

namespace rbflow {

enum class Mode { Simulate, VerifyAnsatz, VerifyFlow, VerifyEstimate, IdentityCheck, Classify, Catalog };

std::string_view to_string(Mode mode);
/// Accepts the subcommand spelling, e.g. "verify-flow". Throws ConfigError.
Mode mode_from_string(std::string_view text);

inline constexpr int kSchemaVersion = 1;

/// Environment variable that overrides the output directory of a config file.
inline constexpr const char* kOutDirEnv = "RBFLOW_OUT_DIR";

struct EstimateRunConfig {
    double R = 4.0;
    int refine = 1;
};

struct RunConfig {
    Mode mode = Mode::Catalog;
    std::string scenario;            // catalog entry, simulation problem or estimate suite
    ScenarioOverrides overrides;     // inline scenario definition on top of a catalog entry
    Perturbation perturbation;       // verify-flow only
    std::string catalog_action = "list";
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "rbflow-out";
    std::vector<double> output_times;
    std::optional<double> tolerance; // mode default when empty
    SolverConfig solver;
    int npts = 201;
    int samples = 20;                // verify-flow sample points
    double dt_fd = 1e-4;
    EstimateRunConfig estimate;

    /// Checks names, ranges and output times against the scenario. Throws
    /// ConfigError, UnknownScenario, DomainError.
    void validate() const;
};

/// Parses a JSON configuration document. Unknown keys and a wrong
/// schema_version are ConfigErrors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// --out wins over the environment variable, which wins over the config file.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& cli_out, const RunConfig& config);

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitProperty = 3 };

/// Error kind to exit status.
int exit_code_for(std::string_view error_kind);

struct RunResult {
    int exit_code = kExitOk;
    std::string message; // one line for the terminal
    std::vector<std::filesystem::path> artifacts;
};

/// Executes one run and writes its CSVs and summary.json under config.out_dir.
/// Library errors are caught and mapped to exit statuses; the summary is
/// written in every case.
RunResult run(const RunConfig& config);

}  // namespace rbflow

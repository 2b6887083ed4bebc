#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svf/config.hpp"
#include "svf/report.hpp"

namespace svf {

struct RunOptions {
    std::string config_path;
    std::optional<ExperimentKind> kind;  // subcommand override of the config kind
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> reps;
    std::optional<int> threads;
    std::string out;  // overrides the config's output directory
    bool strict = false;
};

// Executes the configured experiment and fills a result record; pure apart
// from the model computation (no files, no clock).
ResultRecord execute(const ExperimentConfig& config);

// Statistical acceptance gates for --strict, one message per failure.
std::vector<std::string> strict_failures(const ExperimentConfig& config,
                                         const ResultRecord& record);

// Full subcommand: load config, apply overrides, execute, report, write
// outputs. Returns 0, or 3 when --strict finds statistical failures.
// Config and validation problems propagate as exceptions (exit 2).
int run_experiment(const RunOptions& options, std::ostream& log);

int run_report_merge(const std::vector<std::string>& record_paths, const std::string& out,
                     std::ostream& log);

}  // namespace svf

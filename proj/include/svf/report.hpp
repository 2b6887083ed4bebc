#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace svf {

// One experiment's outputs with enough context to rerun it: the full config
// echo plus every numeric result. wall_seconds is the only field excluded
// from reproducibility comparisons.
struct ResultRecord {
    std::string kind;
    std::string version;
    std::string config_echo;
    nlohmann::json outputs;
    double wall_seconds = 0.0;
};

extern const char* const kArtifactVersion;

nlohmann::json record_to_json(const ResultRecord& record);
ResultRecord record_from_json(const nlohmann::json& j);
std::string render_record(const ResultRecord& record);
ResultRecord load_record(const std::string& path);

// Equality of everything except wall-clock.
bool same_outputs(const ResultRecord& a, const ResultRecord& b);

// Combined sweep table across records of one kind: one row per record with
// its scalar outputs. Throws on an empty list or mixed kinds.
nlohmann::json report_merge(const std::vector<ResultRecord>& records);

}  // namespace svf

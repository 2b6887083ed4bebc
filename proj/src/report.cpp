#include "svf/report.hpp"

#include <fstream>
#include <stdexcept>

namespace svf {

const char* const kArtifactVersion = "svfield 1.0.0";

nlohmann::json record_to_json(const ResultRecord& record) {
    return nlohmann::json{{"kind", record.kind},
                          {"version", record.version},
                          {"config", record.config_echo},
                          {"outputs", record.outputs},
                          {"wall_seconds", record.wall_seconds}};
}

ResultRecord record_from_json(const nlohmann::json& j) {
    ResultRecord record;
    record.kind = j.at("kind").get<std::string>();
    record.version = j.at("version").get<std::string>();
    record.config_echo = j.at("config").get<std::string>();
    record.outputs = j.at("outputs");
    record.wall_seconds = j.at("wall_seconds").get<double>();
    return record;
}

std::string render_record(const ResultRecord& record) {
    return record_to_json(record).dump(2) + "\n";
}

ResultRecord load_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read record file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return record_from_json(j);
}

bool same_outputs(const ResultRecord& a, const ResultRecord& b) {
    return a.kind == b.kind && a.version == b.version && a.config_echo == b.config_echo &&
           a.outputs == b.outputs;
}

nlohmann::json report_merge(const std::vector<ResultRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no records to merge");
    const std::string& kind = records.front().kind;
    nlohmann::json table = nlohmann::json::array();
    for (const ResultRecord& record : records) {
        if (record.kind != kind)
            throw std::invalid_argument("records mix experiment kinds: " + kind + " vs " +
                                        record.kind);
        nlohmann::json row = nlohmann::json::object();
        for (const auto& [key, value] : record.outputs.items()) {
            if (value.is_number() || value.is_string() || value.is_boolean()) row[key] = value;
        }
        table.push_back(std::move(row));
    }
    return nlohmann::json{{"kind", kind}, {"records", records.size()}, {"table", table}};
}

}  // namespace svf

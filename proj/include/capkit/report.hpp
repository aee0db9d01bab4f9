#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace capkit {

struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double bound = 0.0;
    std::string detail;
    double seconds = 0.0;
};

nlohmann::json to_json(const CheckResult& c);

/// FNV-1a of the canonical config string, hex; report files are keyed by it.
std::string config_hash_hex(const std::string& canonical);

struct ReportRecord {
    std::string command;
    nlohmann::json params;
    std::uint64_t seed = 0;
    nlohmann::json results;
    std::vector<CheckResult> checks;
    bool include_timestamp = true;

    nlohmann::json to_json() const;
    bool all_pass() const;
};

/// Writes outdir/<config-hash>.json; returns the path.
std::filesystem::path write_report(const std::filesystem::path& outdir, const ReportRecord& rec);

}  // namespace capkit

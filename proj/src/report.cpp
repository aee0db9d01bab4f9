#include "capkit/report.hpp"

#include <chrono>
#include <fstream>

namespace capkit {

nlohmann::json to_json(const CheckResult& c) {
    return {{"name", c.name},   {"pass", c.pass},     {"observed", c.observed},
            {"bound", c.bound}, {"detail", c.detail}, {"seconds", c.seconds}};
}

std::string config_hash_hex(const std::string& canonical) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json ReportRecord::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["params"] = params;
    j["seed"] = seed;
    if (!results.is_null()) j["results"] = results;
    if (!checks.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks) arr.push_back(capkit::to_json(c));
        j["checks"] = arr;
    }
    if (include_timestamp) {
        const auto now = std::chrono::system_clock::now();
        j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    }
    return j;
}

bool ReportRecord::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::filesystem::path write_report(const std::filesystem::path& outdir, const ReportRecord& rec) {
    std::filesystem::create_directories(outdir);
    const std::string key = config_hash_hex(rec.command + "|" + rec.params.dump() + "|" +
                                            std::to_string(rec.seed));
    const auto path = outdir / (key + ".json");
    std::ofstream out(path);
    out << rec.to_json().dump(2) << "\n";
    return path;
}

}  // namespace capkit

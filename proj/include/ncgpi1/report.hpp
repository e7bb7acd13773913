#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ncgpi1/version.hpp"

namespace ncg {

using Json = nlohmann::ordered_json;

struct ReportCheck {
    std::string name;
    bool pass = true;
    Json details; // margins, witnesses; must be seed-deterministic
};

/// Deterministic command report: identical inputs and seed produce
/// byte-identical JSON (wall-clock appears only in the text rendering).
struct Report {
    std::string command;
    std::vector<ReportCheck> checks;
    Json payload = Json::object();
    bool has_seed = false;
    std::uint64_t seed = 0;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    Json to_json() const {
        Json j;
        j["format_version"] = 1;
        j["command"] = command;
        j["library_version"] = library_version;
        if (has_seed) j["seed"] = seed;
        Json cs = Json::array();
        std::size_t fails = 0;
        for (const auto& c : checks) {
            Json jc;
            jc["name"] = c.name;
            jc["pass"] = c.pass;
            if (!c.details.is_null()) jc["details"] = c.details;
            if (!c.pass) ++fails;
            cs.push_back(std::move(jc));
        }
        j["checks"] = std::move(cs);
        j["summary"] = Json{{"total", checks.size()}, {"failed", fails},
                            {"all_pass", all_pass()}};
        if (!payload.empty()) j["payload"] = payload;
        return j;
    }

    std::string to_json_string() const { return to_json().dump(2) + "\n"; }

    std::string to_text(double wall_seconds = -1.0) const {
        std::string s = "command: " + command + " (ncgpi1 " + library_version + ")\n";
        if (has_seed) s += "seed: " + std::to_string(seed) + "\n";
        for (const auto& c : checks) {
            s += std::string(c.pass ? "[PASS] " : "[FAIL] ") + c.name;
            if (!c.details.is_null()) s += "  " + c.details.dump();
            s += "\n";
        }
        if (!payload.empty()) s += "payload: " + payload.dump(2) + "\n";
        s += all_pass() ? "result: all checks passed\n" : "result: CHECK FAILURES\n";
        if (wall_seconds >= 0.0)
            s += "wall_clock_seconds: " + std::to_string(wall_seconds) + "\n";
        return s;
    }
};

} // namespace ncg

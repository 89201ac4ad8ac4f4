#pragma once

#include "n2alg/parallel.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace n2alg {

/// Batch-verification configuration; the seed fully determines every random
/// fixture, so identical configs produce byte-identical reports.
struct VerifyConfig {
    int generators = 4;      // Grassmann generators (<= 8)
    int window = 12;         // delta/field window (<= 24)
    int weight = 6;          // truncation weight (<= 8)
    int range_lo = -4, range_hi = 4;
    std::uint64_t seed = 0;
    std::vector<std::string> suites; // empty = all
    ExecMode mode = ExecMode::parallel;

    void validate() const; // throws std::invalid_argument on bad values
};

struct CheckRecord {
    std::string suite;
    std::string id;
    std::string description;
    bool pass = false;
    bool negative_control = false;
    long checks = 0;
    double seconds = 0;
    std::vector<std::string> details;
};

struct VerifyResult {
    std::vector<CheckRecord> records;
    bool all_pass() const {
        for (auto& r : records)
            if (!r.pass) return false;
        return true;
    }
};

const std::vector<std::string>& known_suites();

/// Run the selected suites; records are ordered by suite and check id
/// regardless of scheduling.
VerifyResult run_verify(const VerifyConfig& config);

nlohmann::json report_to_json(const VerifyConfig& config, const VerifyResult& result);
std::string summary_text(const VerifyResult& result);

} // namespace n2alg

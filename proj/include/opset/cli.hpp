#pragma once

#include "opset/activation.hpp"

#include <json.hpp>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace opset::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kAllPass = 0, kCheckFailure = 1, kUsageError = 2 };

/// Entry point shared by the opset executable and the tests. Human-readable
/// lines go to out (to err when JSON is streamed to out).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

enum class Status { Pass, Fail, Error };
std::string status_name(Status s);

struct CheckResult {
    Status status = Status::Error;
    nlohmann::json witnesses = nlohmann::json::array();
    nlohmann::json certificate = nlohmann::json::object();
    std::string summary;
};

struct CheckRecord {
    std::string name;
    CheckResult result;
    double wall_time_ms = 0;
};

struct CheckTask {
    std::string name;
    std::function<CheckResult()> run;
};

struct RunOptions {
    double timeout_s = 600;
    std::size_t threads = 1;
    BranchingPolicy branching = BranchingPolicy::Deterministic;
};

/// Runs independent checks (concurrently with threads > 1) and returns the
/// records sorted by name. Checks still running at the timeout are reported
/// with status error.
std::vector<CheckRecord> run_checks(std::vector<CheckTask> tasks, const RunOptions& opts);

/// Report document: tool_version, command, inputs, status, and the checks.
nlohmann::json make_report(const std::string& command, const std::vector<std::string>& inputs,
                           const std::vector<CheckRecord>& records);
int exit_code_for(const std::vector<CheckRecord>& records);

/// Check tasks for one check name against one target (built-in name or a set
/// loaded from a file). check_name is one of orthogonality, redundancy,
/// protocol, upb, irreducibility, contrast, theorem1..theorem4.
struct Target {
    std::string name; // built-in name or file path
    StateSet set;
    std::optional<ProtocolTree> protocol;
};

CheckTask make_check(const std::string& check_name, const Target& target, const RunOptions& opts);
std::vector<CheckTask> full_suite(const RunOptions& opts);

nlohmann::json to_json(const IrreducibilityCertificate& c);
nlohmann::json to_json(const StrongIrreducibilityReport& r);
nlohmann::json to_json(const TheoremReport& r);
nlohmann::json to_json(const SimulationReport& r);
nlohmann::json to_json(const RedundancyReport& r);
nlohmann::json to_json(const UpbVerdict& v);
nlohmann::json to_json(const ProductState& s);

/// Removes every wall_time_ms field, recursively.
nlohmann::json strip_timing(nlohmann::json j);

} // namespace opset::cli

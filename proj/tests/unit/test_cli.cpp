#include "opset/cli.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <thread>

using namespace opset;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("opset_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("build writes the text format") {
    const auto r = run({"build", "g1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("psi3 | 0,1,-1 | 1,0,0,0,-1,0") != std::string::npos);
    CHECK(r.out.rfind("parties 3 6", 0) == 0);
    CHECK(run({"build", "strong:0,1,2"}).out.find("\n") != std::string::npos);
    CHECK(run({"build", "g9"}).code == cli::kUsageError);
    CHECK(run({"build", "strong:0,0,2"}).code == cli::kUsageError);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == cli::kUsageError);
    CHECK(run({"frobnicate"}).code == cli::kUsageError);
    CHECK(run({"verify"}).code == cli::kUsageError);
    CHECK(run({"verify", "nonsense"}).code == cli::kUsageError);
    CHECK(run({"verify", "upb", "tiles", "--threads", "0"}).code == cli::kUsageError);
    CHECK(run({"verify", "upb", "tiles", "--timeout-s", "-1"}).code == cli::kUsageError);
    CHECK(run({"verify", "orthogonality", "--set", "/nonexistent/file"}).code == cli::kUsageError);
    CHECK(run({"verify", "theorem1", "g1"}).code == cli::kUsageError);
}

TEST_CASE("verify with JSON on stdout") {
    const auto r = run({"verify", "upb", "tiles", "--json", "-"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["tool_version"] == cli::kToolVersion);
    CHECK(j["status"] == "pass");
    REQUIRE(j["checks"].size() == 1);
    CHECK(j["checks"][0]["check_name"] == "upb:tiles");
    CHECK(j["checks"][0].contains("wall_time_ms"));
    CHECK(r.err.find("PASS") != std::string::npos);
}

TEST_CASE("guard errors exit 2") {
    const auto r = run({"verify", "upb", "g3", "--json", "-"});
    CHECK(r.code == cli::kUsageError);
    CHECK(json::parse(r.out)["checks"][0]["status"] == "error");
}

TEST_CASE("protocol exit codes follow the branching policy") {
    CHECK(run({"verify", "protocol", "g1"}).code == 0);
    CHECK(run({"verify", "protocol", "g2"}).code == cli::kCheckFailure);
    CHECK(run({"verify", "protocol", "g2", "--allow-probabilistic"}).code == 0);
}

TEST_CASE("a corrupted set file names the offending pair") {
    const auto dir = scratch("corrupt");
    fs::create_directories(dir);
    const auto good = dir / "g1.txt";
    REQUIRE(run({"build", "g1", good.string()}).code == 0);
    CHECK(run({"verify", "orthogonality", "--set", good.string()}).code == 0);

    std::string text = slurp(good);
    const std::string from = "psi1 | 1,0,0 | 1,-1,0,0,1,-1";
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), "psi1 | 1,0,0 | 1,0,0,0,0,0");
    const auto bad = dir / "bad.txt";
    std::ofstream(bad, std::ios::binary) << text;
    const auto r = run({"verify", "orthogonality", "--set", bad.string(), "--json", "-"});
    CHECK(r.code == cli::kCheckFailure);
    const auto w = json::parse(r.out)["checks"][0]["witnesses"];
    bool named = false;
    for (const auto& x : w) named = named || (x["first"] == "psi1" && x["second"] == "psi5");
    CHECK(named);

    const auto garbled = dir / "garbled.txt";
    std::ofstream(garbled, std::ios::binary) << "parties 3 6\npsi1 | 1,0 | 1,0,0,0,0,0\n";
    const auto g = run({"verify", "orthogonality", "--set", garbled.string()});
    CHECK(g.code == cli::kUsageError);
    CHECK(g.err.find(":2") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("protocol file") {
    const auto dir = scratch("protocol");
    fs::create_directories(dir);
    const auto set = dir / "g1.txt";
    const auto proto = dir / "g1.proto";
    REQUIRE(run({"build", "g1", set.string()}).code == 0);
    std::ofstream(proto, std::ios::binary) << format_protocol(build_g1_protocol());
    CHECK(run({"verify", "protocol", "--set", set.string(), "--protocol", proto.string()}).code == 0);
    CHECK(run({"verify", "protocol", "--set", set.string()}).code == cli::kUsageError);
    fs::remove_all(dir);
}

TEST_CASE("JSON does not depend on the thread count") {
    const auto a = run({"verify", "redundancy", "--json", "-", "--threads", "1"});
    const auto b = run({"verify", "redundancy", "--json", "-", "--threads", "4"});
    CHECK(a.code == 0);
    CHECK(cli::strip_timing(json::parse(a.out)).dump() == cli::strip_timing(json::parse(b.out)).dump());
}

TEST_CASE("strip_timing removes nested timing fields") {
    json j{{"wall_time_ms", 3}, {"checks", {{{"wall_time_ms", 1.5}, {"x", 1}}}}};
    const auto s = cli::strip_timing(j);
    CHECK_FALSE(s.contains("wall_time_ms"));
    CHECK_FALSE(s["checks"][0].contains("wall_time_ms"));
    CHECK(s["checks"][0]["x"] == 1);
}

TEST_CASE("run_checks reports timeouts as errors") {
    std::vector<cli::CheckTask> tasks{{"quick", [] { return cli::CheckResult{cli::Status::Pass, json::array(), json::object(), "ok"}; }},
                                      {"slow", [] {
                                           std::this_thread::sleep_for(std::chrono::seconds(3));
                                           return cli::CheckResult{cli::Status::Pass, json::array(), json::object(), "late"};
                                       }}};
    cli::RunOptions opts;
    opts.timeout_s = 0.3;
    opts.threads = 2;
    const auto records = cli::run_checks(std::move(tasks), opts);
    REQUIRE(records.size() == 2);
    CHECK(records[0].name == "quick");
    CHECK(records[0].result.status == cli::Status::Pass);
    CHECK(records[1].result.status == cli::Status::Error);
    CHECK(cli::exit_code_for(records) == cli::kUsageError);
}

TEST_CASE("the executable") {
    const auto dir = scratch("exe");
    fs::create_directories(dir);
    const std::string tool = OPSET_TOOL_PATH;
    const auto out = dir / "tiles.json";
    const int rc = std::system((tool + " verify upb tiles --json " + out.string() + " > /dev/null").c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    CHECK(json::parse(slurp(out))["status"] == "pass");
    const int bad = std::system((tool + " verify upb nowhere > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(bad) == 2);
    fs::remove_all(dir);
}

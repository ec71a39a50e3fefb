#include "opset/cli.hpp"

#include "opset/errors.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace opset::cli {

using nlohmann::json;

std::string status_name(Status s) {
    switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Error: return "error";
    }
    return "error";
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json vec_json(const RVector& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
}

json vecs_json(const std::vector<RVector>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(vec_json(v));
    return a;
}

json match_json(const MatchResult& m, const StateSet& a, const StateSet& b) {
    json j{{"matched", m.matched}, {"verbatim", m.verbatim()}, {"reason", m.reason}};
    json pairs = json::array();
    for (std::size_t i = 0; i < m.bijection.size(); ++i)
        pairs.push_back({{"state", a[i].id}, {"target", b[m.bijection[i]].id}, {"scalar", m.scalars[i].get_str()}});
    j["bijection"] = pairs;
    return j;
}

} // namespace

json to_json(const ProductState& s) {
    json locals = json::array();
    for (const auto& v : s.locals) locals.push_back(vec_json(v));
    return {{"id", s.id}, {"locals", locals}};
}

json to_json(const IrreducibilityCertificate& c) {
    return {{"grouping", c.grouping_name},
            {"support_dims", c.support_dims},
            {"group_dim", c.group_dim},
            {"constraint_rows", c.constraint_rows},
            {"sym",
             {{"matrix_shape", {c.constraint_rows, c.sym_unknowns}},
              {"rank", c.sym_rank},
              {"dim", c.sym_dim},
              {"kernel", vecs_json(c.sym_kernel)}}},
            {"antisym",
             {{"matrix_shape", {c.constraint_rows, c.antisym_unknowns}},
              {"rank", c.antisym_rank},
              {"dim", c.antisym_dim},
              {"kernel", vecs_json(c.antisym_kernel)}}},
            {"identity_in_kernel", c.identity_in_kernel},
            {"verdict", c.verdict()}};
}

json to_json(const StrongIrreducibilityReport& r) {
    json certs = json::array();
    for (const auto& c : r.certificates) certs.push_back(to_json(c));
    return {{"certified", r.certified}, {"summary", r.summary}, {"certificates", certs}};
}

json to_json(const UpbVerdict& v) {
    json j{{"is_upb", v.is_upb}, {"search_nodes", v.search_nodes}};
    if (v.witness) {
        j["witness"] = to_json(*v.witness);
        j["assignment"] = v.assignment;
    }
    return j;
}

json to_json(const RedundancyReport& r) {
    json patterns = json::array();
    for (const auto& p : r.patterns) {
        json w = json::array();
        for (const auto& x : p.witnesses) w.push_back({x.first, x.second, x.overlap.get_str()});
        patterns.push_back({{"discarded", p.discarded_names}, {"witness_count", p.witnesses.size()}, {"witnesses", w}});
    }
    return {{"redundancy_free", r.redundancy_free}, {"patterns", patterns}};
}

json to_json(const SimulationReport& r) {
    json states = json::array();
    for (const auto& s : r.states)
        states.push_back({{"id", s.id}, {"paths", s.paths}, {"distinguished", s.distinguished}, {"reason", s.reason}});
    json nodes = json::array();
    for (const auto& n : r.nodes)
        nodes.push_back({{"path", n.path.empty() ? "root" : n.path},
                         {"party", n.party},
                         {"measure", n.measure_name},
                         {"candidates", n.candidates},
                         {"orthogonality_preserving", n.orthogonality_preserving},
                         {"deterministic", n.deterministic}});
    json leaves = json::array();
    for (const auto& l : r.leaves)
        leaves.push_back({{"path", l.path}, {"declared", l.declared}, {"computed", l.computed}, {"bookkeeping_ok", l.bookkeeping_ok}});
    json nondet = json::array();
    for (const auto& b : r.nondeterministic) nondet.push_back({{"state", b.state}, {"node", b.node_path}, {"outcomes", b.outcomes}});
    return {{"distinguished", r.distinguished},
            {"max_leaf_candidates", r.max_leaf_candidates},
            {"states", states},
            {"nodes", nodes},
            {"leaves", leaves},
            {"nondeterministic", nondet}};
}

json to_json(const TheoremReport& r) {
    json outcomes = json::array();
    for (const auto& o : r.outcomes) {
        json steps = json::array();
        for (const auto& s : o.steps)
            steps.push_back({{"party", s.party}, {"measure", s.measure_name}, {"orthogonality_preserving", s.orthogonality_preserving}});
        json j{{"label", o.label},
               {"steps", steps},
               {"input_states", o.input_states},
               {"output_states", o.output_states},
               {"annihilated", o.annihilated},
               {"deterministic", o.deterministic()},
               {"pairwise_orthogonal", o.pairwise_orthogonal},
               {"target", o.target},
               {"relabel", o.relabel},
               {"pass", o.pass}};
        const StateSet target = build_named(o.target);
        j["match"] = o.match.matched ? match_json(o.match, o.outcome_set, target)
                                     : json{{"matched", false}, {"reason", o.match.reason}};
        if (o.upb) j["upb"] = to_json(*o.upb);
        if (o.irreducibility) j["irreducibility"] = to_json(*o.irreducibility);
        outcomes.push_back(std::move(j));
    }
    return {{"theorem", r.theorem}, {"measurement", r.measurement}, {"pass", r.pass}, {"outcomes", outcomes}};
}

json strip_timing(json j) {
    if (j.is_object()) {
        j.erase("wall_time_ms");
        for (auto& [k, v] : j.items()) v = strip_timing(v);
    } else if (j.is_array()) {
        for (auto& v : j) v = strip_timing(v);
    }
    return j;
}

// ---------------------------------------------------------------------------
// Checks

namespace {

CheckResult from_bool(bool ok, std::string summary) {
    CheckResult r;
    r.status = ok ? Status::Pass : Status::Fail;
    r.summary = std::move(summary);
    return r;
}

CheckResult check_orthogonality_task(const Target& t) {
    const auto v = check_orthogonality(t.set);
    const std::size_t n = t.set.size();
    const std::size_t pairs = n * (n - 1) / 2;
    auto r = from_bool(v.empty(), v.empty() ? std::to_string(pairs) + " pairs orthogonal"
                                            : std::to_string(v.size()) + " non-orthogonal pairs, first (" + v[0].first +
                                                  ", " + v[0].second + ")");
    for (const auto& x : v) r.witnesses.push_back({{"first", x.first}, {"second", x.second}, {"overlap", x.overlap.get_str()}});
    r.certificate = {{"states", n}, {"pairs_checked", pairs}, {"violations", v.size()}};
    return r;
}

CheckResult check_redundancy_task(const Target& t) {
    const auto rep = check_local_redundancy(t.set);
    std::vector<std::string> open;
    for (const auto& p : rep.patterns) {
        if (p.orthogonality_preserved()) {
            std::string name;
            for (const auto& d : p.discarded_names) name += (name.empty() ? "" : "+") + d;
            open.push_back(name);
        }
    }
    auto r = from_bool(rep.redundancy_free,
                       rep.redundancy_free ? "every one of " + std::to_string(rep.patterns.size()) +
                                                 " discard patterns has a non-orthogonal reduced pair"
                                           : std::to_string(open.size()) + " discard pattern(s) keep orthogonality, first " +
                                                 open.front());
    const json full = to_json(rep);
    for (const auto& p : full["patterns"]) r.witnesses.push_back(p);
    r.certificate = {{"factors", all_factors(t.set.spec()).size()}, {"patterns", rep.patterns.size()}, {"redundancy_free", rep.redundancy_free}};
    return r;
}

CheckResult check_protocol_task(const Target& t, BranchingPolicy policy) {
    const ProtocolTree tree = t.protocol ? *t.protocol : builtin_protocol(t.name);
    const auto rep = simulate(t.set, tree, {policy});
    std::size_t ok = 0;
    for (const auto& s : rep.states) ok += s.distinguished;
    auto r = from_bool(rep.distinguished, std::to_string(ok) + "/" + std::to_string(rep.states.size()) +
                                              " states distinguished, max leaf " +
                                              std::to_string(rep.max_leaf_candidates) +
                                              (policy == BranchingPolicy::Probabilistic ? " (probabilistic branching)" : ""));
    for (const auto& s : rep.states)
        if (!s.distinguished) r.witnesses.push_back({{"state", s.id}, {"reason", s.reason}});
    for (const auto& b : rep.nondeterministic)
        r.witnesses.push_back({{"state", b.state}, {"node", b.node_path}, {"outcomes", b.outcomes}});
    r.certificate = to_json(rep);
    r.certificate["branching"] = policy == BranchingPolicy::Probabilistic ? "probabilistic" : "deterministic";
    return r;
}

CheckResult check_upb_task(const Target& t) {
    const auto v = check_upb(t.set);
    auto r = from_bool(v.is_upb, v.is_upb ? "no assignment leaves every party a proper subspace"
                                          : "extendible: orthogonal product witness found");
    if (v.witness) r.witnesses.push_back(to_json(*v.witness));
    r.certificate = to_json(v);
    return r;
}

CheckResult check_irreducibility_task(const Target& t, std::size_t threads) {
    const auto rep = certify_strong_irreducibility(t.set, threads);
    auto r = from_bool(rep.certified, rep.summary);
    for (const auto& c : rep.certificates)
        if (!c.trivial_only())
            r.witnesses.push_back({{"grouping", c.grouping_name}, {"sym_dim", c.sym_dim}, {"antisym_dim", c.antisym_dim}});
    r.certificate = to_json(rep);
    return r;
}

CheckResult check_contrast_task() {
    json certs = json::array();
    CheckResult r;
    bool ok = true;
    auto record = [&](const std::string& set_name, const StateSet& s, const IrreducibilityCertificate& c, bool expect_trivial) {
        json j = to_json(c);
        j["set"] = set_name;
        j["expected"] = expect_trivial ? "trivial-OPM-only" : "nontrivial-OPM-exists";
        if (!c.trivial_only()) {
            const auto m = materialize_nontrivial_opm(s, c);
            const bool good = m && m->nontrivial && m->orthogonality_preserving;
            j["materialized"] = {{"gershgorin_bound", m ? m->gershgorin_bound.get_str() : "none"},
                                 {"orthogonality_preserving", good}};
            if (!good) {
                ok = false;
                r.witnesses.push_back({{"set", set_name}, {"grouping", c.grouping_name}, {"reason", "materialized OPM fails"}});
            }
        }
        certs.push_back(std::move(j));
    };

    const StateSet g1 = build_g1();
    const auto g1b = opm_certificate(g1, {1});
    record("g1", g1, g1b, false);
    if (g1b.sym_dim < 2) {
        ok = false;
        r.witnesses.push_back({{"set", "g1"}, {"grouping", "B"}, {"reason", "sym_dim < 2"}});
    }

    const StateSet shifts = build_shifts_upb();
    const auto rep = certify_strong_irreducibility(shifts);
    bool some_pair_nontrivial = false;
    for (const auto& c : rep.certificates) {
        const bool single = c.grouping.size() == 1;
        record("shifts", shifts, c, single);
        if (single && !c.trivial_only()) {
            ok = false;
            r.witnesses.push_back({{"set", "shifts"}, {"grouping", c.grouping_name}, {"reason", "single party not trivial"}});
        }
        if (!single && !c.trivial_only()) some_pair_nontrivial = true;
    }
    if (!some_pair_nontrivial) {
        ok = false;
        r.witnesses.push_back({{"set", "shifts"}, {"reason", "no two-party grouping admits a nontrivial OPM"}});
    }
    r.status = ok ? Status::Pass : Status::Fail;
    r.summary = ok ? "g1 admits a nontrivial OPM on B; shifts trivial per party, nontrivial on a pair"
                   : "contrast expectations not met";
    r.certificate = {{"certificates", certs}};
    return r;
}

CheckResult check_theorem_task(const std::string& name, std::size_t threads) {
    TheoremReport rep;
    if (name == "theorem1") rep = verify_theorem1();
    else if (name == "theorem2") rep = verify_theorem2();
    else if (name == "theorem3") rep = verify_theorem3(threads);
    else rep = verify_theorem4(threads);
    std::size_t ok = 0;
    for (const auto& o : rep.outcomes) ok += o.pass;
    auto r = from_bool(rep.pass, std::to_string(ok) + "/" + std::to_string(rep.outcomes.size()) + " outcomes verified");
    for (const auto& o : rep.outcomes) {
        if (o.pass) continue;
        json w{{"outcome", o.label}};
        if (!o.deterministic()) w["annihilated"] = o.annihilated;
        if (!o.match.matched) w["match"] = o.match.reason;
        if (o.upb && !o.upb->is_upb) w["upb"] = "extendible";
        if (o.irreducibility && !o.irreducibility->certified) w["irreducibility"] = o.irreducibility->summary;
        r.witnesses.push_back(std::move(w));
    }
    r.certificate = to_json(rep);
    return r;
}

bool is_theorem(const std::string& name) {
    return name == "theorem1" || name == "theorem2" || name == "theorem3" || name == "theorem4";
}

Target builtin_target(const std::string& name) { return Target{name, build_named(name), std::nullopt}; }

} // namespace

CheckTask make_check(const std::string& check, const Target& target, const RunOptions& opts) {
    const std::string full = target.name.empty() ? check : check + ":" + target.name;
    if (check == "orthogonality") return {full, [target] { return check_orthogonality_task(target); }};
    if (check == "redundancy") return {full, [target] { return check_redundancy_task(target); }};
    if (check == "protocol") {
        const auto policy = opts.branching;
        return {full, [target, policy] { return check_protocol_task(target, policy); }};
    }
    if (check == "upb") return {full, [target] { return check_upb_task(target); }};
    if (check == "irreducibility") return {full, [target] { return check_irreducibility_task(target, 1); }};
    if (check == "contrast") return {check, [] { return check_contrast_task(); }};
    if (is_theorem(check)) return {check, [check] { return check_theorem_task(check, 1); }};
    throw std::invalid_argument("unknown check '" + check + "'");
}

namespace {

const std::vector<std::string> kCheckNames{"orthogonality", "redundancy", "protocol", "upb", "irreducibility",
                                           "contrast", "theorem1", "theorem2", "theorem3", "theorem4", "all"};

std::vector<std::string> default_targets(const std::string& check) {
    if (check == "orthogonality") return {"g1", "g2", "g3", "g4", "tiles", "shifts"};
    if (check == "redundancy" || check == "protocol") return {"g1", "g2", "g3", "g4"};
    if (check == "upb") return {"tiles", "shifts"};
    if (check == "irreducibility") return {"strong:0,1,2", "strong7:0,1,2"};
    return {};
}

} // namespace

std::vector<CheckTask> full_suite(const RunOptions& opts) {
    std::vector<CheckTask> tasks;
    for (const auto& check : {"orthogonality", "redundancy", "protocol", "upb", "irreducibility"})
        for (const auto& t : default_targets(check)) tasks.push_back(make_check(check, builtin_target(t), opts));
    tasks.push_back(make_check("contrast", {}, opts));
    for (const auto& th : {"theorem1", "theorem2", "theorem3", "theorem4"}) tasks.push_back(make_check(th, {}, opts));
    return tasks;
}

// ---------------------------------------------------------------------------
// Orchestration

std::vector<CheckRecord> run_checks(std::vector<CheckTask> tasks, const RunOptions& opts) {
    struct Shared {
        std::mutex mu;
        std::condition_variable cv;
        std::vector<CheckTask> tasks;
        std::vector<std::optional<CheckRecord>> done;
        std::size_t next = 0;
        std::size_t finished = 0;
    };
    auto sh = std::make_shared<Shared>();
    const std::size_t n = tasks.size();
    sh->tasks = std::move(tasks);
    sh->done.resize(n);

    auto worker = [sh, n] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(sh->mu);
                if (sh->next >= n) return;
                i = sh->next++;
            }
            CheckRecord rec{sh->tasks[i].name, {}, 0};
            const auto t0 = std::chrono::steady_clock::now();
            try {
                rec.result = sh->tasks[i].run();
            } catch (const std::exception& e) {
                rec.result.status = Status::Error;
                rec.result.summary = e.what();
            }
            rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            {
                std::lock_guard lock(sh->mu);
                sh->done[i] = std::move(rec);
                ++sh->finished;
            }
            sh->cv.notify_all();
        }
    };
    // Workers are detached so that a timed-out check cannot block the report.
    const std::size_t workers = std::max<std::size_t>(1, std::min(opts.threads, n));
    for (std::size_t w = 0; w < workers && n > 0; ++w) std::thread(worker).detach();

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(opts.timeout_s);
    std::vector<CheckRecord> out;
    {
        std::unique_lock lock(sh->mu);
        sh->cv.wait_until(lock, deadline, [&] { return sh->finished == n; });
        for (std::size_t i = 0; i < n; ++i) {
            if (sh->done[i]) {
                out.push_back(*sh->done[i]);
            } else {
                CheckRecord rec{sh->tasks[i].name, {}, opts.timeout_s * 1000};
                rec.result.status = Status::Error;
                rec.result.summary = "timed out after " + std::to_string(static_cast<long long>(opts.timeout_s)) + " s";
                out.push_back(std::move(rec));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

int exit_code_for(const std::vector<CheckRecord>& records) {
    int code = kAllPass;
    for (const auto& r : records) {
        if (r.result.status == Status::Error) code = kUsageError;
        else if (r.result.status == Status::Fail && code == kAllPass) code = kCheckFailure;
    }
    return code;
}

namespace {

std::string overall_status(const std::vector<CheckRecord>& records) {
    switch (exit_code_for(records)) {
    case kAllPass: return "pass";
    case kCheckFailure: return "fail";
    default: return "error";
    }
}

json check_json(const CheckRecord& r) {
    return {{"check_name", r.name},
            {"status", status_name(r.result.status)},
            {"summary", r.result.summary},
            {"witnesses", r.result.witnesses},
            {"certificate", r.result.certificate},
            {"wall_time_ms", std::round(r.wall_time_ms * 1000) / 1000}};
}

} // namespace

json make_report(const std::string& command, const std::vector<std::string>& inputs, const std::vector<CheckRecord>& records) {
    json checks = json::array();
    for (const auto& r : records) checks.push_back(check_json(r));
    return {{"tool_version", kToolVersion}, {"command", command}, {"inputs", inputs},
            {"status", overall_status(records)}, {"checks", checks}};
}

// ---------------------------------------------------------------------------
// Command line

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

StateSet load_set_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open set file " + path);
    try {
        return read_state_set(in);
    } catch (const ParseError& e) {
        throw UsageError(path + ":" + std::to_string(e.line()) + ": " + e.what());
    } catch (const std::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const json& j, const std::string& path, std::ostream& out) {
    const std::string text = j.dump(2) + "\n";
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
}

void print_human(const std::vector<CheckRecord>& records, std::ostream& os) {
    std::size_t pass = 0, fail = 0, error = 0;
    for (const auto& r : records) {
        std::string tag = r.result.status == Status::Pass ? "PASS " : r.result.status == Status::Fail ? "FAIL " : "ERROR";
        os << tag << " " << r.name << ": " << r.result.summary << " [" << std::fixed << std::setprecision(1)
           << r.wall_time_ms << " ms]\n";
        (r.result.status == Status::Pass ? pass : r.result.status == Status::Fail ? fail : error)++;
    }
    os << records.size() << " checks: " << pass << " pass, " << fail << " fail, " << error << " error\n";
}

std::string file_name_for(const std::string& check) {
    std::string out;
    for (char c : check) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
    return out + ".json";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact verification of orthogonal product-state sets", "opset"};
    app.require_subcommand(1);

    std::string json_path;
    std::string set_file;
    std::string protocol_file;
    RunOptions opts;
    bool probabilistic = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--json", json_path, "Write the JSON report to a file, or '-' for stdout");
        sub->add_option("--timeout-s", opts.timeout_s, "Time budget for the whole command in seconds")
            ->default_val(600)
            ->check(CLI::PositiveNumber);
        sub->add_option("--threads", opts.threads, "Run up to this many independent checks at once")
            ->default_val(1)
            ->check(CLI::PositiveNumber);
    };

    std::string build_name, build_out = "-";
    auto* build = app.add_subcommand("build", "Write a built-in state set in the text format");
    build->add_option("set", build_name, "g1 g2 g3 g4 tiles shifts strong:p,q,r strong:a/b/c strong7:p,q,r")->required();
    build->add_option("out", build_out, "Output path ('-' for stdout)");

    std::string check_name;
    std::vector<std::string> targets;
    auto* verify = app.add_subcommand("verify", "Run one verification");
    verify->add_option("check", check_name, "Check to run")->required()->check(CLI::IsMember(kCheckNames));
    verify->add_option("targets", targets, "Built-in set names");
    verify->add_option("--set", set_file, "State-set file to check instead of a built-in set");
    verify->add_option("--protocol", protocol_file, "Protocol file for the protocol check");
    verify->add_flag("--allow-probabilistic", probabilistic,
                     "Follow states with support in several outcomes down every branch");
    add_common(verify);

    std::string out_dir;
    auto* report_all = app.add_subcommand("report-all", "Run the full suite and write one JSON per check");
    report_all->add_option("out_dir", out_dir, "Output directory")->required();
    report_all->add_option("--set", set_file, "Additional state-set file to check");
    report_all->add_flag("--allow-probabilistic", probabilistic,
                         "Follow states with support in several outcomes down every branch");
    add_common(report_all);

    std::vector<std::string> argv_store{"opset"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }
    if (probabilistic) opts.branching = BranchingPolicy::Probabilistic;

    try {
        if (*build) {
            const StateSet s = build_named(build_name);
            if (build_out == "-") {
                write_state_set(out, s);
            } else {
                std::ofstream f(build_out, std::ios::binary);
                if (!f) throw UsageError("cannot write " + build_out);
                write_state_set(f, s);
            }
            return kAllPass;
        }

        std::ostream& human = json_path == "-" ? err : out;

        if (*verify) {
            std::vector<CheckTask> tasks;
            std::vector<std::string> inputs;
            std::vector<Target> resolved;
            if (!set_file.empty()) {
                Target t{set_file, load_set_file(set_file), std::nullopt};
                if (!protocol_file.empty()) {
                    try {
                        t.protocol = parse_protocol(t.set.spec(), read_file(protocol_file));
                    } catch (const ParseError& e) {
                        throw UsageError(protocol_file + ":" + std::to_string(e.line()) + ": " + e.what());
                    } catch (const MalformedTree& e) {
                        throw UsageError(protocol_file + ": " + e.what());
                    }
                    inputs.push_back(protocol_file);
                }
                resolved.push_back(std::move(t));
            }
            for (const auto& name : targets) resolved.push_back(builtin_target(name));

            if (is_theorem(check_name) || check_name == "contrast") {
                if (!resolved.empty()) throw UsageError(check_name + " takes no set argument");
                tasks.push_back(make_check(check_name, {}, opts));
            } else if (check_name == "all") {
                if (resolved.empty()) {
                    tasks = full_suite(opts);
                } else {
                    for (const auto& t : resolved) {
                        tasks.push_back(make_check("orthogonality", t, opts));
                        tasks.push_back(make_check("redundancy", t, opts));
                        if (t.protocol || (t.name.size() == 2 && t.name[0] == 'g'))
                            tasks.push_back(make_check("protocol", t, opts));
                    }
                }
            } else {
                if (resolved.empty())
                    for (const auto& name : default_targets(check_name)) resolved.push_back(builtin_target(name));
                if (check_name == "protocol")
                    for (const auto& t : resolved)
                        if (!t.protocol && t.name == set_file) throw UsageError("protocol check on a set file needs --protocol");
                for (const auto& t : resolved) tasks.push_back(make_check(check_name, t, opts));
            }
            for (const auto& t : resolved) inputs.push_back(t.name);

            std::string command = "verify " + check_name;
            for (const auto& t : targets) command += " " + t;
            const auto records = run_checks(std::move(tasks), opts);
            print_human(records, human);
            if (!json_path.empty()) write_json(make_report(command, inputs, records), json_path, out);
            return exit_code_for(records);
        }

        if (*report_all) {
            auto tasks = full_suite(opts);
            std::vector<std::string> inputs;
            for (const auto& t : tasks) inputs.push_back(t.name);
            if (!set_file.empty()) {
                Target t{set_file, load_set_file(set_file), std::nullopt};
                tasks.push_back(make_check("orthogonality", t, opts));
                tasks.push_back(make_check("redundancy", t, opts));
                inputs.push_back(set_file);
            }
            std::sort(inputs.begin(), inputs.end());
            const auto records = run_checks(std::move(tasks), opts);

            std::filesystem::create_directories(out_dir);
            json summary_checks = json::array();
            for (const auto& r : records) {
                const std::string file = file_name_for(r.name);
                write_json(make_report("report-all", {r.name}, {r}), (std::filesystem::path(out_dir) / file).string(), out);
                summary_checks.push_back({{"check_name", r.name},
                                          {"status", status_name(r.result.status)},
                                          {"summary", r.result.summary},
                                          {"file", file},
                                          {"wall_time_ms", std::round(r.wall_time_ms * 1000) / 1000}});
            }
            json summary{{"tool_version", kToolVersion}, {"command", "report-all"}, {"inputs", inputs},
                         {"status", overall_status(records)}, {"checks", summary_checks}};
            write_json(summary, (std::filesystem::path(out_dir) / "summary.json").string(), out);
            print_human(records, human);
            if (!json_path.empty()) write_json(summary, json_path, out);
            return exit_code_for(records);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

} // namespace opset::cli

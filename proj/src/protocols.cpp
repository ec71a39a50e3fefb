#include "opset/protocols.hpp"

#include "opset/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace opset {

ProtocolTree ProtocolTree::leaf(std::vector<std::string> candidates) {
    ProtocolTree t;
    t.nodes_.emplace_back(ProtocolLeaf{std::move(candidates)});
    return t;
}

ProtocolTree ProtocolTree::split(std::size_t party, std::string measure_name, Measurement m,
                                 std::vector<std::pair<std::string, ProtocolTree>> children) {
    ProtocolTree t;
    t.nodes_.emplace_back(ProtocolSplit{party, std::move(measure_name), std::move(m), {}});
    std::vector<std::pair<std::string, std::size_t>> links;
    for (auto& [label, child] : children) {
        const std::size_t offset = t.nodes_.size();
        for (auto& n : child.nodes_) {
            if (auto* s = std::get_if<ProtocolSplit>(&n)) {
                for (auto& c : s->children) c.second += offset;
            }
            t.nodes_.push_back(std::move(n));
        }
        links.emplace_back(label, offset);
    }
    std::get<ProtocolSplit>(t.nodes_[0]).children = std::move(links);
    return t;
}

void ProtocolTree::validate(const PartySpec& spec) const {
    if (nodes_.empty()) throw MalformedTree("empty protocol tree");
    for (const auto& n : nodes_) {
        const auto* s = std::get_if<ProtocolSplit>(&n);
        if (!s) continue;
        const std::string where = "node " + s->measure_name + ": ";
        if (s->party >= spec.party_count()) throw MalformedTree(where + "acting party out of range");
        if (s->measurement.target() != std::vector<std::size_t>{s->party})
            throw MalformedTree(where + "measurement does not act on the acting party alone");
        if (s->measurement.target_dim() != spec.dim(s->party))
            throw MalformedTree(where + "measurement dimension differs from party dimension");
        if (!check_completeness(s->measurement)) throw MalformedTree(where + "measurement is not complete");
        std::set<std::string> labels;
        for (const auto& o : s->measurement.outcomes()) labels.insert(o.label);
        std::set<std::string> branches;
        for (const auto& [label, idx] : s->children) {
            if (!branches.insert(label).second) throw MalformedTree(where + "duplicate branch " + label);
            if (idx >= nodes_.size()) throw MalformedTree(where + "dangling branch " + label);
        }
        if (labels != branches) throw MalformedTree(where + "branches do not match measurement outcomes");
    }
}

const StateReport& SimulationReport::state(const std::string& id) const {
    for (const auto& s : states)
        if (s.id == id) return s;
    throw StructuralError("SimulationReport: no state " + id);
}

namespace {

std::string where(const std::string& path) { return path.empty() ? std::string("root") : path; }

std::vector<std::string> ids_of(const std::vector<ProductState>& states) {
    std::vector<std::string> out;
    for (const auto& s : states) out.push_back(s.id);
    return out;
}

struct Walker {
    const StateSet& set;
    const ProtocolTree& tree;
    const SimulationOptions& opts;
    SimulationReport report;
    std::map<std::string, std::string> failure;         // first failure reason per state
    std::map<std::string, std::vector<std::string>> paths;

    void fail(const std::string& id, const std::string& why) { failure.emplace(id, why); }

    void visit(std::size_t idx, const std::vector<ProductState>& current, const std::string& path) {
        const auto& node = tree.node(idx);
        if (const auto* leaf = std::get_if<ProtocolLeaf>(&node)) {
            LeafReport lr{path, leaf->candidates, ids_of(current), true};
            const std::set<std::string> declared(leaf->candidates.begin(), leaf->candidates.end());
            const std::set<std::string> computed(lr.computed.begin(), lr.computed.end());
            lr.bookkeeping_ok = declared == computed && declared.size() == leaf->candidates.size();
            report.max_leaf_candidates = std::max(report.max_leaf_candidates, computed.size());
            for (const auto& id : lr.computed) {
                paths[id].push_back(path);
                if (!lr.bookkeeping_ok) fail(id, "leaf " + where(path) + " declares a different candidate set");
                if (computed.size() > 2) fail(id, "leaf " + where(path) + " has more than two candidates");
            }
            report.leaves.push_back(std::move(lr));
            return;
        }
        const auto& split = std::get<ProtocolSplit>(node);
        const auto& m = split.measurement;
        NodeReport nr{path, party_name(split.party), split.measure_name, ids_of(current), true, true};
        nr.orthogonality_preserving = is_orthogonality_preserving(StateSet(set.spec(), current), m);
        if (!nr.orthogonality_preserving) {
            for (const auto& s : current) fail(s.id, "node " + where(path) + " is not orthogonality-preserving");
        }

        std::vector<std::vector<ProductState>> branches(m.outcome_count());
        const auto& p = split.party;
        for (const auto& s : current) {
            std::vector<std::size_t> hits;
            for (std::size_t k = 0; k < m.outcome_count(); ++k)
                if (has_support(s, m, k)) hits.push_back(k);
            if (hits.size() > 1) {
                nr.deterministic = false;
                NondeterministicBranch nb{s.id, where(path), {}};
                for (auto k : hits) nb.outcomes.push_back(m.outcomes()[k].label);
                report.nondeterministic.push_back(std::move(nb));
                if (opts.branching == BranchingPolicy::Deterministic)
                    fail(s.id, "state has support in several outcomes at node " + where(path));
            }
            for (auto k : hits) {
                ProductState next = s;
                if (hits.size() > 1) next.locals[p] = primitive_integer(m.projector(k).entries * s.locals[p]);
                branches[k].push_back(std::move(next));
            }
        }
        report.nodes.push_back(std::move(nr));

        for (const auto& [label, child] : split.children) {
            const std::size_t k = m.outcome_index(label);
            std::string child_path = path.empty() ? "" : path + " / ";
            child_path += party_name(p) + ":" + split.measure_name + "=" + label;
            visit(child, branches[k], child_path);
        }
    }
};

} // namespace

SimulationReport simulate(const StateSet& s, const ProtocolTree& t, const SimulationOptions& opts) {
    t.validate(s.spec());
    Walker w{s, t, opts, {}, {}, {}};
    w.visit(0, s.states(), "");
    bool all = true;
    for (const auto& st : s.states()) {
        StateReport r{st.id, w.paths[st.id], false, {}};
        if (auto it = w.failure.find(st.id); it != w.failure.end()) {
            r.reason = it->second;
        } else if (r.paths.empty()) {
            r.reason = "no leaf reached";
        } else {
            r.distinguished = true;
        }
        all = all && r.distinguished;
        w.report.states.push_back(std::move(r));
    }
    w.report.distinguished = all;
    return std::move(w.report);
}

namespace {

Measurement local(std::size_t party, std::size_t dim, std::vector<std::pair<std::string, std::vector<std::string>>> spans,
                  const std::string& complement_label = {}) {
    std::vector<OutcomeSpec> outcomes;
    for (auto& [label, exprs] : spans) {
        OutcomeSpec o{label, {}, false};
        for (const auto& e : exprs) o.span.push_back(ket(dim, e));
        outcomes.push_back(std::move(o));
    }
    if (!complement_label.empty()) outcomes.push_back({complement_label, {}, true});
    return Measurement({party}, dim, std::move(outcomes));
}

using Branches = std::vector<std::pair<std::string, ProtocolTree>>;

ProtocolTree leaf(std::vector<std::string> ids) { return ProtocolTree::leaf(std::move(ids)); }

Measurement g3_m1(std::size_t party) {
    return local(party, 6, {{"P1", {"0-4"}}, {"P2", {"1-5"}}, {"P3", {"2-3"}}}, "P4");
}
Measurement g3_m2(std::size_t party) { return local(party, 6, {{"Q1", {"0+1+4+5"}}, {"Q2", {"0-1+4-5"}}}, "Q3"); }
Measurement g3_m3(std::size_t party) { return local(party, 6, {{"R1", {"0+2+4+3"}}, {"R2", {"0-2+4-3"}}}, "R3"); }

// Outcome index holding all of s, or outcome_count() when s is spread out.
std::size_t sole_outcome(const ProductState& s, const Measurement& m) {
    std::size_t found = m.outcome_count();
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        if (!has_support(s, m, k)) continue;
        if (found != m.outcome_count()) return m.outcome_count();
        found = k;
    }
    return found;
}

// Alice, Bob, Charlie apply M1 in turn; a remaining two-state candidate set is
// resolved with M2 or M3 on the party where the two states differ.
ProtocolTree g3_subtree(const StateSet& set, const std::vector<std::size_t>& cands, std::size_t next_party) {
    std::vector<std::string> ids;
    for (auto i : cands) ids.push_back(set[i].id);
    if (cands.size() <= 1) return leaf(ids);

    if (cands.size() == 2) {
        const auto& a = set[cands[0]];
        const auto& b = set[cands[1]];
        for (std::size_t party = 0; party < 3; ++party) {
            if (sgn(proportionality(a.locals[party], b.locals[party])) != 0) continue;
            for (int which = 2; which <= 3; ++which) {
                const Measurement m = which == 2 ? g3_m2(party) : g3_m3(party);
                const auto ka = sole_outcome(a, m);
                const auto kb = sole_outcome(b, m);
                if (ka == m.outcome_count() || kb == m.outcome_count() || ka == kb) continue;
                Branches br;
                for (std::size_t k = 0; k < m.outcome_count(); ++k) {
                    std::vector<std::string> at;
                    if (k == ka) at.push_back(a.id);
                    if (k == kb) at.push_back(b.id);
                    br.emplace_back(m.outcomes()[k].label, leaf(at));
                }
                return ProtocolTree::split(party, "M" + std::to_string(which) + "_" + party_name(party), m, std::move(br));
            }
        }
        return leaf(ids);
    }
    if (next_party >= 3) return leaf(ids);

    const Measurement m = g3_m1(next_party);
    Branches br;
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        std::vector<std::size_t> sub;
        for (auto i : cands)
            if (has_support(set[i], m, k)) sub.push_back(i);
        br.emplace_back(m.outcomes()[k].label, g3_subtree(set, sub, next_party + 1));
    }
    return ProtocolTree::split(next_party, "M1_" + party_name(next_party), m, std::move(br));
}

} // namespace

ProtocolTree build_g1_protocol() {
    constexpr std::size_t B = 1;
    auto n = local(B, 6, {{"N1", {"0-4"}}, {"N2", {"2-3"}}, {"N3", {"0+1+2+3+4+5"}}}, "N4");
    return ProtocolTree::split(B, "N_B", std::move(n),
                               {{"N1", leaf({"psi3"})},
                                {"N2", leaf({"psi4"})},
                                {"N3", leaf({"psi5"})},
                                {"N4", leaf({"psi1", "psi2"})}});
}

ProtocolTree build_g2_protocol() {
    constexpr std::size_t C = 2;
    auto k = local(C, 4, {{"K1", {"0+3"}}, {"K2", {"0-3"}}, {"K3", {"1+2"}}, {"K4", {"1-2"}}});
    return ProtocolTree::split(C, "K_C", std::move(k),
                               {{"K1", leaf({"phi2", "phi4"})},
                                {"K2", leaf({"phi3"})},
                                {"K3", leaf({"phi1", "phi4"})},
                                {"K4", leaf({"phi3"})}});
}

ProtocolTree build_g3_protocol() {
    const StateSet g3 = build_g3();
    std::vector<std::size_t> all(g3.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return g3_subtree(g3, all, 0);
}

ProtocolTree build_g4_protocol() {
    constexpr std::size_t A = 0, B = 1, C = 2;
    auto m1c = local(C, 6, {{"P1", {"0-4"}}, {"P2", {"1-5"}}, {"P3", {"2-3"}}}, "P4");
    auto m1a = local(A, 3, {{"P1", {"0"}}, {"P2", {"1"}}, {"P3", {"2"}}});
    auto m1b = local(B, 3, {{"P1", {"0", "1"}}, {"P2", {"2"}}});
    auto m2a = local(A, 3, {{"Q1", {"0", "1"}}, {"Q2", {"2"}}});
    auto m2b = local(B, 3, {{"Q1", {"0"}}, {"Q2", {"1"}}, {"Q3", {"2"}}});
    auto m3b = local(B, 3, {{"T1", {"0", "2"}}, {"T2", {"1"}}});
    auto m2a_r = local(A, 3, {{"R1", {"0", "2"}}, {"R2", {"1"}}});
    auto m4b = local(B, 3, {{"N1", {"0"}}, {"N2", {"1"}}, {"N3", {"2"}}});
    auto m3a = local(A, 3, {{"T1", {"0"}}, {"T2", {"1"}}, {"T3", {"2"}}});
    auto m5b = local(B, 3, {{"L1", {"0"}}, {"L2", {"1"}}, {"L3", {"2"}}});

    auto p1 = ProtocolTree::split(A, "M1A", m1a,
                                  {{"P1", leaf({"zeta5"})},
                                   {"P2", leaf({"zeta6+", "zeta6-"})},
                                   {"P3", leaf({"zeta7+", "zeta7-"})}});

    auto p2_q1 = ProtocolTree::split(B, "M2B", m2b,
                                     {{"Q1", leaf({"zeta11+", "zeta11-"})}, {"Q2", leaf({"zeta10"})}, {"Q3", leaf({})}});
    auto p2_p1 = ProtocolTree::split(A, "M2A", m2a, {{"Q1", std::move(p2_q1)}, {"Q2", leaf({"zeta8+", "zeta8-"})}});
    auto p2 = ProtocolTree::split(B, "M1B", m1b, {{"P1", std::move(p2_p1)}, {"P2", leaf({"zeta14+", "zeta14-"})}});

    auto p3_r1 = ProtocolTree::split(B, "M4B", m4b,
                                     {{"N1", leaf({"zeta12+", "zeta12-"})}, {"N2", leaf({})}, {"N3", leaf({"zeta15"})}});
    auto p3_t1 = ProtocolTree::split(A, "M2A_R", m2a_r, {{"R1", std::move(p3_r1)}, {"R2", leaf({"zeta9+", "zeta9-"})}});
    auto p3 = ProtocolTree::split(B, "M3B", m3b, {{"T1", std::move(p3_t1)}, {"T2", leaf({"zeta13+", "zeta13-"})}});

    auto p4_t1 = ProtocolTree::split(B, "M5B", m5b,
                                     {{"L1", leaf({})}, {"L2", leaf({"zeta1+", "zeta1-"})}, {"L3", leaf({"zeta2+", "zeta2-"})}});
    auto p4 = ProtocolTree::split(A, "M3A", m3a,
                                  {{"T1", std::move(p4_t1)},
                                   {"T2", leaf({"zeta3+", "zeta3-"})},
                                   {"T3", leaf({"zeta4+", "zeta4-"})}});

    return ProtocolTree::split(C, "M1C", m1c,
                               {{"P1", std::move(p1)}, {"P2", std::move(p2)}, {"P3", std::move(p3)}, {"P4", std::move(p4)}});
}

ProtocolTree builtin_protocol(const std::string& set_name) {
    if (set_name == "g1") return build_g1_protocol();
    if (set_name == "g2") return build_g2_protocol();
    if (set_name == "g3") return build_g3_protocol();
    if (set_name == "g4") return build_g4_protocol();
    throw std::invalid_argument("no built-in protocol for '" + set_name + "'");
}

// ---------------------------------------------------------------------------
// Text format

namespace {

void collect_measures(const ProtocolTree& t, std::vector<std::pair<std::string, const Measurement*>>& out) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto* s = std::get_if<ProtocolSplit>(&t.node(i));
        if (!s) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == s->measure_name; });
        if (it == out.end()) {
            out.emplace_back(s->measure_name, &s->measurement);
        } else if (format_measurement(*it->second) != format_measurement(s->measurement)) {
            throw MalformedTree("measurement name " + s->measure_name + " used for different measurements");
        }
    }
}

void write_node(std::ostream& out, const ProtocolTree& t, std::size_t idx, int indent) {
    const auto& n = t.node(idx);
    if (const auto* leaf = std::get_if<ProtocolLeaf>(&n)) {
        out << "leaf{";
        for (std::size_t i = 0; i < leaf->candidates.size(); ++i) out << (i ? "," : "") << leaf->candidates[i];
        out << "}";
        return;
    }
    const auto& s = std::get<ProtocolSplit>(n);
    out << "node party=" << party_name(s.party) << " measure=" << s.measure_name << " {\n";
    for (std::size_t i = 0; i < s.children.size(); ++i) {
        out << std::string(indent + 2, ' ') << s.children[i].first << " -> ";
        write_node(out, t, s.children[i].second, indent + 2);
        out << (i + 1 < s.children.size() ? ",\n" : "\n");
    }
    out << std::string(indent, ' ') << "}";
}

class Lexer {
public:
    explicit Lexer(std::string text) : text_(std::move(text)) {}

    // Returns "" at end of input.
    std::string next() {
        skip();
        if (pos_ >= text_.size()) return {};
        const char c = text_[pos_];
        if (c == '{' || c == '}' || c == ',' || c == '=') {
            ++pos_;
            return std::string(1, c);
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            pos_ += 2;
            return "->";
        }
        std::string word;
        while (pos_ < text_.size()) {
            const char d = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(d)) || d == '{' || d == '}' || d == ',' || d == '=') break;
            if (d == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') break;
            word += d;
            ++pos_;
        }
        return word;
    }

    std::string peek() {
        const auto save = pos_;
        auto t = next();
        pos_ = save;
        return t;
    }

    void expect(const std::string& tok) {
        const auto t = next();
        if (t != tok) throw ParseError(line(), "expected '" + tok + "' but found '" + t + "'");
    }

    std::size_t line() const { return base_line_ + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + pos_, '\n')); }
    void set_base_line(std::size_t l) { base_line_ = l; }

private:
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    std::string text_;
    std::size_t pos_ = 0;
    std::size_t base_line_ = 1;
};

std::string key_value(Lexer& lx, const std::string& key) {
    lx.expect(key);
    lx.expect("=");
    return lx.next();
}

ProtocolTree parse_node(Lexer& lx, const PartySpec& spec, const std::map<std::string, std::string>& measures) {
    const auto head = lx.next();
    if (head == "leaf") {
        lx.expect("{");
        std::vector<std::string> ids;
        if (lx.peek() == "}") {
            lx.next();
            return ProtocolTree::leaf(ids);
        }
        while (true) {
            ids.push_back(lx.next());
            const auto sep = lx.next();
            if (sep == "}") break;
            if (sep != ",") throw ParseError(lx.line(), "expected ',' or '}' in leaf");
        }
        return ProtocolTree::leaf(std::move(ids));
    }
    if (head != "node") throw ParseError(lx.line(), "expected 'node' or 'leaf' but found '" + head + "'");
    std::size_t party = 0;
    try {
        party = parse_party_name(key_value(lx, "party"));
    } catch (const StructuralError& e) {
        throw ParseError(lx.line(), e.what());
    }
    const auto name = key_value(lx, "measure");
    auto it = measures.find(name);
    if (it == measures.end()) throw ParseError(lx.line(), "undefined measurement " + name);
    Measurement m = parse_measurement(spec, it->second);
    lx.expect("{");
    std::vector<std::pair<std::string, ProtocolTree>> children;
    while (true) {
        const auto label = lx.next();
        lx.expect("->");
        children.emplace_back(label, parse_node(lx, spec, measures));
        const auto sep = lx.next();
        if (sep == "}") break;
        if (sep != ",") throw ParseError(lx.line(), "expected ',' or '}' after branch " + label);
    }
    return ProtocolTree::split(party, name, std::move(m), std::move(children));
}

} // namespace

std::string format_protocol(const ProtocolTree& t) {
    std::vector<std::pair<std::string, const Measurement*>> measures;
    collect_measures(t, measures);
    std::ostringstream out;
    for (const auto& [name, m] : measures) out << "measure " << name << " = " << format_measurement(*m) << '\n';
    write_node(out, t, 0, 0);
    out << '\n';
    return out.str();
}

ProtocolTree parse_protocol(const PartySpec& spec, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<std::string, std::string> measures;
    std::string tree_text;
    std::size_t lineno = 0;
    std::size_t tree_start = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b != std::string::npos && line[b] == '#') {
            if (tree_start) tree_text += '\n';
            continue;
        }
        if (!tree_start && b != std::string::npos && line.compare(b, 8, "measure ") == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(lineno, "measure line needs '='");
            std::istringstream name_in(line.substr(b + 8, eq - b - 8));
            std::string name;
            name_in >> name;
            if (name.empty()) throw ParseError(lineno, "measure line needs a name");
            if (!measures.emplace(name, line.substr(eq + 1)).second) throw ParseError(lineno, "duplicate measure " + name);
            continue;
        }
        if (!tree_start && b == std::string::npos) continue;
        if (!tree_start) tree_start = lineno;
        tree_text += line + '\n';
    }
    if (!tree_start) throw ParseError(lineno, "no protocol tree");
    Lexer lx(tree_text);
    lx.set_base_line(tree_start);
    auto tree = parse_node(lx, spec, measures);
    if (!lx.peek().empty()) throw ParseError(lx.line(), "trailing input after protocol tree");
    tree.validate(spec);
    return tree;
}

} // namespace opset

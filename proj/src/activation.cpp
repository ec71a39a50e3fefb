#include "opset/activation.hpp"

#include "opset/errors.hpp"

#include <algorithm>
#include <future>
#include <sstream>

namespace opset {

// ---------------------------------------------------------------------------
// Relabeling

RelabelingMap& RelabelingMap::set(std::size_t party, std::size_t target_dim, std::map<std::size_t, std::size_t> index) {
    std::vector<bool> used(target_dim, false);
    for (const auto& [from, to] : index) {
        if (to >= target_dim) throw RelabelError("relabel target index " + std::to_string(to) + " out of range");
        if (used[to]) throw RelabelError("relabel map is not injective on party " + party_name(party));
        used[to] = true;
    }
    if (parties_.size() <= party) parties_.resize(party + 1);
    parties_[party] = PartyMap{target_dim, std::move(index)};
    return *this;
}

const std::optional<RelabelingMap::PartyMap>& RelabelingMap::party(std::size_t p) const {
    static const std::optional<PartyMap> none;
    return p < parties_.size() ? parties_[p] : none;
}

ProductState RelabelingMap::apply(const ProductState& s) const {
    ProductState out = s;
    for (std::size_t p = 0; p < s.locals.size(); ++p) {
        const auto& pm = party(p);
        if (!pm) continue;
        RVector v(pm->target_dim);
        for (std::size_t i = 0; i < s.locals[p].size(); ++i) {
            if (sgn(s.locals[p][i]) == 0) continue;
            auto it = pm->index.find(i);
            if (it == pm->index.end()) {
                throw RelabelError("state " + s.id + " has support on index " + std::to_string(i) + " of party " +
                                   party_name(p) + " outside the relabeling domain");
            }
            v[it->second] = s.locals[p][i];
        }
        out.locals[p] = std::move(v);
    }
    return out;
}

StateSet RelabelingMap::apply(const StateSet& s) const {
    const auto& spec = s.spec();
    if (parties_.size() > spec.party_count()) throw RelabelError("relabeling names more parties than the set has");
    std::vector<std::size_t> dims = spec.dims();
    auto factors = spec.factorizations();
    for (std::size_t p = 0; p < spec.party_count(); ++p) {
        if (const auto& pm = party(p)) {
            dims[p] = pm->target_dim;
            factors[p].clear();
        }
    }
    std::vector<ProductState> states;
    for (const auto& st : s.states()) states.push_back(apply(st));
    return StateSet(PartySpec(dims, factors), std::move(states));
}

std::string RelabelingMap::describe() const {
    std::ostringstream out;
    bool first = true;
    for (std::size_t p = 0; p < parties_.size(); ++p) {
        if (!parties_[p]) continue;
        out << (first ? "" : "; ") << party_name(p) << ": ";
        first = false;
        bool inner = true;
        for (const auto& [from, to] : parties_[p]->index) {
            out << (inner ? "" : ",") << from << "->" << to;
            inner = false;
        }
        out << " (dim " << parties_[p]->target_dim << ")";
    }
    return first ? "none" : out.str();
}

// ---------------------------------------------------------------------------
// Matching

bool MatchResult::verbatim() const {
    if (!matched) return false;
    for (std::size_t i = 0; i < bijection.size(); ++i)
        if (bijection[i] != i || scalars[i] != 1) return false;
    return true;
}

namespace {

// a = ratio * b as full tensors, or 0 when not proportional.
Rational state_ratio(const ProductState& a, const ProductState& b) {
    Rational r = 1;
    for (std::size_t p = 0; p < a.locals.size(); ++p) {
        const Rational c = proportionality(a.locals[p], b.locals[p]);
        if (sgn(c) == 0) return 0;
        r *= c;
    }
    return r;
}

bool assign(std::size_t i, const std::vector<std::vector<std::size_t>>& cand, std::vector<bool>& used,
            std::vector<std::size_t>& out) {
    if (i == cand.size()) return true;
    for (auto j : cand[i]) {
        if (used[j]) continue;
        used[j] = true;
        out[i] = j;
        if (assign(i + 1, cand, used, out)) return true;
        used[j] = false;
    }
    return false;
}

} // namespace

MatchResult match_sets(const StateSet& a_in, const StateSet& b, const std::optional<RelabelingMap>& relabel) {
    MatchResult r;
    if (a_in.size() != b.size()) {
        r.reason = "cardinality differs (" + std::to_string(a_in.size()) + " vs " + std::to_string(b.size()) + ")";
        return r;
    }
    if (a_in.spec().party_count() != b.spec().party_count()) {
        r.reason = "party count differs";
        return r;
    }
    StateSet a;
    try {
        a = relabel ? relabel->apply(a_in) : a_in;
    } catch (const RelabelError& e) {
        r.reason = e.what();
        return r;
    }
    if (a.spec().dims() != b.spec().dims()) {
        r.reason = "party dimensions differ";
        return r;
    }

    std::vector<std::vector<std::size_t>> cand(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j)
            if (sgn(state_ratio(a[i], b[j])) != 0) cand[i].push_back(j);
        if (cand[i].empty()) {
            r.reason = "state " + a[i].id + " is not proportional to any target state";
            return r;
        }
    }
    std::vector<bool> used(b.size(), false);
    r.bijection.assign(a.size(), 0);
    if (!assign(0, cand, used, r.bijection)) {
        r.bijection.clear();
        r.reason = "no bijection between proportional states";
        return r;
    }
    for (std::size_t i = 0; i < a.size(); ++i) r.scalars.push_back(state_ratio(a[i], b[r.bijection[i]]));
    r.matched = true;
    return r;
}

// ---------------------------------------------------------------------------
// Theorems

Measurement split_measurement(std::size_t party) {
    std::vector<OutcomeSpec> out{{"K1", {unit_vector(6, 0), unit_vector(6, 1), unit_vector(6, 2)}, false},
                                 {"K2", {unit_vector(6, 3), unit_vector(6, 4), unit_vector(6, 5)}, false}};
    return Measurement({party}, 6, std::move(out));
}

namespace {

// Projects onto one outcome, recording annihilated states instead of throwing.
StateSet project(const StateSet& s, const Measurement& m, const std::string& label, std::vector<std::string>& annihilated) {
    const auto k = m.outcome_index(label);
    std::vector<ProductState> alive;
    for (const auto& st : s.states()) {
        if (has_support(st, m, k)) {
            alive.push_back(st);
        } else {
            annihilated.push_back(st.id);
        }
    }
    return apply_outcome(StateSet(s.spec(), std::move(alive)), m, label);
}

std::string triple_text(const IndexTriple& t) {
    return std::to_string(t.p) + "," + std::to_string(t.q) + "," + std::to_string(t.r);
}

void finish_outcome(OutcomeReport& o, const StateSet& target) {
    o.output_states = o.outcome_set.size();
    o.pairwise_orthogonal = check_orthogonality(o.outcome_set).empty();
    o.match = match_sets(o.outcome_set, target);
    bool steps_ok = std::all_of(o.steps.begin(), o.steps.end(), [](const auto& st) { return st.orthogonality_preserving; });
    o.pass = steps_ok && o.deterministic() && o.pairwise_orthogonal && o.match.matched;
    if (o.upb) o.pass = o.pass && o.upb->is_upb;
    if (o.irreducibility) o.pass = o.pass && o.irreducibility->certified;
}

TheoremReport two_outcome_upb_theorem(const std::string& name, const StateSet& seed, std::size_t party,
                                      const std::string& measure_name, const Measurement& m, const StateSet& target,
                                      const std::string& target_name, const std::vector<RelabelingMap>& relabels) {
    TheoremReport rep;
    rep.theorem = name;
    rep.measurement = format_measurement(m);
    const bool opm = is_orthogonality_preserving(seed, m);
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        OutcomeReport o;
        o.label = m.outcomes()[k].label;
        o.steps.push_back({party_name(party), measure_name, opm});
        o.input_states = seed.size();
        o.target = target_name;
        o.relabel = relabels[k].describe();
        const StateSet projected = project(seed, m, o.label, o.annihilated);
        try {
            o.outcome_set = relabels[k].apply(projected);
        } catch (const RelabelError& e) {
            o.outcome_set = projected;
            o.match.reason = e.what();
            o.output_states = projected.size();
            rep.outcomes.push_back(std::move(o));
            continue;
        }
        o.upb = check_upb(o.outcome_set);
        finish_outcome(o, target);
        rep.outcomes.push_back(std::move(o));
    }
    rep.pass = std::all_of(rep.outcomes.begin(), rep.outcomes.end(), [](const auto& o) { return o.pass; });
    return rep;
}

const IndexTriple kFirstTriple{0, 1, 2};
const IndexTriple kSecondTriple{4, 5, 3};

const IndexTriple& triple_for(const std::string& label) { return label == "K1" ? kFirstTriple : kSecondTriple; }

template <class F>
std::vector<OutcomeReport> run_units(std::size_t count, std::size_t threads, F unit) {
    std::vector<OutcomeReport> out(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = unit(i);
        return out;
    }
    std::vector<std::future<void>> pending;
    std::size_t next = 0;
    while (next < count || !pending.empty()) {
        while (next < count && pending.size() < threads) {
            const std::size_t i = next++;
            pending.push_back(std::async(std::launch::async, [&, i] { out[i] = unit(i); }));
        }
        pending.front().get();
        pending.erase(pending.begin());
    }
    return out;
}

} // namespace

TheoremReport verify_theorem1() {
    const std::size_t B = 1;
    RelabelingMap first, second;
    first.set(B, 3, {{0, 0}, {1, 1}, {2, 2}});
    second.set(B, 3, {{3, 2}, {4, 0}, {5, 1}});
    return two_outcome_upb_theorem("theorem1", build_g1(), B, "K_B", split_measurement(B), build_tiles_upb(), "tiles",
                                   {first, second});
}

TheoremReport verify_theorem2() {
    const std::size_t C = 2;
    std::vector<OutcomeSpec> out{{"R1", {unit_vector(4, 0), unit_vector(4, 1)}, false},
                                 {"R2", {unit_vector(4, 2), unit_vector(4, 3)}, false}};
    const Measurement r({C}, 4, std::move(out));
    RelabelingMap first, second;
    first.set(C, 2, {{0, 0}, {1, 1}});
    second.set(C, 2, {{2, 1}, {3, 0}});
    return two_outcome_upb_theorem("theorem2", build_g2(), C, "R_C", r, build_shifts_upb(), "shifts", {first, second});
}

TheoremReport verify_theorem3(std::size_t threads) {
    const StateSet g3 = build_g3();
    TheoremReport rep;
    rep.theorem = "theorem3";
    rep.measurement = "K on A, then B, then C: " + format_measurement(split_measurement(0));

    auto unit = [&](std::size_t combo) {
        OutcomeReport o;
        o.input_states = g3.size();
        StateSet current = g3;
        std::vector<IndexTriple> triples;
        for (std::size_t p = 0; p < 3; ++p) {
            const std::string label = (combo >> (2 - p) & 1) ? "K2" : "K1";
            const Measurement m = split_measurement(p);
            o.steps.push_back({party_name(p), "K_" + party_name(p), is_orthogonality_preserving(current, m)});
            current = project(current, m, label, o.annihilated);
            o.label += (p ? "," : "") + label;
            triples.push_back(triple_for(label));
        }
        o.outcome_set = current;
        o.target = "strong:" + triple_text(triples[0]) + "/" + triple_text(triples[1]) + "/" + triple_text(triples[2]);
        o.relabel = "none";
        o.irreducibility = certify_strong_irreducibility(current);
        finish_outcome(o, build_strong_set(StrongTemplateParams::per_party(triples[0], triples[1], triples[2])));
        return o;
    };
    rep.outcomes = run_units(8, threads, unit);
    rep.pass = std::all_of(rep.outcomes.begin(), rep.outcomes.end(), [](const auto& o) { return o.pass; });
    return rep;
}

TheoremReport verify_theorem4(std::size_t threads) {
    const StateSet g4 = build_g4();
    const std::size_t C = 2;
    const Measurement m = split_measurement(C);
    TheoremReport rep;
    rep.theorem = "theorem4";
    rep.measurement = format_measurement(m);
    const bool opm = is_orthogonality_preserving(g4, m);

    auto unit = [&](std::size_t k) {
        OutcomeReport o;
        o.label = m.outcomes()[k].label;
        o.input_states = g4.size();
        o.steps.push_back({party_name(C), "K^C", opm});
        o.outcome_set = project(g4, m, o.label, o.annihilated);
        const IndexTriple& t = triple_for(o.label);
        o.target = "strong7:" + triple_text(t);
        o.relabel = "none";
        o.irreducibility = certify_strong_irreducibility(o.outcome_set);
        finish_outcome(o, build_strong_set(StrongTemplateParams::single_site(t)));
        return o;
    };
    rep.outcomes = run_units(2, threads, unit);
    rep.pass = std::all_of(rep.outcomes.begin(), rep.outcomes.end(), [](const auto& o) { return o.pass; });
    return rep;
}

// ---------------------------------------------------------------------------
// Contrast

ContrastReport contrast_fixtures(BranchingPolicy seed_policy) {
    ContrastReport rep;
    const std::vector<std::string> seeds{"g1", "g2", "g3", "g4"};
    for (const auto& name : seeds) {
        const auto r = simulate(build_named(name), builtin_protocol(name), {seed_policy});
        rep.seeds.push_back({name, name, true, r.distinguished, r.distinguished ? "" : "see protocol report"});
    }

    const std::vector<std::string> targets{"tiles", "shifts", "strong:0,1,2", "strong:4,5,3", "strong7:0,1,2",
                                           "strong7:4,5,3"};
    bool none_distinguished = true;
    for (const auto& name : targets) {
        const StateSet t = build_named(name);
        for (const auto& proto : seeds) {
            ContrastEntry e{name, proto, false, false, {}};
            try {
                const auto r = simulate(t, builtin_protocol(proto), {BranchingPolicy::Probabilistic});
                e.applicable = true;
                e.distinguished = r.distinguished;
                if (!r.distinguished && !r.states.empty()) e.note = r.states.front().reason;
            } catch (const std::exception& ex) {
                e.note = ex.what();
            }
            none_distinguished = none_distinguished && !e.distinguished;
            rep.targets.push_back(std::move(e));
        }
        if (name == "tiles" || name == "shifts") {
            rep.target_proxy[name] = check_upb(t).is_upb;
        } else {
            rep.target_proxy[name] = certify_strong_irreducibility(t).certified;
        }
    }
    const bool seeds_ok = std::all_of(rep.seeds.begin(), rep.seeds.end(), [](const auto& e) { return e.distinguished; });
    const bool proxies_ok = std::all_of(rep.target_proxy.begin(), rep.target_proxy.end(), [](const auto& e) { return e.second; });
    rep.holds = seeds_ok && none_distinguished && proxies_ok;
    return rep;
}

} // namespace opset

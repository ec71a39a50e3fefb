#include "opset/statesets.hpp"

#include "opset/errors.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace opset {

StateSet::StateSet(PartySpec spec, std::vector<ProductState> states)
    : spec_(std::move(spec)), states_(std::move(states)) {
    std::set<std::string> seen;
    for (const auto& s : states_) {
        if (s.id.empty()) throw StructuralError("StateSet: empty state id");
        if (!seen.insert(s.id).second) throw StructuralError("StateSet: duplicate id " + s.id);
        validate_state(spec_, s);
    }
}

std::size_t StateSet::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (states_[i].id == id) return i;
    throw StructuralError("StateSet: no state with id " + id);
}

const ProductState& StateSet::at(const std::string& id) const { return states_[index_of(id)]; }

bool StateSet::contains(const std::string& id) const {
    return std::any_of(states_.begin(), states_.end(), [&](const auto& s) { return s.id == id; });
}

std::vector<std::string> StateSet::ids() const {
    std::vector<std::string> out;
    for (const auto& s : states_) out.push_back(s.id);
    return out;
}

namespace {

ProductState state(std::string id, std::vector<RVector> locals) { return {std::move(id), std::move(locals)}; }

// "+"/"-" suffixed copies of a family member whose locals depend on the sign.
template <typename F>
void add_pair(std::vector<ProductState>& out, const std::string& stem, F&& make) {
    out.push_back(state(stem + "+", make(std::string("+"))));
    out.push_back(state(stem + "-", make(std::string("-"))));
}

} // namespace

StateSet build_g1() {
    auto a = [](const char* e) { return ket(3, e); };
    auto b = [](const char* e) { return ket(6, e); };
    return StateSet(PartySpec({3, 6}, {{}, {2, 3}}),
                    {
                        state("psi1", {a("0"), b("0-1+4-5")}),
                        state("psi2", {a("2"), b("1-2+5-3")}),
                        state("psi3", {a("1-2"), b("0-4")}),
                        state("psi4", {a("0-1"), b("2-3")}),
                        state("psi5", {a("0+1+2"), b("0+1+2+3+4+5")}),
                    });
}

StateSet build_g2() {
    auto q = [](const char* e) { return ket(2, e); };
    auto c = [](const char* e) { return ket(4, e); };
    return StateSet(PartySpec({2, 2, 4}, {{}, {}, {2, 2}}),
                    {
                        state("phi1", {q("0"), q("0-1"), c("1+2")}),
                        state("phi2", {q("0-1"), q("1"), c("0+3")}),
                        state("phi3", {q("1"), q("0"), c("0-1+2-3")}),
                        state("phi4", {q("0+1"), q("0+1"), c("0+1+2+3")}),
                    });
}

StateSet build_g3() {
    auto k = [](const std::string& e) { return ket(6, e); };
    const auto p = k("0-4");
    const auto q = k("1-5");
    const auto r = k("2-3");
    auto eta = [&](const std::string& s) { return k("0" + s + "1+4" + s + "5"); };
    auto kap = [&](const std::string& s) { return k("0" + s + "2+4" + s + "3"); };

    std::vector<ProductState> st;
    add_pair(st, "xi1", [&](auto s) { return std::vector{p, q, eta(s)}; });
    add_pair(st, "xi2", [&](auto s) { return std::vector{p, r, kap(s)}; });
    add_pair(st, "xi3", [&](auto s) { return std::vector{q, r, eta(s)}; });
    add_pair(st, "xi4", [&](auto s) { return std::vector{r, q, kap(s)}; });
    st.push_back(state("xi5", {p, p, p}));
    add_pair(st, "xi6", [&](auto s) { return std::vector{q, eta(s), p}; });
    add_pair(st, "xi7", [&](auto s) { return std::vector{r, kap(s), p}; });
    add_pair(st, "xi8", [&](auto s) { return std::vector{r, eta(s), q}; });
    add_pair(st, "xi9", [&](auto s) { return std::vector{q, kap(s), r}; });
    st.push_back(state("xi10", {q, q, q}));
    add_pair(st, "xi11", [&](auto s) { return std::vector{eta(s), p, q}; });
    add_pair(st, "xi12", [&](auto s) { return std::vector{kap(s), p, r}; });
    add_pair(st, "xi13", [&](auto s) { return std::vector{eta(s), q, r}; });
    add_pair(st, "xi14", [&](auto s) { return std::vector{kap(s), r, q}; });
    st.push_back(state("xi15", {r, r, r}));
    return StateSet(PartySpec({6, 6, 6}, {{2, 3}, {2, 3}, {2, 3}}), std::move(st));
}

StateSet build_g4() {
    auto t = [](const std::string& e) { return ket(3, e); };
    auto k = [](const std::string& e) { return ket(6, e); };
    const auto p = k("0-4");
    const auto q = k("1-5");
    const auto r = k("2-3");
    auto nu_c = [&](const std::string& s) { return k("0" + s + "1+4" + s + "5"); };
    auto tau_c = [&](const std::string& s) { return k("0" + s + "2+4" + s + "3"); };
    auto nu = [&](const std::string& s) { return t("0" + s + "1"); };
    auto tau = [&](const std::string& s) { return t("0" + s + "2"); };
    const auto e0 = t("0"), e1 = t("1"), e2 = t("2");

    std::vector<ProductState> st;
    add_pair(st, "zeta1", [&](auto s) { return std::vector{e0, e1, nu_c(s)}; });
    add_pair(st, "zeta2", [&](auto s) { return std::vector{e0, e2, tau_c(s)}; });
    add_pair(st, "zeta3", [&](auto s) { return std::vector{e1, e2, nu_c(s)}; });
    add_pair(st, "zeta4", [&](auto s) { return std::vector{e2, e1, tau_c(s)}; });
    st.push_back(state("zeta5", {e0, e0, p}));
    add_pair(st, "zeta6", [&](auto s) { return std::vector{e1, nu(s), p}; });
    add_pair(st, "zeta7", [&](auto s) { return std::vector{e2, tau(s), p}; });
    add_pair(st, "zeta8", [&](auto s) { return std::vector{e2, nu(s), q}; });
    add_pair(st, "zeta9", [&](auto s) { return std::vector{e1, tau(s), r}; });
    st.push_back(state("zeta10", {e1, e1, q}));
    add_pair(st, "zeta11", [&](auto s) { return std::vector{nu(s), e0, q}; });
    add_pair(st, "zeta12", [&](auto s) { return std::vector{tau(s), e0, r}; });
    add_pair(st, "zeta13", [&](auto s) { return std::vector{nu(s), e1, r}; });
    add_pair(st, "zeta14", [&](auto s) { return std::vector{tau(s), e2, q}; });
    st.push_back(state("zeta15", {e2, e2, r}));
    return StateSet(PartySpec({3, 3, 6}, {{}, {}, {2, 3}}), std::move(st));
}

StateSet build_tiles_upb() {
    auto k = [](const char* e) { return ket(3, e); };
    return StateSet(PartySpec({3, 3}),
                    {
                        state("tile1", {k("0"), k("0-1")}),
                        state("tile2", {k("2"), k("1-2")}),
                        state("tile3", {k("1-2"), k("0")}),
                        state("tile4", {k("0-1"), k("2")}),
                        state("tile5", {k("0+1+2"), k("0+1+2")}),
                    });
}

StateSet build_shifts_upb() {
    auto k = [](const char* e) { return ket(2, e); };
    return StateSet(PartySpec({2, 2, 2}),
                    {
                        state("shift1", {k("0"), k("0-1"), k("1")}),
                        state("shift2", {k("0-1"), k("1"), k("0")}),
                        state("shift3", {k("1"), k("0"), k("0-1")}),
                        state("shift4", {k("0+1"), k("0+1"), k("0+1")}),
                    });
}

StrongTemplateParams StrongTemplateParams::uniform(IndexTriple t) { return per_party(t, t, t); }

StrongTemplateParams StrongTemplateParams::per_party(IndexTriple a, IndexTriple b, IndexTriple c) {
    return {{6, 6, 6}, {a, b, c}};
}

StrongTemplateParams StrongTemplateParams::single_site(IndexTriple c) { return {{3, 3, 6}, {{0, 1, 2}, {0, 1, 2}, c}}; }

namespace {

void validate(const StrongTemplateParams& params) {
    if (params.dims.size() != 3 || params.triples.size() != 3)
        throw StructuralError("strong template: exactly three parties required");
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& t = params.triples[i];
        if (params.dims[i] == 3) {
            if (!(t == IndexTriple{0, 1, 2})) throw StructuralError("strong template: C^3 party must use (0,1,2)");
        } else if (params.dims[i] == 6) {
            if ((t.p != 0 && t.p != 4) || (t.q != 1 && t.q != 5) || (t.r != 2 && t.r != 3))
                throw StructuralError("strong template: triple outside the pools p{0,4} q{1,5} r{2,3}");
        } else {
            throw StructuralError("strong template: party dimension must be 3 or 6");
        }
    }
}

} // namespace

StateSet build_strong_set(const StrongTemplateParams& params) {
    validate(params);
    // Slots: p q r basis kets, e = p +/- q, k = p +/- r.
    static constexpr std::array<std::array<char, 3>, 15> rows{{
        {'p', 'q', 'e'}, {'p', 'r', 'k'}, {'q', 'r', 'e'}, {'r', 'q', 'k'}, {'p', 'p', 'p'},
        {'q', 'e', 'p'}, {'r', 'k', 'p'}, {'r', 'e', 'q'}, {'q', 'k', 'r'}, {'q', 'q', 'q'},
        {'e', 'p', 'q'}, {'k', 'p', 'r'}, {'e', 'q', 'r'}, {'k', 'r', 'q'}, {'r', 'r', 'r'},
    }};
    auto local = [&](std::size_t party, char slot, int sign) {
        const auto& t = params.triples[party];
        RVector v(params.dims[party]);
        switch (slot) {
        case 'p': v[t.p] = 1; break;
        case 'q': v[t.q] = 1; break;
        case 'r': v[t.r] = 1; break;
        case 'e': v[t.p] = 1; v[t.q] = sign; break;
        default: v[t.p] = 1; v[t.r] = sign; break;
        }
        return v;
    };

    std::vector<ProductState> st;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const bool paired = std::find_if(row.begin(), row.end(), [](char c) { return c == 'e' || c == 'k'; }) != row.end();
        const std::string stem = "s" + std::to_string(i + 1);
        for (int sign : paired ? std::vector<int>{1, -1} : std::vector<int>{1}) {
            std::vector<RVector> locals;
            for (std::size_t party = 0; party < 3; ++party) locals.push_back(local(party, row[party], sign));
            st.push_back(state(paired ? stem + (sign > 0 ? "+" : "-") : stem, std::move(locals)));
        }
    }
    std::vector<std::vector<std::size_t>> factors;
    for (auto d : params.dims) factors.push_back(d == 6 ? std::vector<std::size_t>{2, 3} : std::vector<std::size_t>{});
    return StateSet(PartySpec(params.dims, factors), std::move(st));
}

namespace {

IndexTriple parse_triple(const std::string& text) {
    const auto v = parse_int_vector(text);
    if (v.size() != 3) throw std::invalid_argument("expected three indices in '" + text + "'");
    std::array<std::size_t, 3> idx{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (sgn(v[i]) < 0) throw std::invalid_argument("negative index in '" + text + "'");
        idx[i] = v[i].get_num().get_ui();
    }
    return {idx[0], idx[1], idx[2]};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

StateSet build_named(const std::string& name) {
    if (name == "g1") return build_g1();
    if (name == "g2") return build_g2();
    if (name == "g3") return build_g3();
    if (name == "g4") return build_g4();
    if (name == "tiles") return build_tiles_upb();
    if (name == "shifts") return build_shifts_upb();
    try {
        if (name.rfind("strong7:", 0) == 0) return build_strong_set(StrongTemplateParams::single_site(parse_triple(name.substr(8))));
        if (name.rfind("strong:", 0) == 0) {
            const auto parts = split(name.substr(7), '/');
            if (parts.size() == 1) return build_strong_set(StrongTemplateParams::uniform(parse_triple(parts[0])));
            if (parts.size() == 3)
                return build_strong_set(StrongTemplateParams::per_party(parse_triple(parts[0]), parse_triple(parts[1]),
                                                                         parse_triple(parts[2])));
        }
    } catch (const StructuralError& e) {
        throw std::invalid_argument(name + ": " + e.what());
    }
    throw std::invalid_argument("unknown state set '" + name + "'");
}

std::vector<std::string> builtin_set_names() { return {"g1", "g2", "g3", "g4", "tiles", "shifts"}; }

std::vector<OrthogonalityViolation> check_orthogonality(const StateSet& s) {
    std::vector<OrthogonalityViolation> out;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            Rational ip = inner_product(s[i], s[j]);
            if (sgn(ip) != 0) out.push_back({s[i].id, s[j].id, ip});
        }
    return out;
}

SupportRestriction restrict_to_support(const StateSet& s) {
    const auto& spec = s.spec();
    SupportRestriction out;
    std::vector<std::size_t> dims;
    for (std::size_t p = 0; p < spec.party_count(); ++p) {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < spec.dim(p); ++i) {
            if (std::any_of(s.states().begin(), s.states().end(), [&](const auto& st) { return sgn(st.locals[p][i]) != 0; }))
                keep.push_back(i);
        }
        // A party supported on a single coordinate still needs dimension 2 in
        // a PartySpec; keep the next unused coordinate as padding.
        if (keep.size() == 1) keep.push_back(keep[0] + 1 < spec.dim(p) ? keep[0] + 1 : keep[0] - 1);
        std::sort(keep.begin(), keep.end());
        dims.push_back(keep.size());
        out.support.push_back(std::move(keep));
    }
    std::vector<ProductState> states;
    for (const auto& st : s.states()) {
        ProductState r{st.id, {}};
        for (std::size_t p = 0; p < spec.party_count(); ++p) {
            RVector v;
            for (auto i : out.support[p]) v.push_back(st.locals[p][i]);
            r.locals.push_back(std::move(v));
        }
        states.push_back(std::move(r));
    }
    // Factorizations do not survive a coordinate restriction unless nothing was dropped.
    std::vector<std::vector<std::size_t>> factors;
    for (std::size_t p = 0; p < spec.party_count(); ++p)
        factors.push_back(dims[p] == spec.dim(p) ? spec.factorizations()[p] : std::vector<std::size_t>{});
    out.set = StateSet(PartySpec(dims, factors), std::move(states));
    return out;
}

RVector parse_int_vector(const std::string& text) {
    RVector v;
    for (const auto& part : split(text, ',')) {
        const auto t = trim(part);
        if (t.empty()) throw std::invalid_argument("empty vector entry in '" + text + "'");
        Integer x;
        if (x.set_str(t, 10) != 0) throw std::invalid_argument("bad integer '" + t + "'");
        v.emplace_back(x);
    }
    return v;
}

void write_state_set(std::ostream& out, const StateSet& s) {
    const auto& spec = s.spec();
    out << "parties";
    for (auto d : spec.dims()) out << ' ' << d;
    bool first = true;
    for (std::size_t p = 0; p < spec.party_count(); ++p) {
        if (!spec.is_factorized(p)) continue;
        out << (first ? " ; factors " : ", ") << "p#" << (p + 1) << ": ";
        first = false;
        const auto fd = spec.factor_dims(p);
        for (std::size_t k = 0; k < fd.size(); ++k) out << (k ? "*" : "") << fd[k];
    }
    out << '\n';
    for (const auto& st : s.states()) {
        out << st.id;
        for (const auto& local : st.locals) {
            const auto v = primitive_integer(local);
            out << " | ";
            for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i].get_num().get_str();
        }
        out << '\n';
    }
}

std::string format_state_set(const StateSet& s) {
    std::ostringstream out;
    write_state_set(out, s);
    return out.str();
}

StateSet read_state_set(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<PartySpec> spec;
    std::vector<ProductState> states;
    while (std::getline(in, line)) {
        ++lineno;
        // A '#' that starts the line or follows whitespace opens a comment; "p#2" does not.
        for (std::size_t i = 0; i < line.size(); ++i)
            if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.erase(i);
                break;
            }
        const auto t = trim(line);
        if (t.empty()) continue;
        try {
            if (!spec) {
                if (t.rfind("parties", 0) != 0) throw std::invalid_argument("expected 'parties' header");
                const auto halves = split(t, ';');
                std::istringstream dims_in(halves[0].substr(7));
                std::vector<std::size_t> dims;
                long long d = 0;
                while (dims_in >> d) {
                    if (d < 0) throw std::invalid_argument("negative dimension");
                    dims.push_back(static_cast<std::size_t>(d));
                }
                if (!dims_in.eof()) throw std::invalid_argument("bad dimension list");
                std::vector<std::vector<std::size_t>> factors(dims.size());
                if (halves.size() > 2) throw std::invalid_argument("too many ';' in header");
                if (halves.size() == 2) {
                    auto f = trim(halves[1]);
                    if (f.rfind("factors", 0) != 0) throw std::invalid_argument("expected 'factors'");
                    f = trim(f.substr(7));
                    for (const auto& entry : split(f, ',')) {
                        const auto e = trim(entry);
                        if (e.empty()) continue;
                        const auto colon = e.find(':');
                        if (e.rfind("p#", 0) != 0 || colon == std::string::npos)
                            throw std::invalid_argument("bad factor entry '" + e + "'");
                        const std::size_t party = std::stoul(e.substr(2, colon - 2));
                        if (party == 0 || party > dims.size()) throw std::invalid_argument("factor party out of range");
                        for (const auto& fd : split(trim(e.substr(colon + 1)), '*'))
                            factors[party - 1].push_back(std::stoul(trim(fd)));
                    }
                }
                spec = PartySpec(dims, factors);
                continue;
            }
            const auto fields = split(t, '|');
            if (fields.size() != spec->party_count() + 1)
                throw std::invalid_argument("expected " + std::to_string(spec->party_count()) + " local vectors");
            ProductState st{trim(fields[0]), {}};
            for (std::size_t k = 1; k < fields.size(); ++k) st.locals.push_back(parse_int_vector(fields[k]));
            validate_state(*spec, st);
            states.push_back(std::move(st));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(lineno, e.what());
        }
    }
    if (!spec) throw ParseError(lineno, "missing 'parties' header");
    try {
        return StateSet(*spec, std::move(states));
    } catch (const StructuralError& e) {
        throw ParseError(lineno, e.what());
    }
}

StateSet parse_state_set(const std::string& text) {
    std::istringstream in(text);
    return read_state_set(in);
}

} // namespace opset

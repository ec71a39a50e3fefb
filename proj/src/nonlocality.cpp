#include "opset/nonlocality.hpp"

#include "opset/errors.hpp"

#include <algorithm>
#include <future>
#include <limits>

namespace opset {

// ---------------------------------------------------------------------------
// Local redundancy

bool DiscardPattern::has_witness(const std::string& a, const std::string& b) const {
    return std::any_of(witnesses.begin(), witnesses.end(), [&](const PairWitness& w) {
        return (w.first == a && w.second == b) || (w.first == b && w.second == a);
    });
}

const DiscardPattern& RedundancyReport::pattern(std::vector<std::string> discarded_names) const {
    std::sort(discarded_names.begin(), discarded_names.end());
    for (const auto& p : patterns) {
        auto names = p.discarded_names;
        std::sort(names.begin(), names.end());
        if (names == discarded_names) return p;
    }
    throw StructuralError("RedundancyReport: no such discard pattern");
}

RedundancyReport check_local_redundancy(const StateSet& s) {
    const auto& spec = s.spec();
    const auto factors = all_factors(spec);
    if (factors.size() >= 63) throw StructuralError("check_local_redundancy: too many factors");
    const std::uint64_t full = (std::uint64_t{1} << factors.size()) - 1;

    RedundancyReport report;
    report.redundancy_free = true;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
        DiscardPattern pat;
        for (std::size_t f = 0; f < factors.size(); ++f) {
            if (mask >> f & 1) {
                pat.discarded.push_back(factors[f]);
                pat.discarded_names.push_back(factor_name(spec, factors[f]));
            } else {
                pat.kept.push_back(factors[f]);
            }
        }
        std::vector<FactoredDensity> rho;
        rho.reserve(s.size());
        for (const auto& st : s.states()) rho.push_back(reduced_density_factored(spec, st, pat.kept));
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                Rational t = trace_of_product(rho[i], rho[j]);
                if (sgn(t) != 0) pat.witnesses.push_back({s[i].id, s[j].id, std::move(t)});
            }
        report.redundancy_free = report.redundancy_free && !pat.witnesses.empty();
        report.patterns.push_back(std::move(pat));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Unextendibility

namespace {

struct UpbSearch {
    const StateSet& s;
    std::vector<std::vector<RVector>> assigned;
    std::vector<std::size_t> assignment;
    std::uint64_t nodes = 0;

    bool proper(std::size_t party) const {
        const auto d = s.spec().dim(party);
        if (assigned[party].size() < d) return true;
        return rank(RMatrix::from_rows(assigned[party], d)) < d;
    }

    bool run(std::size_t i) {
        ++nodes;
        if (i == s.size()) return true;
        for (std::size_t p = 0; p < s.spec().party_count(); ++p) {
            assigned[p].push_back(s[i].locals[p]);
            assignment[i] = p;
            if (proper(p) && run(i + 1)) return true;
            assigned[p].pop_back();
        }
        return false;
    }
};

} // namespace

UpbVerdict check_upb(const StateSet& s, std::uint64_t guard) {
    const std::uint64_t k = s.spec().party_count();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (total > guard / k) {
            throw EnumerationTooLarge(std::to_string(k) + "^" + std::to_string(s.size()) +
                                      " assignments exceed the enumeration guard of " + std::to_string(guard));
        }
        total *= k;
    }

    UpbSearch search{s, std::vector<std::vector<RVector>>(k), std::vector<std::size_t>(s.size()), 0};
    UpbVerdict v;
    const bool found = search.run(0);
    v.search_nodes = search.nodes;
    v.is_upb = !found;
    if (!found) return v;

    ProductState w{"witness", {}};
    for (std::size_t p = 0; p < k; ++p) {
        const auto d = s.spec().dim(p);
        if (search.assigned[p].empty()) {
            w.locals.push_back(unit_vector(d, 0));
        } else {
            w.locals.push_back(kernel_basis(RMatrix::from_rows(search.assigned[p], d)).front());
        }
    }
    for (const auto& st : s.states())
        if (sgn(inner_product(w, st)) != 0) throw std::logic_error("check_upb: witness is not orthogonal to " + st.id);
    v.witness = std::move(w);
    v.assignment = std::move(search.assignment);
    return v;
}

// ---------------------------------------------------------------------------
// OPM constraint systems

std::string grouping_name(const std::vector<std::size_t>& grouping) {
    std::string out;
    for (auto p : grouping) out += party_name(p);
    return out;
}

std::string IrreducibilityCertificate::verdict() const {
    return trivial_only() ? "trivial-OPM-only" : "nontrivial-OPM-exists";
}

namespace {

std::vector<std::size_t> normalized_grouping(const PartySpec& spec, std::vector<std::size_t> grouping) {
    std::sort(grouping.begin(), grouping.end());
    grouping.erase(std::unique(grouping.begin(), grouping.end()), grouping.end());
    if (grouping.empty()) throw StructuralError("grouping must not be empty");
    if (grouping.back() >= spec.party_count()) throw StructuralError("grouping names a party out of range");
    if (grouping.size() == spec.party_count()) throw StructuralError("grouping must be a proper subset of the parties");
    return grouping;
}

// Index of unknown (a, b), a <= b (sym) or a < b (antisym), in row-major upper-triangle order.
std::size_t sym_index(std::size_t d, std::size_t a, std::size_t b) { return a * d - a * (a - 1) / 2 + (b - a); }
std::size_t antisym_index(std::size_t d, std::size_t a, std::size_t b) { return a * (d - 1) - a * (a - 1) / 2 + (b - a - 1); }

RVector identity_unknowns(std::size_t d) {
    RVector v(d * (d + 1) / 2);
    for (std::size_t a = 0; a < d; ++a) v[sym_index(d, a, a)] = 1;
    return v;
}

RMatrix sym_from_unknowns(std::size_t d, const RVector& x) {
    RMatrix m(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) m(a, b) = m(b, a) = x[sym_index(d, a, b)];
    return m;
}

RMatrix antisym_from_unknowns(std::size_t d, const RVector& x) {
    RMatrix m(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
            m(a, b) = x[antisym_index(d, a, b)];
            m(b, a) = -m(a, b);
        }
    return m;
}

bool in_span(const std::vector<RVector>& basis, const RVector& v) {
    if (basis.empty()) return is_zero(v);
    auto with = basis;
    with.push_back(v);
    return rank(RMatrix::from_rows(with, v.size())) == rank(RMatrix::from_rows(basis, v.size()));
}

} // namespace

IrreducibilityCertificate opm_certificate(const StateSet& s, const std::vector<std::size_t>& grouping_in,
                                          const EliminationOptions& opts) {
    const auto grouping = normalized_grouping(s.spec(), grouping_in);
    const auto restricted = restrict_to_support(s);
    const StateSet& r = restricted.set;

    IrreducibilityCertificate c;
    c.grouping = grouping;
    c.grouping_name = grouping_name(grouping);
    std::size_t d = 1;
    for (auto p : grouping) {
        c.support_dims.push_back(r.spec().dim(p));
        d *= r.spec().dim(p);
    }
    c.group_dim = d;
    c.sym_unknowns = d * (d + 1) / 2;
    c.antisym_unknowns = d * (d - 1) / 2;

    std::vector<RVector> u;
    for (const auto& st : r.states()) u.push_back(group_vector(st, grouping));

    std::vector<RVector> sym_rows, antisym_rows;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j) {
            if (sgn(rest_overlap(r[i], r[j], grouping)) == 0) continue;
            RVector srow(c.sym_unknowns), arow(c.antisym_unknowns);
            for (std::size_t a = 0; a < d; ++a) {
                if (sgn(u[i][a]) == 0 && sgn(u[j][a]) == 0) continue;
                srow[sym_index(d, a, a)] += u[i][a] * u[j][a];
                for (std::size_t b = a + 1; b < d; ++b) {
                    srow[sym_index(d, a, b)] += u[i][a] * u[j][b] + u[i][b] * u[j][a];
                    arow[antisym_index(d, a, b)] += u[i][a] * u[j][b] - u[i][b] * u[j][a];
                }
            }
            sym_rows.push_back(std::move(srow));
            antisym_rows.push_back(std::move(arow));
        }
    c.constraint_rows = sym_rows.size();

    const RMatrix ms = RMatrix::from_rows(sym_rows, c.sym_unknowns);
    c.sym_kernel = kernel_basis(ms, opts);
    c.sym_dim = c.sym_kernel.size();
    c.sym_rank = c.sym_unknowns - c.sym_dim;
    if (c.antisym_unknowns > 0) {
        const RMatrix ma = RMatrix::from_rows(antisym_rows, c.antisym_unknowns);
        c.antisym_kernel = kernel_basis(ma, opts);
    }
    c.antisym_dim = c.antisym_kernel.size();
    c.antisym_rank = c.antisym_unknowns - c.antisym_dim;

    const RVector id = identity_unknowns(d);
    c.identity_in_kernel = is_zero(ms * id) && in_span(c.sym_kernel, id);
    return c;
}

OpmDims opm_solution_dims(const StateSet& s, const std::vector<std::size_t>& grouping) {
    const auto c = opm_certificate(s, grouping);
    return {c.sym_dim, c.antisym_dim};
}

const IrreducibilityCertificate& StrongIrreducibilityReport::certificate(const std::string& name) const {
    for (const auto& c : certificates)
        if (c.grouping_name == name) return c;
    throw StructuralError("no certificate for grouping " + name);
}

StrongIrreducibilityReport certify_strong_irreducibility(const StateSet& s, std::size_t threads) {
    const std::size_t n = s.spec().party_count();
    if (n < 3) throw StructuralError("certify_strong_irreducibility needs at least three parties");

    std::vector<std::vector<std::size_t>> groupings;
    for (std::size_t x = 0; x < n; ++x) {
        groupings.push_back({x});
        std::vector<std::size_t> rest;
        for (std::size_t p = 0; p < n; ++p)
            if (p != x) rest.push_back(p);
        groupings.push_back(std::move(rest));
    }
    std::sort(groupings.begin(), groupings.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });

    StrongIrreducibilityReport report;
    report.certificates.resize(groupings.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < groupings.size(); ++i) report.certificates[i] = opm_certificate(s, groupings[i]);
    } else {
        std::vector<std::future<void>> pending;
        std::size_t next = 0;
        while (next < groupings.size() || !pending.empty()) {
            while (next < groupings.size() && pending.size() < threads) {
                const std::size_t i = next++;
                pending.push_back(std::async(std::launch::async, [&, i] {
                    report.certificates[i] = opm_certificate(s, groupings[i]);
                }));
            }
            pending.front().get();
            pending.erase(pending.begin());
        }
    }

    report.certified = std::all_of(report.certificates.begin(), report.certificates.end(),
                                   [](const auto& c) { return c.trivial_only(); });
    if (report.certified) {
        report.summary = "strongly irreducible (certified): only trivial OPMs in every bipartition";
    } else {
        std::string open;
        for (const auto& c : report.certificates)
            if (!c.trivial_only()) open += (open.empty() ? "" : ", ") + c.grouping_name;
        report.summary = "not certified: nontrivial OPMs exist for grouping(s) " + open +
                         "; this does not imply the set is reducible";
    }
    return report;
}

std::optional<MaterializedOpm> materialize_nontrivial_opm(const StateSet& s, const IrreducibilityCertificate& cert) {
    if (cert.trivial_only()) return std::nullopt;
    const std::size_t d = cert.group_dim;
    const RVector id = identity_unknowns(d);

    RMatrix hs(d, d), ha(d, d);
    bool picked = false;
    for (const auto& v : cert.sym_kernel) {
        if (sgn(proportionality(v, id)) == 0) {
            hs = sym_from_unknowns(d, v);
            picked = true;
            break;
        }
    }
    if (!picked && !cert.antisym_kernel.empty()) {
        ha = antisym_from_unknowns(d, cert.antisym_kernel.front());
        picked = true;
    }
    if (!picked) return std::nullopt;

    Rational g = 0;
    for (std::size_t a = 0; a < d; ++a) {
        Rational row = 0;
        for (std::size_t b = 0; b < d; ++b) row += abs(hs(a, b)) + abs(ha(a, b));
        g = std::max(g, row);
    }
    const Rational scale = Rational(1) / (2 * (1 + g));

    // Embed the restricted operators into the grouping's full space.
    const auto support = restrict_to_support(s).support;
    std::vector<std::size_t> full_dims, restricted_dims;
    for (auto p : cert.grouping) {
        full_dims.push_back(s.spec().dim(p));
        restricted_dims.push_back(support[p].size());
    }
    std::size_t full = 1;
    for (auto x : full_dims) full *= x;
    std::vector<std::size_t> embed(d);
    for (std::size_t k = 0; k < d; ++k) {
        auto multi = to_multi_index(k, restricted_dims);
        for (std::size_t t = 0; t < multi.size(); ++t) multi[t] = support[cert.grouping[t]][multi[t]];
        embed[k] = from_multi_index(multi, full_dims);
    }

    const Rational half(1, 2);
    HermitianOperator e0{RMatrix::identity(full) * half, RMatrix(full, full)};
    HermitianOperator e1{RMatrix::identity(full) * half, RMatrix(full, full)};
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            const Rational sv = hs(a, b) * scale;
            const Rational av = ha(a, b) * scale;
            e0.sym(embed[a], embed[b]) += sv;
            e1.sym(embed[a], embed[b]) -= sv;
            e0.antisym(embed[a], embed[b]) += av;
            e1.antisym(embed[a], embed[b]) -= av;
        }

    MaterializedOpm out;
    out.gershgorin_bound = g;
    out.nontrivial = !hs.is_zero() || !ha.is_zero();
    out.measurement = EffectMeasurement{cert.grouping, {std::move(e0), std::move(e1)}};
    out.orthogonality_preserving = is_orthogonality_preserving(s, out.measurement);
    return out;
}

} // namespace opset

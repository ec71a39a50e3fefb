#include "opset/hilbert.hpp"

#include "opset/errors.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace opset {

PartySpec::PartySpec(std::vector<std::size_t> dims, std::vector<std::vector<std::size_t>> factors)
    : dims_(std::move(dims)), factors_(std::move(factors)) {
    if (dims_.empty()) throw StructuralError("PartySpec: no parties");
    if (dims_.size() > 26) throw StructuralError("PartySpec: at most 26 parties");
    if (factors_.empty()) factors_.resize(dims_.size());
    if (factors_.size() != dims_.size()) throw StructuralError("PartySpec: factorization count mismatch");
    for (std::size_t p = 0; p < dims_.size(); ++p) {
        if (dims_[p] < 2) throw StructuralError("PartySpec: party dimension below 2");
        if (factors_[p].empty()) continue;
        std::size_t prod = 1;
        for (auto f : factors_[p]) {
            if (f < 2) throw StructuralError("PartySpec: factor dimension below 2");
            prod *= f;
        }
        if (prod != dims_[p]) throw StructuralError("PartySpec: factor product differs from party dimension");
    }
}

std::size_t PartySpec::total_dim() const {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::size_t> PartySpec::factor_dims(std::size_t party) const {
    if (factors_.at(party).empty()) return {dims_.at(party)};
    return factors_[party];
}

std::string party_name(std::size_t party) { return std::string(1, static_cast<char>('A' + party)); }

std::size_t parse_party_name(const std::string& name) {
    if (name.size() != 1 || !std::isalpha(static_cast<unsigned char>(name[0])))
        throw StructuralError("bad party name '" + name + "'");
    return static_cast<std::size_t>(std::toupper(static_cast<unsigned char>(name[0])) - 'A');
}

std::string factor_name(const PartySpec& spec, const FactorLabel& label) {
    std::string out(1, static_cast<char>('a' + label.party));
    if (spec.is_factorized(label.party)) out += std::to_string(label.factor + 1);
    return out;
}

FactorLabel parse_factor_label(const PartySpec& spec, const std::string& text) {
    if (text.empty() || !std::isalpha(static_cast<unsigned char>(text[0])))
        throw StructuralError("bad factor label '" + text + "'");
    FactorLabel label{static_cast<std::size_t>(std::tolower(static_cast<unsigned char>(text[0])) - 'a'), 0};
    if (label.party >= spec.party_count()) throw StructuralError("factor label '" + text + "' names no party");
    const std::string rest = text.substr(1);
    if (!spec.is_factorized(label.party)) {
        if (!rest.empty()) throw StructuralError("party of '" + text + "' is not factorized");
        return label;
    }
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw StructuralError("factor label '" + text + "' needs a factor number");
    const std::size_t n = std::stoul(rest);
    if (n == 0 || n > spec.factor_dims(label.party).size())
        throw StructuralError("factor label '" + text + "' out of range");
    label.factor = n - 1;
    return label;
}

std::vector<FactorLabel> all_factors(const PartySpec& spec) {
    std::vector<FactorLabel> out;
    for (std::size_t p = 0; p < spec.party_count(); ++p)
        for (std::size_t f = 0; f < spec.factor_dims(p).size(); ++f) out.push_back({p, f});
    return out;
}

std::vector<std::size_t> to_multi_index(std::size_t index, const std::vector<std::size_t>& factor_dims) {
    std::vector<std::size_t> multi(factor_dims.size());
    for (std::size_t k = factor_dims.size(); k-- > 0;) {
        multi[k] = index % factor_dims[k];
        index /= factor_dims[k];
    }
    return multi;
}

std::size_t from_multi_index(const std::vector<std::size_t>& multi, const std::vector<std::size_t>& factor_dims) {
    std::size_t index = 0;
    for (std::size_t k = 0; k < factor_dims.size(); ++k) index = index * factor_dims[k] + multi[k];
    return index;
}

void validate_state(const PartySpec& spec, const ProductState& s) {
    if (s.locals.size() != spec.party_count())
        throw StructuralError("state " + s.id + ": party count differs from layout");
    for (std::size_t p = 0; p < spec.party_count(); ++p) {
        if (s.locals[p].size() != spec.dim(p))
            throw StructuralError("state " + s.id + ": local dimension mismatch on party " + party_name(p));
        if (is_zero(s.locals[p])) throw StructuralError("state " + s.id + ": zero local vector");
    }
}

Rational inner_product(const ProductState& s, const ProductState& t) {
    if (s.locals.size() != t.locals.size()) throw StructuralError("inner_product: party count mismatch");
    Rational acc = 1;
    for (std::size_t p = 0; p < s.locals.size(); ++p) {
        if (s.locals[p].size() != t.locals[p].size())
            throw StructuralError("inner_product: local dimension mismatch");
        acc *= dot(s.locals[p], t.locals[p]);
        if (sgn(acc) == 0) return acc;
    }
    return acc;
}

RVector full_vector(const ProductState& s) { return kron(s.locals); }

RMatrix local_reduced(const RVector& v, const std::vector<std::size_t>& factor_dims,
                      const std::vector<std::size_t>& kept_factors) {
    std::vector<std::size_t> kept_dims, traced_dims;
    std::vector<bool> kept(factor_dims.size(), false);
    for (auto k : kept_factors) kept.at(k) = true;
    for (std::size_t k = 0; k < factor_dims.size(); ++k) (kept[k] ? kept_dims : traced_dims).push_back(factor_dims[k]);
    const std::size_t kd = std::accumulate(kept_dims.begin(), kept_dims.end(), std::size_t{1}, std::multiplies<>());
    const std::size_t td = std::accumulate(traced_dims.begin(), traced_dims.end(), std::size_t{1}, std::multiplies<>());

    // Reshape v into a kept x traced matrix W; the reduced state is W W^T.
    RMatrix w(kd, td);
    std::vector<std::size_t> km, tm;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (sgn(v[i]) == 0) continue;
        const auto multi = to_multi_index(i, factor_dims);
        km.clear();
        tm.clear();
        for (std::size_t k = 0; k < factor_dims.size(); ++k) (kept[k] ? km : tm).push_back(multi[k]);
        w(from_multi_index(km, kept_dims), from_multi_index(tm, traced_dims)) = v[i];
    }
    return w * w.transpose();
}

namespace {

// Kept factor indices per party, validated.
std::vector<std::vector<std::size_t>> kept_by_party(const PartySpec& spec, const std::vector<FactorLabel>& keep) {
    if (keep.empty()) throw StructuralError("reduced_density: empty keep set");
    std::vector<std::vector<std::size_t>> per(spec.party_count());
    for (const auto& l : keep) {
        if (l.party >= spec.party_count()) throw StructuralError("reduced_density: party out of range");
        if (!spec.is_factorized(l.party) && l.factor != 0)
            throw StructuralError("reduced_density: party " + party_name(l.party) + " is not factorized");
        if (l.factor >= spec.factor_dims(l.party).size())
            throw StructuralError("reduced_density: factor out of range");
        per[l.party].push_back(l.factor);
    }
    for (auto& v : per) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return per;
}

} // namespace

FactoredDensity reduced_density_factored(const PartySpec& spec, const ProductState& s,
                                         const std::vector<FactorLabel>& keep) {
    validate_state(spec, s);
    const auto per = kept_by_party(spec, keep);
    FactoredDensity out;
    for (std::size_t p = 0; p < spec.party_count(); ++p) {
        if (per[p].empty()) {
            out.scalar *= dot(s.locals[p], s.locals[p]);
        } else {
            out.blocks.push_back(local_reduced(s.locals[p], spec.factor_dims(p), per[p]));
        }
    }
    return out;
}

Rational trace_of_product(const FactoredDensity& a, const FactoredDensity& b) {
    if (a.blocks.size() != b.blocks.size()) throw StructuralError("trace_of_product: layout mismatch");
    Rational acc = a.scalar * b.scalar;
    for (std::size_t k = 0; k < a.blocks.size() && sgn(acc) != 0; ++k) acc *= trace_of_product(a.blocks[k], b.blocks[k]);
    return acc;
}

DensityMatrix expand(const FactoredDensity& f) {
    RMatrix m = RMatrix::identity(1);
    for (const auto& b : f.blocks) m = kron(m, b);
    return {m * f.scalar};
}

DensityMatrix reduced_density(const PartySpec& spec, const ProductState& s, const std::vector<FactorLabel>& keep) {
    return expand(reduced_density_factored(spec, s, keep));
}

bool densities_orthogonal(const DensityMatrix& r1, const DensityMatrix& r2) {
    if (r1.dim() != r2.dim()) throw StructuralError("densities_orthogonal: dimension mismatch");
    return sgn(trace_of_product(r1.entries, r2.entries)) == 0;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& subsystem_dims,
                            const std::vector<std::size_t>& keep) {
    const std::size_t total =
        std::accumulate(subsystem_dims.begin(), subsystem_dims.end(), std::size_t{1}, std::multiplies<>());
    if (rho.dim() != total) throw StructuralError("partial_trace: dimension mismatch");
    std::vector<bool> kept(subsystem_dims.size(), false);
    for (auto k : keep) kept.at(k) = true;
    std::vector<std::size_t> kd, td;
    for (std::size_t k = 0; k < subsystem_dims.size(); ++k) (kept[k] ? kd : td).push_back(subsystem_dims[k]);
    const std::size_t kdim = std::accumulate(kd.begin(), kd.end(), std::size_t{1}, std::multiplies<>());

    RMatrix out(kdim, kdim);
    std::vector<std::size_t> ki, ti, kj, tj;
    for (std::size_t i = 0; i < total; ++i) {
        const auto mi = to_multi_index(i, subsystem_dims);
        ki.clear();
        ti.clear();
        for (std::size_t k = 0; k < mi.size(); ++k) (kept[k] ? ki : ti).push_back(mi[k]);
        for (std::size_t j = 0; j < total; ++j) {
            if (sgn(rho.entries(i, j)) == 0) continue;
            const auto mj = to_multi_index(j, subsystem_dims);
            kj.clear();
            tj.clear();
            for (std::size_t k = 0; k < mj.size(); ++k) (kept[k] ? kj : tj).push_back(mj[k]);
            if (ti != tj) continue;
            out(from_multi_index(ki, kd), from_multi_index(kj, kd)) += rho.entries(i, j);
        }
    }
    return {out};
}

std::optional<std::vector<RVector>> factor_product(const RVector& v, const std::vector<std::size_t>& dims) {
    const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    if (v.size() != total) throw StructuralError("factor_product: dimension mismatch");
    std::size_t anchor = total;
    for (std::size_t i = 0; i < total; ++i) {
        if (sgn(v[i]) != 0) {
            anchor = i;
            break;
        }
    }
    if (anchor == total) return std::nullopt;
    const auto am = to_multi_index(anchor, dims);
    std::vector<RVector> factors(dims.size());
    for (std::size_t p = 0; p < dims.size(); ++p) {
        factors[p].resize(dims[p]);
        auto m = am;
        for (std::size_t x = 0; x < dims[p]; ++x) {
            m[p] = x;
            factors[p][x] = v[from_multi_index(m, dims)];
        }
    }
    // kron(factors) at the anchor is v[anchor]^n; rescale the first factor.
    Rational scale = 1;
    for (std::size_t p = 1; p < dims.size(); ++p) scale *= v[anchor];
    for (auto& x : factors[0]) x /= scale;
    if (kron(factors) != v) return std::nullopt;
    return factors;
}

} // namespace opset

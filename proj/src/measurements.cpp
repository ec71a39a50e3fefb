#include "opset/measurements.hpp"

#include "opset/errors.hpp"
#include "opset/exactla.hpp"

#include <algorithm>
#include <sstream>

namespace opset {

Projector projector_from_span(const std::vector<RVector>& vectors, std::size_t dim) {
    std::vector<RVector> nonzero;
    for (const auto& v : vectors) {
        if (v.size() != dim) throw StructuralError("projector_from_span: vector dimension mismatch");
        if (!is_zero(v)) nonzero.push_back(v);
    }
    if (nonzero.empty()) return {RMatrix(dim, dim)};
    std::vector<RVector> basis;
    for (auto i : independent_subset(nonzero)) basis.push_back(nonzero[i]);
    const RMatrix v = RMatrix::from_columns(basis, dim);
    const RMatrix vt = v.transpose();
    const auto gram_inv = inverse(vt * v);
    if (!gram_inv) throw std::logic_error("projector_from_span: singular Gram matrix on independent vectors");
    return {v * *gram_inv * vt};
}

Measurement::Measurement(std::vector<std::size_t> target, std::size_t target_dim, std::vector<OutcomeSpec> outcomes)
    : target_(std::move(target)), target_dim_(target_dim), outcomes_(std::move(outcomes)) {
    if (target_.empty()) throw StructuralError("Measurement: empty target");
    if (!std::is_sorted(target_.begin(), target_.end()) ||
        std::adjacent_find(target_.begin(), target_.end()) != target_.end())
        throw StructuralError("Measurement: target parties must be strictly increasing");
    if (outcomes_.empty()) throw StructuralError("Measurement: no outcomes");
    std::size_t complements = 0;
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (outcomes_[i].label == outcomes_[j].label)
                throw StructuralError("Measurement: duplicate outcome label " + outcomes_[i].label);
        if (outcomes_[i].complement) ++complements;
    }
    if (complements > 1) throw StructuralError("Measurement: more than one complement outcome");

    projectors_.resize(outcomes_.size());
    RMatrix sum(target_dim_, target_dim_);
    std::size_t complement_at = outcomes_.size();
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
        if (outcomes_[i].complement) {
            complement_at = i;
            continue;
        }
        projectors_[i] = projector_from_span(outcomes_[i].span, target_dim_);
        sum += projectors_[i].entries;
    }
    if (complement_at < outcomes_.size()) projectors_[complement_at] = {RMatrix::identity(target_dim_) - sum};
}

namespace {

std::size_t group_dim(const PartySpec& spec, const std::vector<std::size_t>& target) {
    std::size_t d = 1;
    for (auto p : target) {
        if (p >= spec.party_count()) throw StructuralError("Measurement: target party out of range");
        d *= spec.dim(p);
    }
    return d;
}

} // namespace

Measurement::Measurement(const PartySpec& spec, std::vector<std::size_t> target, std::vector<OutcomeSpec> outcomes)
    : Measurement(target, group_dim(spec, target), std::move(outcomes)) {}

Measurement Measurement::identity(std::vector<std::size_t> target, std::size_t target_dim) {
    return Measurement(std::move(target), target_dim, {{"I", {}, true}});
}

std::size_t Measurement::outcome_index(const std::string& label) const {
    for (std::size_t i = 0; i < outcomes_.size(); ++i)
        if (outcomes_[i].label == label) return i;
    throw StructuralError("Measurement: no outcome labelled " + label);
}

HermitianOperator HermitianOperator::real(RMatrix s) {
    const std::size_t n = s.rows();
    return {std::move(s), RMatrix(n, n)};
}

bool check_completeness(const Measurement& m, std::size_t dim) {
    if (dim != m.target_dim()) return false;
    RMatrix sum(dim, dim);
    for (std::size_t i = 0; i < m.outcome_count(); ++i) {
        const auto& p = m.projector(i).entries;
        if (!p.is_symmetric() || !(p * p == p)) return false;
        sum += p;
    }
    return sum == RMatrix::identity(dim);
}

bool check_completeness(const Measurement& m) { return check_completeness(m, m.target_dim()); }

RVector group_vector(const ProductState& s, const std::vector<std::size_t>& target) {
    std::vector<RVector> parts;
    for (auto p : target) parts.push_back(s.locals.at(p));
    return kron(parts);
}

Rational rest_overlap(const ProductState& s, const ProductState& t, const std::vector<std::size_t>& target) {
    Rational acc = 1;
    for (std::size_t p = 0; p < s.locals.size() && sgn(acc) != 0; ++p) {
        if (std::binary_search(target.begin(), target.end(), p)) continue;
        acc *= dot(s.locals[p], t.locals[p]);
    }
    return acc;
}

namespace {

void check_target(const StateSet& s, const std::vector<std::size_t>& target, std::size_t dim) {
    if (group_dim(s.spec(), target) != dim) throw StructuralError("measurement dimension does not match its target parties");
}

} // namespace

bool is_orthogonality_preserving(const StateSet& s, const Measurement& m) {
    check_target(s, m.target(), m.target_dim());
    std::vector<RVector> u;
    for (const auto& st : s.states()) u.push_back(group_vector(st, m.target()));
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        const auto& p = m.projector(k).entries;
        std::vector<RVector> pu;
        for (const auto& v : u) pu.push_back(p * v);
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                if (sgn(rest_overlap(s[i], s[j], m.target())) == 0) continue;
                if (sgn(dot(pu[i], pu[j])) != 0) return false;
            }
    }
    return true;
}

bool is_orthogonality_preserving(const StateSet& s, const EffectMeasurement& m) {
    for (const auto& e : m.effects) check_target(s, m.target, e.dim());
    std::vector<RVector> u;
    for (const auto& st : s.states()) u.push_back(group_vector(st, m.target));
    for (const auto& e : m.effects) {
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                if (sgn(rest_overlap(s[i], s[j], m.target)) == 0) continue;
                if (sgn(bilinear(u[i], e.sym, u[j])) != 0) return false;
                if (sgn(bilinear(u[i], e.antisym, u[j])) != 0) return false;
            }
    }
    return true;
}

bool is_trivial(const Measurement& m) {
    const auto id = RMatrix::identity(m.target_dim());
    for (std::size_t i = 0; i < m.outcome_count(); ++i) {
        const auto& p = m.projector(i).entries;
        if (!p.is_zero() && !(p == id)) return false;
    }
    return true;
}

bool has_support(const ProductState& s, const Measurement& m, std::size_t outcome) {
    return !is_zero(m.projector(outcome).entries * group_vector(s, m.target()));
}

StateSet apply_outcome(const StateSet& s, const Measurement& m, const std::string& label) {
    check_target(s, m.target(), m.target_dim());
    const auto& p = m.projector(m.outcome_index(label)).entries;
    std::vector<std::size_t> dims;
    for (auto t : m.target()) dims.push_back(s.spec().dim(t));

    std::vector<ProductState> out;
    for (const auto& st : s.states()) {
        const RVector w = p * group_vector(st, m.target());
        if (is_zero(w)) throw AnnihilatedState(st.id);
        ProductState next = st;
        if (m.target().size() == 1) {
            next.locals[m.target()[0]] = primitive_integer(w);
        } else {
            auto factors = factor_product(w, dims);
            if (!factors) throw NonProductResult(st.id);
            for (std::size_t k = 0; k < dims.size(); ++k) next.locals[m.target()[k]] = primitive_integer((*factors)[k]);
        }
        out.push_back(std::move(next));
    }
    return StateSet(s.spec(), std::move(out));
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

} // namespace

Measurement parse_measurement(const PartySpec& spec, const std::string& text) {
    const auto segments = split(text, ';');
    if (segments.empty()) throw ParseError(1, "empty measurement");
    auto head = trim(segments[0]);
    if (head.rfind("target:", 0) != 0) throw ParseError(1, "measurement must start with 'target:'");
    std::vector<std::size_t> target;
    try {
        for (const auto& name : split(trim(head.substr(7)), ',')) target.push_back(parse_party_name(trim(name)));
    } catch (const StructuralError& e) {
        throw ParseError(1, e.what());
    }
    std::sort(target.begin(), target.end());
    for (auto p : target)
        if (p >= spec.party_count()) throw ParseError(1, "target party out of range");

    std::vector<OutcomeSpec> outcomes;
    for (std::size_t k = 1; k < segments.size(); ++k) {
        const auto seg = trim(segments[k]);
        if (seg.empty()) continue;
        if (seg.rfind("outcome", 0) != 0) throw ParseError(1, "expected 'outcome' in '" + seg + "'");
        const auto colon = seg.find(':');
        if (colon == std::string::npos) throw ParseError(1, "missing ':' in '" + seg + "'");
        OutcomeSpec o;
        o.label = trim(seg.substr(7, colon - 7));
        if (o.label.empty()) throw ParseError(1, "empty outcome label");
        const auto body = trim(seg.substr(colon + 1));
        if (body == "complement") {
            o.complement = true;
        } else if (body.rfind("span", 0) == 0) {
            auto rest = trim(body.substr(4));
            while (!rest.empty()) {
                if (rest[0] != '[') throw ParseError(1, "expected '[' in span of " + o.label);
                const auto close = rest.find(']');
                if (close == std::string::npos) throw ParseError(1, "unterminated vector in span of " + o.label);
                try {
                    o.span.push_back(parse_int_vector(rest.substr(1, close - 1)));
                } catch (const std::invalid_argument& e) {
                    throw ParseError(1, e.what());
                }
                rest = trim(rest.substr(close + 1));
            }
        } else {
            throw ParseError(1, "outcome " + o.label + " must be 'span [...]' or 'complement'");
        }
        outcomes.push_back(std::move(o));
    }
    try {
        return Measurement(spec, target, std::move(outcomes));
    } catch (const StructuralError& e) {
        throw ParseError(1, e.what());
    }
}

std::string format_measurement(const Measurement& m) {
    std::ostringstream out;
    out << "target: ";
    for (std::size_t i = 0; i < m.target().size(); ++i) out << (i ? "," : "") << party_name(m.target()[i]);
    for (const auto& o : m.outcomes()) {
        out << " ; outcome " << o.label << ": ";
        if (o.complement) {
            out << "complement";
            continue;
        }
        out << "span";
        for (const auto& v : o.span) {
            const auto p = primitive_integer(v);
            out << " [";
            for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i].get_num().get_str();
            out << "]";
        }
    }
    return out.str();
}

} // namespace opset

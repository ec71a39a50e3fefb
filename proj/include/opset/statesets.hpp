#pragma once

#include "opset/hilbert.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace opset {

/// Ordered product states sharing one party layout, addressed by unique id.
class StateSet {
public:
    StateSet() = default;
    StateSet(PartySpec spec, std::vector<ProductState> states);

    const PartySpec& spec() const noexcept { return spec_; }
    const std::vector<ProductState>& states() const noexcept { return states_; }
    std::size_t size() const noexcept { return states_.size(); }
    const ProductState& operator[](std::size_t i) const { return states_.at(i); }

    const ProductState& at(const std::string& id) const;
    std::size_t index_of(const std::string& id) const;
    bool contains(const std::string& id) const;
    std::vector<std::string> ids() const;

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    PartySpec spec_;
    std::vector<ProductState> states_;
};

/// Basis indices (p, q, r) a template uses on one party.
struct IndexTriple {
    std::size_t p = 0;
    std::size_t q = 1;
    std::size_t r = 2;

    friend bool operator==(const IndexTriple&, const IndexTriple&) = default;
};

/// Instantiation of the 27-state strongly nonlocal template. Each party has its
/// own dimension and triple; eta = p +/- q and kappa = p +/- r on that party.
/// A 6-dimensional party draws p from {0,4}, q from {1,5}, r from {2,3}; a
/// 3-dimensional party uses (0,1,2).
struct StrongTemplateParams {
    std::vector<std::size_t> dims;
    std::vector<IndexTriple> triples;

    /// Three C^6 parties with the same triple.
    static StrongTemplateParams uniform(IndexTriple t);
    /// Three C^6 parties with individual triples.
    static StrongTemplateParams per_party(IndexTriple a, IndexTriple b, IndexTriple c);
    /// C^3 (x) C^3 (x) C^6 with the triple on the third party only.
    static StrongTemplateParams single_site(IndexTriple c);
};

StateSet build_g1();
StateSet build_g2();
StateSet build_g3();
StateSet build_g4();
StateSet build_tiles_upb();
StateSet build_shifts_upb();
StateSet build_strong_set(const StrongTemplateParams& params);

/// Built-in sets by name: g1 g2 g3 g4 tiles shifts, "strong:p,q,r" (one triple
/// for all parties or three triples separated by '/'), "strong7:p,q,r" for the
/// single-site form. Throws std::invalid_argument for unknown names.
StateSet build_named(const std::string& name);
std::vector<std::string> builtin_set_names();

struct OrthogonalityViolation {
    std::string first;
    std::string second;
    Rational overlap;
};

std::vector<OrthogonalityViolation> check_orthogonality(const StateSet& s);

/// Set restricted, per party, to the coordinates on which some state is nonzero.
struct SupportRestriction {
    StateSet set;
    std::vector<std::vector<std::size_t>> support; // original indices kept per party
};

SupportRestriction restrict_to_support(const StateSet& s);

/// Line-oriented text format:
///   parties 3 6 ; factors p#2: 2*3
///   psi1 | 1,0,0 | 1,-1,0,0,1,-1
/// Locals with non-integer entries are written as their primitive integer multiple.
void write_state_set(std::ostream& out, const StateSet& s);
std::string format_state_set(const StateSet& s);
StateSet read_state_set(std::istream& in);
StateSet parse_state_set(const std::string& text);

/// Comma-separated integer vector, e.g. "1,-1,0".
RVector parse_int_vector(const std::string& text);

} // namespace opset

#pragma once

#include "opset/matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace opset {

/// Local dimensions of each party plus an optional factorization of each
/// party's space into subsystems (e.g. C^6 = C^2 (x) C^3).
class PartySpec {
public:
    PartySpec() = default;
    /// factors may be empty, or hold one entry per party (an empty entry means
    /// the party is not factorized).
    explicit PartySpec(std::vector<std::size_t> dims, std::vector<std::vector<std::size_t>> factors = {});

    std::size_t party_count() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t party) const { return dims_.at(party); }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t total_dim() const;

    bool is_factorized(std::size_t party) const { return !factors_.at(party).empty(); }
    /// Factor dimensions of a party; an unfactorized party reports {dim}.
    std::vector<std::size_t> factor_dims(std::size_t party) const;
    const std::vector<std::vector<std::size_t>>& factorizations() const noexcept { return factors_; }

    friend bool operator==(const PartySpec&, const PartySpec&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::vector<std::size_t>> factors_;
};

/// A single tensor factor of one party. Printed as the lowercase party letter
/// followed by the 1-based factor number ("b2"), or the bare letter ("a") when
/// the party is not factorized.
struct FactorLabel {
    std::size_t party = 0;
    std::size_t factor = 0;

    friend auto operator<=>(const FactorLabel&, const FactorLabel&) = default;
};

std::string party_name(std::size_t party);
std::size_t parse_party_name(const std::string& name);
std::string factor_name(const PartySpec& spec, const FactorLabel& label);
FactorLabel parse_factor_label(const PartySpec& spec, const std::string& text);
std::vector<FactorLabel> all_factors(const PartySpec& spec);

/// Mixed-radix (big-endian) map between a party index and its factor
/// multi-index: for [2,3], index = 3*i + j.
std::vector<std::size_t> to_multi_index(std::size_t index, const std::vector<std::size_t>& factor_dims);
std::size_t from_multi_index(const std::vector<std::size_t>& multi, const std::vector<std::size_t>& factor_dims);

/// Unnormalized product state: one rational vector per party.
struct ProductState {
    std::string id;
    std::vector<RVector> locals;

    friend bool operator==(const ProductState&, const ProductState&) = default;
};

/// Throws StructuralError unless s matches the layout of spec and has no zero local.
void validate_state(const PartySpec& spec, const ProductState& s);

Rational inner_product(const ProductState& s, const ProductState& t);
RVector full_vector(const ProductState& s);

/// Unnormalized, real symmetric density matrix.
struct DensityMatrix {
    RMatrix entries;

    std::size_t dim() const noexcept { return entries.rows(); }
};

/// Partial trace of |s><s| onto the kept factors, in party order then factor
/// order. Keeping every factor gives the outer product of full_vector(s).
DensityMatrix reduced_density(const PartySpec& spec, const ProductState& s, const std::vector<FactorLabel>& keep);

bool densities_orthogonal(const DensityMatrix& r1, const DensityMatrix& r2);

/// Reduced state kept in per-party factored form. A party with no kept factor
/// contributes only its squared norm.
struct FactoredDensity {
    Rational scalar{1};
    std::vector<RMatrix> blocks; // one per party with at least one kept factor
};

FactoredDensity reduced_density_factored(const PartySpec& spec, const ProductState& s,
                                         const std::vector<FactorLabel>& keep);
Rational trace_of_product(const FactoredDensity& a, const FactoredDensity& b);
DensityMatrix expand(const FactoredDensity& f);

/// Partial trace of a single party's |v><v| onto a subset of its factors.
RMatrix local_reduced(const RVector& v, const std::vector<std::size_t>& factor_dims,
                      const std::vector<std::size_t>& kept_factors);

/// Partial trace of a density matrix on a tensor product of subsystems with
/// the given dims, keeping the listed subsystems (increasing order).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& subsystem_dims,
                            const std::vector<std::size_t>& keep);

/// Splits a vector on a tensor product of the given dims into factors whose
/// Kronecker product reproduces it, or nullopt when it is not a product.
std::optional<std::vector<RVector>> factor_product(const RVector& v, const std::vector<std::size_t>& dims);

} // namespace opset

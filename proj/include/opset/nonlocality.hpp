#pragma once

#include "opset/exactla.hpp"
#include "opset/measurements.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace opset {

// ---------------------------------------------------------------------------
// Local redundancy

struct PairWitness {
    std::string first;
    std::string second;
    Rational overlap; // trace(rho_first rho_second) on the kept factors
};

struct DiscardPattern {
    std::vector<FactorLabel> discarded;
    std::vector<FactorLabel> kept;
    std::vector<std::string> discarded_names; // e.g. {"b2"}
    std::vector<PairWitness> witnesses;       // every non-orthogonal reduced pair

    bool orthogonality_preserved() const noexcept { return witnesses.empty(); }
    bool has_witness(const std::string& a, const std::string& b) const;
};

struct RedundancyReport {
    std::vector<DiscardPattern> patterns; // ordered by discard bitmask over all_factors()
    bool redundancy_free = false;

    /// Pattern discarding exactly the named factors (any order).
    const DiscardPattern& pattern(std::vector<std::string> discarded_names) const;
};

/// Tries every nonempty proper subset of factor subsystems as the discarded
/// part. Each pattern is evaluated from scratch on factored reduced states.
RedundancyReport check_local_redundancy(const StateSet& s);

// ---------------------------------------------------------------------------
// Unextendibility

class EnumerationTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct UpbVerdict {
    bool is_upb = false;
    /// Extending product state orthogonal to every member (only when not a UPB).
    std::optional<ProductState> witness;
    /// Party assigned to each state by the assignment that produced the witness.
    std::vector<std::size_t> assignment;
    std::uint64_t search_nodes = 0;
};

inline constexpr std::uint64_t kUpbEnumerationGuard = 10'000'000;

/// Decides unextendibility by searching assignments states -> parties for one
/// that leaves every party's assigned locals in a proper subspace. Throws
/// EnumerationTooLarge when parties^states exceeds the guard.
UpbVerdict check_upb(const StateSet& s, std::uint64_t guard = kUpbEnumerationGuard);

// ---------------------------------------------------------------------------
// Orthogonality-preserving measurement constraints

/// Solution spaces of the constraints <s_i| E (x) I |s_j> = 0 (i != j) on a
/// Hermitian E = S + iA acting on the grouping, computed on the set restricted
/// to its per-party coordinate support. Unknowns are the upper triangle of S
/// (diagonal included) and the strict upper triangle of A, row-major.
struct IrreducibilityCertificate {
    std::vector<std::size_t> grouping;
    std::string grouping_name; // party letters, e.g. "BC"
    std::vector<std::size_t> support_dims; // restricted dimension per grouping party
    std::size_t group_dim = 0;
    std::size_t constraint_rows = 0; // state pairs with nonzero overlap outside the grouping
    std::size_t sym_unknowns = 0;
    std::size_t antisym_unknowns = 0;
    std::size_t sym_rank = 0;
    std::size_t antisym_rank = 0;
    std::size_t sym_dim = 0;
    std::size_t antisym_dim = 0;
    std::vector<RVector> sym_kernel;
    std::vector<RVector> antisym_kernel;
    bool identity_in_kernel = false;

    bool trivial_only() const noexcept { return sym_dim == 1 && antisym_dim == 0; }
    /// "trivial-OPM-only" or "nontrivial-OPM-exists".
    std::string verdict() const;
};

IrreducibilityCertificate opm_certificate(const StateSet& s, const std::vector<std::size_t>& grouping,
                                          const EliminationOptions& opts = {true});

struct OpmDims {
    std::size_t sym_dim = 0;
    std::size_t antisym_dim = 0;
    friend bool operator==(const OpmDims&, const OpmDims&) = default;
};

OpmDims opm_solution_dims(const StateSet& s, const std::vector<std::size_t>& grouping);

struct StrongIrreducibilityReport {
    /// One certificate per single party and per complementary group, sorted by
    /// grouping (size first, then party indices).
    std::vector<IrreducibilityCertificate> certificates;
    bool certified = false;
    /// Human-readable verdict. A nontrivial OPM is reported as "not certified",
    /// never as reducible.
    std::string summary;

    const IrreducibilityCertificate& certificate(const std::string& grouping_name) const;
};

StrongIrreducibilityReport certify_strong_irreducibility(const StateSet& s, std::size_t threads = 1);

/// Concrete two-outcome measurement {E, I - E} on the grouping built from a
/// non-identity kernel vector H as E = (I + H/(1+g))/2, where g bounds the
/// spectral radius of H by Gershgorin row sums. Operators live on the full
/// grouping space of s (zero outside the support). nullopt for a trivial-only
/// certificate.
struct MaterializedOpm {
    EffectMeasurement measurement;
    Rational gershgorin_bound;
    bool orthogonality_preserving = false;
    bool nontrivial = false; // E is not a multiple of the identity
};

std::optional<MaterializedOpm> materialize_nontrivial_opm(const StateSet& s, const IrreducibilityCertificate& cert);

std::string grouping_name(const std::vector<std::size_t>& grouping);

} // namespace opset

#pragma once

#include "opset/statesets.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace opset {

/// Orthogonal projector onto a rational subspace.
struct Projector {
    RMatrix entries;

    std::size_t dim() const noexcept { return entries.rows(); }
};

/// Projector onto span(vectors), computed as V (V^T V)^{-1} V^T on a maximal
/// independent subset. An empty or all-zero list gives the zero projector.
Projector projector_from_span(const std::vector<RVector>& vectors, std::size_t dim);

struct OutcomeSpec {
    std::string label;
    std::vector<RVector> span; // ignored when complement is set
    bool complement = false;   // identity minus every other outcome
};

/// Projective measurement on one party or a group of parties. The target space
/// is the tensor product of the target parties in increasing party order.
/// Projectors are computed once at construction.
class Measurement {
public:
    Measurement() = default;
    Measurement(std::vector<std::size_t> target, std::size_t target_dim, std::vector<OutcomeSpec> outcomes);
    /// Target dimension taken from the parties of spec.
    Measurement(const PartySpec& spec, std::vector<std::size_t> target, std::vector<OutcomeSpec> outcomes);

    static Measurement identity(std::vector<std::size_t> target, std::size_t target_dim);

    const std::vector<std::size_t>& target() const noexcept { return target_; }
    std::size_t target_dim() const noexcept { return target_dim_; }
    const std::vector<OutcomeSpec>& outcomes() const noexcept { return outcomes_; }
    std::size_t outcome_count() const noexcept { return outcomes_.size(); }
    const Projector& projector(std::size_t i) const { return projectors_.at(i); }
    std::size_t outcome_index(const std::string& label) const;

private:
    std::vector<std::size_t> target_;
    std::size_t target_dim_ = 0;
    std::vector<OutcomeSpec> outcomes_;
    std::vector<Projector> projectors_;
};

/// Hermitian operator S + iA with S symmetric and A antisymmetric, both rational.
struct HermitianOperator {
    RMatrix sym;
    RMatrix antisym;

    static HermitianOperator real(RMatrix s);
    std::size_t dim() const noexcept { return sym.rows(); }
};

/// Two-or-more-outcome measurement given by effect operators (not necessarily
/// projectors), acting on a party group.
struct EffectMeasurement {
    std::vector<std::size_t> target;
    std::vector<HermitianOperator> effects;
};

/// True iff the outcome projectors are symmetric idempotents summing to I.
bool check_completeness(const Measurement& m, std::size_t dim);
bool check_completeness(const Measurement& m);

/// True iff every outcome leaves all projected states pairwise orthogonal,
/// i.e. <s_i| P (x) I |s_j> = 0 for every outcome P and i != j.
bool is_orthogonality_preserving(const StateSet& s, const Measurement& m);
bool is_orthogonality_preserving(const StateSet& s, const EffectMeasurement& m);

/// True iff every outcome projector is 0 or I.
bool is_trivial(const Measurement& m);

/// Local vectors of the target parties combined into one target-space vector.
RVector group_vector(const ProductState& s, const std::vector<std::size_t>& target);
Rational rest_overlap(const ProductState& s, const ProductState& t, const std::vector<std::size_t>& target);

/// Outcome probability support: the projection of s onto outcome i is nonzero.
bool has_support(const ProductState& s, const Measurement& m, std::size_t outcome);

class AnnihilatedState : public std::runtime_error {
public:
    explicit AnnihilatedState(std::string id)
        : std::runtime_error("state " + id + " projects to zero"), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class NonProductResult : public std::runtime_error {
public:
    explicit NonProductResult(const std::string& id)
        : std::runtime_error("projection of " + id + " is not a product across the measured group") {}
};

/// Projects every state onto the outcome's subspace; locals are rescaled to
/// primitive integer vectors.
StateSet apply_outcome(const StateSet& s, const Measurement& m, const std::string& label);

/// Measurement text format:
///   target: B ; outcome K1: span [1,0,0] [0,1,0] ; outcome K2: complement
Measurement parse_measurement(const PartySpec& spec, const std::string& text);
std::string format_measurement(const Measurement& m);

} // namespace opset

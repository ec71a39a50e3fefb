#pragma once

#include "opset/nonlocality.hpp"
#include "opset/protocols.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace opset {

class RelabelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Partial basis relabeling per party. A party with a map keeps only the
/// mapped coordinates, moved to their new positions in a space of target_dim;
/// a party without one is left unchanged.
class RelabelingMap {
public:
    struct PartyMap {
        std::size_t target_dim = 0;
        std::map<std::size_t, std::size_t> index; // source index -> target index
    };

    RelabelingMap() = default;

    /// Throws RelabelError when the index map is not injective or leaves target_dim.
    RelabelingMap& set(std::size_t party, std::size_t target_dim, std::map<std::size_t, std::size_t> index);
    const std::optional<PartyMap>& party(std::size_t p) const;
    bool empty() const noexcept { return parties_.empty(); }

    /// Throws RelabelError when a state has support outside a party's domain.
    ProductState apply(const ProductState& s) const;
    StateSet apply(const StateSet& s) const;

    std::string describe() const;

private:
    std::vector<std::optional<PartyMap>> parties_;
};

struct MatchResult {
    bool matched = false;
    std::vector<std::size_t> bijection; // index in a -> index in b
    std::vector<Rational> scalars;      // full-vector ratio a_i / b_bijection[i]
    std::string reason;                 // empty when matched

    /// Identity bijection with every scalar equal to 1.
    bool verbatim() const;
};

/// Searches for a bijection between the states of (relabeled) a and b such
/// that matched states are proportional. Failure is reported, never thrown.
MatchResult match_sets(const StateSet& a, const StateSet& b, const std::optional<RelabelingMap>& relabel = std::nullopt);

struct MeasurementStep {
    std::string party;
    std::string measure_name;
    bool orthogonality_preserving = false;
};

struct OutcomeReport {
    std::string label; // outcome labels along the way, e.g. "K1" or "K1,K2,K1"
    std::vector<MeasurementStep> steps;
    std::size_t input_states = 0;
    std::size_t output_states = 0;
    std::vector<std::string> annihilated;
    bool pairwise_orthogonal = false;
    std::string target; // built-in set name of the claimed target
    std::string relabel;
    MatchResult match;
    std::optional<UpbVerdict> upb;
    std::optional<StrongIrreducibilityReport> irreducibility;
    StateSet outcome_set; // after relabeling, when one applies
    bool pass = false;

    bool deterministic() const noexcept { return annihilated.empty(); }
};

struct TheoremReport {
    std::string theorem; // "theorem1" .. "theorem4"
    std::string measurement; // text form of the local OPM
    std::vector<OutcomeReport> outcomes;
    bool pass = false;
};

TheoremReport verify_theorem1();
TheoremReport verify_theorem2();
TheoremReport verify_theorem3(std::size_t threads = 1);
TheoremReport verify_theorem4(std::size_t threads = 1);

/// Two-outcome projective measurement {P[0,1,2], P[3,4,5]} on one C^6 party.
Measurement split_measurement(std::size_t party);

/// Local distinguishability contrast for the activation targets: each seed set
/// against its shipped protocol, and each target set against every shipped
/// protocol that fits its layout.
struct ContrastEntry {
    std::string set;
    std::string protocol;
    bool applicable = false; // the protocol fits the set's layout
    bool distinguished = false;
    std::string note;
};

struct ContrastReport {
    std::vector<ContrastEntry> seeds;
    std::vector<ContrastEntry> targets;
    /// Every target is a UPB (tiles, shifts) or certified strongly irreducible
    /// (27-state templates).
    std::map<std::string, bool> target_proxy;
    bool holds = false;
};

ContrastReport contrast_fixtures(BranchingPolicy seed_policy = BranchingPolicy::Deterministic);

} // namespace opset

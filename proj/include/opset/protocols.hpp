#pragma once

#include "opset/measurements.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace opset {

class MalformedTree : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProtocolLeaf {
    std::vector<std::string> candidates;
};

struct ProtocolSplit {
    std::size_t party = 0;
    std::string measure_name;
    Measurement measurement;
    std::vector<std::pair<std::string, std::size_t>> children; // outcome label -> node index
};

/// Adaptive LOCC discrimination tree. Nodes live in a flat arena; node 0 is
/// the root. Trees are composed bottom-up with leaf() and split().
class ProtocolTree {
public:
    using Node = std::variant<ProtocolLeaf, ProtocolSplit>;

    static ProtocolTree leaf(std::vector<std::string> candidates);
    static ProtocolTree split(std::size_t party, std::string measure_name, Measurement m,
                              std::vector<std::pair<std::string, ProtocolTree>> children);

    const Node& root() const { return nodes_.at(0); }
    const Node& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Throws MalformedTree when a measurement is incomplete, acts on a party
    /// other than the acting one, does not fit the layout, or when outcome
    /// labels and child branches disagree.
    void validate(const PartySpec& spec) const;

private:
    std::vector<Node> nodes_;
};

enum class BranchingPolicy {
    /// A state with support in two or more outcomes fails the walk.
    Deterministic,
    /// Such a state is followed down every supported branch with its projected
    /// post-measurement state; the event is still recorded.
    Probabilistic,
};

struct SimulationOptions {
    BranchingPolicy branching = BranchingPolicy::Deterministic;
};

struct NondeterministicBranch {
    std::string state;
    std::string node_path;
    std::vector<std::string> outcomes;
};

struct NodeReport {
    std::string path;
    std::string party;
    std::string measure_name;
    std::vector<std::string> candidates;
    bool orthogonality_preserving = true;
    bool deterministic = true;
};

struct LeafReport {
    std::string path;
    std::vector<std::string> declared;
    std::vector<std::string> computed;
    bool bookkeeping_ok = true;
};

struct StateReport {
    std::string id;
    std::vector<std::string> paths; // one per leaf reached
    bool distinguished = false;
    std::string reason; // empty when distinguished
};

struct SimulationReport {
    std::vector<StateReport> states;
    std::vector<NodeReport> nodes;
    std::vector<LeafReport> leaves;
    std::vector<NondeterministicBranch> nondeterministic;
    std::size_t max_leaf_candidates = 0;
    bool distinguished = false;

    const StateReport& state(const std::string& id) const;
};

SimulationReport simulate(const StateSet& s, const ProtocolTree& t, const SimulationOptions& opts = {});

ProtocolTree build_g1_protocol();
ProtocolTree build_g2_protocol();
ProtocolTree build_g3_protocol();
ProtocolTree build_g4_protocol();

/// Built-in protocol for a built-in set name (g1..g4).
ProtocolTree builtin_protocol(const std::string& set_name);

/// Text format: one `measure <name> = <measurement>` line per measurement,
/// then a nested tree such as
///   node party=B measure=N_B { N1 -> leaf{psi3}, N4 -> leaf{psi1,psi2} }
std::string format_protocol(const ProtocolTree& t);
ProtocolTree parse_protocol(const PartySpec& spec, const std::string& text);

} // namespace opset

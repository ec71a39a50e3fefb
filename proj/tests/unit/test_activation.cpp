#include "opset/activation.hpp"

#include "../oracle/plain_rational.hpp"

#include <doctest.h>

#include <map>

using namespace opset;

namespace {

// Independent projection: keep the coordinates of `party` listed in `from`,
// moving coordinate from[k] to to[k] in a fresh space of dimension new_dim.
// States whose projected local vanishes are dropped.
std::vector<oracle::Row> project_and_relabel(const StateSet& s, std::size_t party, const std::vector<std::size_t>& from,
                                             const std::vector<std::size_t>& to, std::size_t new_dim) {
    std::vector<oracle::Row> out;
    for (const auto& st : s.states()) {
        ProductState t = st;
        RVector local(new_dim, Rational(0));
        bool nonzero = false;
        for (std::size_t k = 0; k < from.size(); ++k) {
            local[to[k]] = st.locals[party][from[k]];
            nonzero = nonzero || local[to[k]] != 0;
        }
        if (!nonzero) continue;
        t.locals[party] = local;
        out.push_back(oracle::expand(t));
    }
    return out;
}

// Every row of `got` is proportional to exactly one target state and each
// target is hit once.
bool same_up_to_scalars(const std::vector<oracle::Row>& got, const StateSet& target) {
    if (got.size() != target.size()) return false;
    std::vector<bool> used(target.size(), false);
    for (const auto& g : got) {
        bool found = false;
        for (std::size_t j = 0; j < target.size() && !found; ++j)
            if (!used[j] && oracle::proportional(g, oracle::expand(target[j]))) used[j] = found = true;
        if (!found) return false;
    }
    return true;
}

bool scalars_are_small(const MatchResult& m) {
    for (const auto& q : m.scalars)
        if (q != 1 && q != -1 && q != 2 && q != -2) return false;
    return true;
}

} // namespace

TEST_CASE("matching sets up to scalars") {
    const auto tiles = build_tiles_upb();
    const auto self = match_sets(tiles, tiles);
    CHECK(self.matched);
    CHECK(self.verbatim());
    const auto mismatch = match_sets(tiles, build_shifts_upb());
    CHECK_FALSE(mismatch.matched);
    CHECK_FALSE(mismatch.reason.empty());

    // Reversing the order and flipping a sign still matches.
    std::vector<ProductState> rev(tiles.states().rbegin(), tiles.states().rend());
    rev[0].locals[0] = {-rev[0].locals[0][0], -rev[0].locals[0][1], -rev[0].locals[0][2]};
    const auto m = match_sets(StateSet(tiles.spec(), rev), tiles);
    REQUIRE(m.matched);
    CHECK_FALSE(m.verbatim());
    CHECK(m.bijection[0] == 4);
    CHECK(m.scalars[0] == -1);
}

TEST_CASE("relabeling maps") {
    RelabelingMap r;
    CHECK_THROWS_AS(r.set(1, 3, {{0, 0}, {1, 0}}), RelabelError);
    r.set(1, 3, {{3, 2}, {4, 0}, {5, 1}});
    const ProductState inside{"x", {{1, 0, 0}, {0, 0, 0, 1, 1, 0}}};
    const auto moved = r.apply(inside);
    CHECK(moved.locals[1] == RVector{1, 0, 1});
    const ProductState outside{"y", {{1, 0, 0}, {1, 0, 0, 1, 0, 0}}};
    CHECK_THROWS_AS(r.apply(outside), RelabelError);
    CHECK_FALSE(r.describe().empty());
}

TEST_CASE("first theorem") {
    const auto rep = verify_theorem1();
    CHECK(rep.pass);
    REQUIRE(rep.outcomes.size() == 2);
    for (const auto& o : rep.outcomes) {
        CHECK(o.deterministic());
        CHECK(o.pairwise_orthogonal);
        CHECK(o.output_states == 5);
        CHECK(o.match.matched);
        CHECK(scalars_are_small(o.match));
        REQUIRE(o.upb.has_value());
        CHECK(o.upb->is_upb);
        CHECK(oracle::is_upb(o.outcome_set));
        CHECK(o.steps.front().orthogonality_preserving);
    }
    CHECK(rep.outcomes[0].match.verbatim());
    const auto g1 = build_g1();
    const auto tiles = build_tiles_upb();
    CHECK(same_up_to_scalars(project_and_relabel(g1, 1, {0, 1, 2}, {0, 1, 2}, 3), tiles));
    CHECK(same_up_to_scalars(project_and_relabel(g1, 1, {3, 4, 5}, {2, 0, 1}, 3), tiles));
}

TEST_CASE("second theorem") {
    const auto rep = verify_theorem2();
    CHECK(rep.pass);
    REQUIRE(rep.outcomes.size() == 2);
    for (const auto& o : rep.outcomes) {
        CHECK(o.deterministic());
        CHECK(o.output_states == 4);
        CHECK(o.match.matched);
        CHECK(scalars_are_small(o.match));
        CHECK(o.upb->is_upb);
        CHECK(oracle::is_upb(o.outcome_set));
    }
    const auto g2 = build_g2();
    const auto shifts = build_shifts_upb();
    CHECK(same_up_to_scalars(project_and_relabel(g2, 2, {0, 1}, {0, 1}, 2), shifts));
    CHECK(same_up_to_scalars(project_and_relabel(g2, 2, {2, 3}, {1, 0}, 2), shifts));
    // The identity-ordered map on the second outcome lands on a flipped copy.
    CHECK_FALSE(same_up_to_scalars(project_and_relabel(g2, 2, {2, 3}, {0, 1}, 2), shifts));
}

TEST_CASE("third theorem") {
    const auto rep = verify_theorem3();
    CHECK(rep.pass);
    REQUIRE(rep.outcomes.size() == 8);
    const std::map<std::string, std::string> expected{
        {"K1,K1,K1", "strong:0,1,2/0,1,2/0,1,2"}, {"K2,K2,K2", "strong:4,5,3/4,5,3/4,5,3"},
        {"K1,K2,K1", "strong:0,1,2/4,5,3/0,1,2"}};
    for (const auto& o : rep.outcomes) {
        CHECK(o.output_states == 27);
        CHECK(o.deterministic());
        CHECK(o.match.matched);
        if (o.label == "K1,K1,K1") CHECK(o.match.verbatim());
        for (std::size_t i = 0; i < o.match.bijection.size(); ++i) CHECK(o.match.bijection[i] == i);
        CHECK(scalars_are_small(o.match));
        REQUIRE(o.irreducibility.has_value());
        CHECK(o.irreducibility->certified);
        if (auto it = expected.find(o.label); it != expected.end()) CHECK(o.target == it->second);
        for (const auto& step : o.steps) CHECK(step.orthogonality_preserving);
    }
}

TEST_CASE("fourth theorem") {
    const auto rep = verify_theorem4();
    CHECK(rep.pass);
    REQUIRE(rep.outcomes.size() == 2);
    for (const auto& o : rep.outcomes) {
        CHECK(o.output_states == 27);
        CHECK(o.match.matched);
        CHECK(o.irreducibility->certified);
    }
    CHECK(rep.outcomes[0].target == "strong7:0,1,2");
    CHECK(rep.outcomes[1].target == "strong7:4,5,3");
}

TEST_CASE("theorem reports are reproducible") {
    const auto a = verify_theorem3(1);
    const auto b = verify_theorem3(4);
    REQUIRE(a.outcomes.size() == b.outcomes.size());
    for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
        CHECK(a.outcomes[i].label == b.outcomes[i].label);
        CHECK(a.outcomes[i].outcome_set == b.outcomes[i].outcome_set);
        CHECK(a.outcomes[i].match.scalars == b.outcomes[i].match.scalars);
    }
    const auto c = verify_theorem1();
    const auto d = verify_theorem1();
    CHECK(c.outcomes[1].match.scalars == d.outcomes[1].match.scalars);
    CHECK(c.outcomes[1].outcome_set == d.outcomes[1].outcome_set);
}

TEST_CASE("split measurement") {
    const auto m = split_measurement(1);
    CHECK(check_completeness(m, 6));
    CHECK(m.outcome_count() == 2);
    CHECK(is_orthogonality_preserving(build_g1(), m));
    CHECK(is_orthogonality_preserving(build_g3(), split_measurement(0)));
}

TEST_CASE("contrast fixtures") {
    const auto strict = contrast_fixtures();
    for (const auto& [name, ok] : strict.target_proxy) CHECK_MESSAGE(ok, name);
    const auto lax = contrast_fixtures(BranchingPolicy::Probabilistic);
    CHECK(lax.holds);
    for (const auto& e : lax.seeds) CHECK_MESSAGE(e.distinguished, e.set);
    for (const auto& e : lax.targets) CHECK_MESSAGE(!e.distinguished, std::string(e.set + " / " + e.protocol));
}

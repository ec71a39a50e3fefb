#include "opset/activation.hpp"
#include "opset/errors.hpp"

#include "../oracle/plain_rational.hpp"

#include <doctest.h>

using namespace opset;

namespace {

Measurement m1(std::size_t party) {
    return Measurement({party}, 6,
                       {{"P1", {ket(6, "0-4")}, false},
                        {"P2", {ket(6, "1-5")}, false},
                        {"P3", {ket(6, "2-3")}, false},
                        {"P4", {}, true}});
}

// Projected-pair check written directly from the definition.
bool brute_force_opm(const StateSet& s, const Measurement& m) {
    const std::size_t p = m.target()[0];
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        const auto& proj = m.projector(k).entries;
        std::vector<ProductState> projected;
        for (const auto& st : s.states()) {
            ProductState t = st;
            t.locals[p] = proj * st.locals[p];
            projected.push_back(t);
        }
        for (std::size_t i = 0; i < projected.size(); ++i)
            for (std::size_t j = i + 1; j < projected.size(); ++j)
                if (oracle::dot(oracle::expand(projected[i]), oracle::expand(projected[j])) != 0) return false;
    }
    return true;
}

} // namespace

TEST_CASE("projector from span") {
    const auto p = projector_from_span({unit_vector(2, 0)}, 2);
    CHECK(p.entries == RMatrix::outer(unit_vector(2, 0), unit_vector(2, 0)));
    const auto q = projector_from_span({ket(6, "0-4")}, 6);
    CHECK(q.entries(0, 0) == Rational(1, 2));
    CHECK(q.entries(4, 4) == Rational(1, 2));
    CHECK(q.entries(0, 4) == Rational(-1, 2));
    CHECK(q.entries(4, 0) == Rational(-1, 2));
    CHECK(q.entries(1, 1) == 0);
    CHECK(projector_from_span({unit_vector(2, 0), unit_vector(2, 0)}, 2).entries == p.entries);
    const auto r = projector_from_span({ket(6, "0+1+4+5"), ket(6, "0-1+4-5"), ket(6, "0+1")}, 6);
    CHECK(r.entries * r.entries == r.entries);
    CHECK(r.entries.is_symmetric());
    CHECK(r.entries.trace() == 3);
}

TEST_CASE("completeness") {
    CHECK(check_completeness(m1(0), 6));
    CHECK(check_completeness(split_measurement(0), 6));
    const Measurement half({0}, 2, {{"P", {unit_vector(2, 0)}, false}});
    CHECK_FALSE(check_completeness(half, 2));
    CHECK_THROWS_AS(Measurement({0}, 2, {{"A", {}, true}, {"B", {}, true}}), StructuralError);
}

TEST_CASE("orthogonality preservation") {
    const auto g1 = build_g1();
    CHECK(is_orthogonality_preserving(g1, split_measurement(1)));
    const Measurement rank_one({1}, 6, {{"E0", {unit_vector(6, 0)}, false}, {"rest", {}, true}});
    CHECK(is_orthogonality_preserving(g1, rank_one) == brute_force_opm(g1, rank_one));
    CHECK(is_orthogonality_preserving(g1, split_measurement(1)) == brute_force_opm(g1, split_measurement(1)));
    for (std::size_t p = 0; p < 3; ++p) {
        CHECK(is_orthogonality_preserving(build_g3(), m1(p)) == brute_force_opm(build_g3(), m1(p)));
        CHECK(is_orthogonality_preserving(build_g3(), Measurement::identity({p}, 6)));
    }
}

TEST_CASE("triviality") {
    CHECK(is_trivial(Measurement::identity({0}, 3)));
    CHECK_FALSE(is_trivial(split_measurement(0)));
    CHECK_FALSE(is_trivial(m1(0)));
}

TEST_CASE("applying outcomes") {
    const auto g1 = build_g1();
    const auto k = split_measurement(1);
    const auto first = apply_outcome(g1, k, "K1");
    CHECK(first.at("psi3").locals[0] == RVector{0, 1, -1});
    CHECK(first.at("psi3").locals[1] == unit_vector(6, 0));
    const auto second = apply_outcome(g1, k, "K2");
    CHECK(second.at("psi1").locals[0] == unit_vector(3, 0));
    CHECK(second.at("psi1").locals[1] == ket(6, "4-5"));
    CHECK(second.spec() == g1.spec());
    CHECK(check_orthogonality(first).empty());
    CHECK(check_orthogonality(second).empty());

    // A state already inside the outcome is unchanged.
    const StateSet inside(PartySpec({2, 2}), {{"s", {{1, 0}, {0, 1}}}});
    const Measurement z({0}, 2, {{"Z0", {unit_vector(2, 0)}, false}, {"Z1", {}, true}});
    CHECK(apply_outcome(inside, z, "Z0") == inside);
    CHECK_THROWS_AS(apply_outcome(inside, z, "Z1"), AnnihilatedState);
}

TEST_CASE("outcome projections sum back to each state") {
    const auto g3 = build_g3();
    const auto m = m1(0);
    for (const auto& st : g3.states()) {
        RVector sum(6);
        for (std::size_t k = 0; k < m.outcome_count(); ++k) {
            const auto part = m.projector(k).entries * st.locals[0];
            for (std::size_t i = 0; i < 6; ++i) sum[i] += part[i];
        }
        CHECK(sum == st.locals[0]);
    }
}

TEST_CASE("grouped measurements") {
    const StateSet s(PartySpec({2, 2, 2}), {{"a", {{1, 0}, {1, 1}, {1, 1}}}, {"b", {{1, 1}, {1, 0}, {1, -1}}}});
    const Measurement g({0, 1}, 4, {{"G0", {kron({RVector{1, 0}, RVector{1, 0}})}, false}, {"G1", {}, true}});
    CHECK(check_completeness(g, 4));
    const auto out = apply_outcome(s, g, "G1");
    CHECK(proportionality(out.at("a").locals[0], RVector{1, 0}) != 0);
    CHECK(proportionality(out.at("a").locals[1], RVector{0, 1}) != 0);
    CHECK(proportionality(out.at("b").locals[0], RVector{0, 1}) != 0);
    CHECK(proportionality(out.at("b").locals[1], RVector{1, 0}) != 0);
    CHECK(out.at("b").locals[2] == s.at("b").locals[2]);
    const StateSet u(PartySpec({2, 2, 2}), {{"a", {{1, 0}, {1, 0}, {1, 1}}}, {"b", {{0, 1}, {1, 1}, {1, 0}}}});
    CHECK_THROWS_AS(apply_outcome(u, g, "G1"), AnnihilatedState);
    const Measurement bell({0, 1}, 4, {{"B", {RVector{1, 0, 0, 1}}, false}, {"rest", {}, true}});
    const StateSet t(PartySpec({2, 2, 2}), {{"a", {{1, 0}, {1, 0}, {1, 0}}}});
    CHECK_THROWS_AS(apply_outcome(t, bell, "rest"), NonProductResult);
}

TEST_CASE("effect measurements") {
    const auto g1 = build_g1();
    const auto k = split_measurement(1);
    EffectMeasurement e{{1}, {HermitianOperator::real(k.projector(0).entries), HermitianOperator::real(k.projector(1).entries)}};
    CHECK(is_orthogonality_preserving(g1, e));
}

TEST_CASE("measurement text format") {
    const auto spec = build_g1().spec();
    const auto m = parse_measurement(spec, "target: B ; outcome K1: span [1,0,0,0,0,0] [0,1,0,0,0,0] [0,0,1,0,0,0] ; outcome K2: complement");
    CHECK(m.target() == std::vector<std::size_t>{1});
    CHECK(m.outcome_count() == 2);
    CHECK(m.projector(1).entries == split_measurement(1).projector(1).entries);
    CHECK(parse_measurement(spec, format_measurement(m)).projector(0).entries == m.projector(0).entries);
    CHECK_THROWS(parse_measurement(spec, "target: Q ; outcome K1: complement"));
    CHECK_THROWS(parse_measurement(spec, "target: B ; outcome K1: span [1,0]"));
}

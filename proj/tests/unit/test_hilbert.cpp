#include "opset/errors.hpp"
#include "opset/statesets.hpp"

#include "../oracle/plain_rational.hpp"

#include <doctest.h>

#include <random>

using namespace opset;

namespace {

ProductState random_state(std::mt19937_64& rng, const std::vector<std::size_t>& dims) {
    std::uniform_int_distribution<long> e(-2, 2);
    ProductState s{"r", {}};
    for (auto d : dims) {
        RVector v(d);
        do {
            for (auto& x : v) x = e(rng);
        } while (is_zero(v));
        s.locals.push_back(v);
    }
    return s;
}

} // namespace

TEST_CASE("party layout validation") {
    CHECK_THROWS_AS(PartySpec({1, 3}), StructuralError);
    CHECK_THROWS_AS(PartySpec({6}, {{2, 2}}), StructuralError);
    const PartySpec g1({3, 6}, {{}, {2, 3}});
    CHECK(g1.factor_dims(0) == std::vector<std::size_t>{3});
    CHECK(g1.factor_dims(1) == std::vector<std::size_t>{2, 3});
    CHECK(g1.total_dim() == 18);
}

TEST_CASE("factor index map is big-endian") {
    CHECK(from_multi_index({1, 2}, {2, 3}) == 5);
    CHECK(from_multi_index({1, 0}, {2, 3}) == 3);
    CHECK(to_multi_index(4, {2, 3}) == std::vector<std::size_t>{1, 1});
    CHECK(from_multi_index({1, 1}, {2, 2}) == 3);
}

TEST_CASE("factor labels") {
    const auto g1 = build_g1();
    CHECK(factor_name(g1.spec(), {1, 1}) == "b2");
    CHECK(factor_name(g1.spec(), {0, 0}) == "a");
    CHECK(parse_factor_label(g1.spec(), "b1").factor == 0);
    CHECK_THROWS_AS(parse_factor_label(g1.spec(), "a1"), StructuralError);
    CHECK(all_factors(g1.spec()).size() == 3);
}

TEST_CASE("inner products on the seed sets") {
    const auto g1 = build_g1();
    CHECK(inner_product(g1.at("psi1"), g1.at("psi5")) == 0);
    CHECK(inner_product(g1.at("psi5"), g1.at("psi5")) == 18);
    const auto g3 = build_g3();
    CHECK(inner_product(g3.at("xi1+"), g3.at("xi1-")) == 0);
    CHECK(dot(g3.at("xi1+").locals[2], g3.at("xi1-").locals[2]) == 0);
    CHECK_THROWS_AS(inner_product(g1.at("psi1"), g3.at("xi5")), StructuralError);
}

TEST_CASE("full vector convention") {
    const ProductState a{"a", {{1, 0}, {1, 0}}};
    CHECK(full_vector(a) == RVector{1, 0, 0, 0});
    const ProductState b{"b", {{1, -1}, {0, 1}}};
    CHECK(full_vector(b) == RVector{0, 1, 0, -1});
    const auto v = full_vector(build_g1().at("psi3"));
    std::size_t nonzero = 0;
    for (const auto& x : v) {
        if (sgn(x) != 0) {
            ++nonzero;
            CHECK(abs(x) == 1);
        }
    }
    CHECK(nonzero == 4);
}

TEST_CASE("inner product matches full expansion on random states") {
    std::mt19937_64 rng(3);
    const std::vector<std::size_t> dims{2, 3, 4};
    for (int i = 0; i < 50; ++i) {
        const auto s = random_state(rng, dims);
        const auto t = random_state(rng, dims);
        CHECK(inner_product(s, t) == oracle::dot(oracle::expand(s), oracle::expand(t)));
        CHECK(full_vector(s) == oracle::expand(s));
    }
}

TEST_CASE("reduced density keeping everything is the full outer product") {
    const auto g1 = build_g1();
    const auto& s = g1.at("psi3");
    const auto rho = reduced_density(g1.spec(), s, all_factors(g1.spec()));
    const auto v = full_vector(s);
    CHECK(rho.entries == RMatrix::outer(v, v));
    CHECK(rho.entries.trace() == inner_product(s, s));
}

TEST_CASE("reduced density errors") {
    const auto g1 = build_g1();
    CHECK_THROWS_AS(reduced_density(g1.spec(), g1[0], {}), StructuralError);
    CHECK_THROWS_AS(densities_orthogonal(DensityMatrix{RMatrix(2, 2)}, DensityMatrix{RMatrix(3, 3)}), StructuralError);
}

TEST_CASE("tracing out the second qutrit of xi1 leaves a mixed qubit block") {
    const auto g3 = build_g3();
    const auto& spec = g3.spec();
    std::vector<FactorLabel> keep;
    for (const auto& f : all_factors(spec))
        if (!(f.party == 2 && f.factor == 1)) keep.push_back(f);
    const auto plus = reduced_density_factored(spec, g3.at("xi1+"), keep);
    const auto minus = reduced_density_factored(spec, g3.at("xi1-"), keep);
    // Charlie's qubit block: (1/2)|a><a| + (1/4) I up to scale, a = 0 +/- 1.
    const RMatrix& c = plus.blocks.back();
    REQUIRE(c.rows() == 2);
    CHECK(c(0, 0) == c(1, 1));
    CHECK(c(0, 1) == c(1, 0));
    CHECK(c(0, 0) == 2 * abs(c(0, 1)));
    CHECK(sgn(trace_of_product(plus, minus)) != 0);
    CHECK_FALSE(densities_orthogonal(expand(plus), expand(minus)));
}

TEST_CASE("dense and factored reductions agree") {
    for (const auto& name : {"g1", "g2", "g4"}) {
        const auto s = build_named(name);
        const auto factors = all_factors(s.spec());
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << factors.size()); ++mask) {
            std::vector<FactorLabel> keep;
            for (std::size_t f = 0; f < factors.size(); ++f)
                if (mask >> f & 1) keep.push_back(factors[f]);
            for (std::size_t i = 0; i < s.size(); ++i) {
                const auto dense = reduced_density(s.spec(), s[i], keep);
                CHECK(expand(reduced_density_factored(s.spec(), s[i], keep)).entries == dense.entries);
            }
        }
    }
}

TEST_CASE("reduced density agrees with the entrywise oracle") {
    const auto g1 = build_g1();
    // Subsystems a, b1, b2 with dims 3, 2, 3.
    const std::vector<std::size_t> dims{3, 2, 3};
    const std::vector<std::vector<std::size_t>> keeps{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}};
    const auto factors = all_factors(g1.spec());
    for (const auto& k : keeps) {
        std::vector<FactorLabel> keep;
        for (auto i : k) keep.push_back(factors[i]);
        for (const auto& st : g1.states()) {
            const auto mine = reduced_density(g1.spec(), st, keep);
            const auto ref = oracle::partial_trace_vector(oracle::expand(st), dims, k);
            for (std::size_t a = 0; a < ref.size(); ++a)
                for (std::size_t b = 0; b < ref.size(); ++b) CHECK(mine.entries(a, b) == ref[a][b]);
        }
    }
}

TEST_CASE("sequential partial traces commute") {
    const auto g2 = build_g2();
    const auto& s = g2.at("phi4");
    const auto v = full_vector(s);
    const DensityMatrix rho{RMatrix::outer(v, v)};
    // Subsystems a, b, c1, c2 with dims 2, 2, 2, 2.
    const std::vector<std::size_t> dims{2, 2, 2, 2};
    const auto once = partial_trace(rho, dims, {0, 3});
    const auto step1 = partial_trace(rho, dims, {0, 2, 3});
    const auto step2 = partial_trace(step1, {2, 2, 2}, {0, 2});
    const auto other1 = partial_trace(rho, dims, {0, 1, 3});
    const auto other2 = partial_trace(other1, {2, 2, 2}, {0, 2});
    CHECK(once.entries == step2.entries);
    CHECK(once.entries == other2.entries);
}

TEST_CASE("orthogonal locals on a kept party keep reduced states orthogonal") {
    const PartySpec spec({2, 2});
    const ProductState s{"s", {{1, 0}, {1, 1}}};
    const ProductState t{"t", {{0, 1}, {1, -1}}};
    for (const auto& keep : std::vector<std::vector<FactorLabel>>{{{0, 0}}, {{0, 0}, {1, 0}}}) {
        CHECK(densities_orthogonal(reduced_density(spec, s, keep), reduced_density(spec, t, keep)));
    }
    CHECK(densities_orthogonal(DensityMatrix{RMatrix::outer({1, 0}, {1, 0})}, DensityMatrix{RMatrix::outer({0, 1}, {0, 1})}));
    CHECK(densities_orthogonal(DensityMatrix{RMatrix::outer({1, 0}, {1, 0})}, DensityMatrix{RMatrix(2, 2)}));
}

TEST_CASE("product factorization") {
    const auto v = kron({RVector{1, -1}, RVector{0, 2, 1}});
    const auto f = factor_product(v, {2, 3});
    REQUIRE(f.has_value());
    CHECK(kron(*f) == v);
    CHECK_FALSE(factor_product(RVector{1, 0, 0, 1}, {2, 2}).has_value());
}

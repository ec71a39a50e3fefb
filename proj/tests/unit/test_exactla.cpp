#include "opset/exactla.hpp"
#include "opset/modular.hpp"
#include "opset/nonlocality.hpp"

#include "../oracle/plain_rational.hpp"

#include <doctest.h>

#include <random>

using namespace opset;

namespace {

RMatrix from_ints(std::vector<std::vector<long>> rows) {
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    RMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    return m;
}

oracle::Mat to_oracle(const RMatrix& m) {
    oracle::Mat out(m.rows(), oracle::Row(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

// Product of random factors so that ranks below full occur often.
RMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long bound) {
    std::uniform_int_distribution<long> entry(-bound, bound);
    std::uniform_int_distribution<std::size_t> inner(1, std::max(rows, cols));
    const std::size_t k = inner(rng);
    RMatrix a(rows, k), b(k, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < k; ++j) a(i, j) = entry(rng);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < cols; ++j) b(i, j) = entry(rng);
    return a * b;
}

void check_kernel(const RMatrix& m, const std::vector<RVector>& ker) {
    for (const auto& v : ker) CHECK(is_zero(m * v));
}

} // namespace

TEST_CASE("rational canonical form") {
    Rational q(6, -4);
    q.canonicalize();
    CHECK(q.get_num() == -3);
    CHECK(q.get_den() == 2);
    Rational z(0, 5);
    z.canonicalize();
    CHECK(z.get_den() == 1);
    CHECK(to_string(Rational(-3, 2)) == "-3/2");
}

TEST_CASE("rank examples") {
    CHECK(rank(RMatrix::identity(3)) == 3);
    CHECK(rank(RMatrix(4, 4)) == 0);
    CHECK(rank(from_ints({{1, 1, 0}, {2, 2, 0}})) == 1);
    CHECK(rank(RMatrix(0, 5)) == 0);
}

TEST_CASE("kernel examples") {
    CHECK(kernel_basis(RMatrix::identity(3)).empty());
    const auto k = kernel_basis(from_ints({{1, -1}}));
    REQUIRE(k.size() == 1);
    CHECK(sgn(proportionality(k[0], RVector{1, 1})) != 0);
    CHECK(kernel_basis(RMatrix(0, 3)).size() == 3);
}

TEST_CASE("solution space examples") {
    CHECK(solution_space_dim(RMatrix::identity(5)) == 0);
    CHECK(solution_space_dim(RMatrix(3, 7)) == 7);
    CHECK(solution_space_dim(from_ints({{1, 2}, {2, 4}})) == 1);
}

TEST_CASE("kernel of the single-party constraint system for the shifts set is one-dimensional") {
    const auto c = opm_certificate(build_shifts_upb(), {0});
    CHECK(c.sym_kernel.size() == 1);
    const auto o = oracle::opm_dims(build_shifts_upb(), {0});
    CHECK(o.sym == 1);
    CHECK(o.antisym == 0);
}

TEST_CASE("fraction-free form invariants") {
    const auto m = from_ints({{2, 4, 1, 3}, {1, 2, 1, 1}, {3, 6, 2, 4}});
    const auto f = fraction_free_reduce(m);
    REQUIRE(f.rank() == 2);
    for (std::size_t i = 0; i < f.rank(); ++i) {
        CHECK(f.rows[i][f.pivot_cols[i]] == f.pivot);
        for (std::size_t k = 0; k < f.rank(); ++k)
            if (k != i) CHECK(f.rows[i][f.pivot_cols[k]] == 0);
    }
    check_kernel(m, kernel_from_form(f));
}

TEST_CASE("rational entries are scaled to integer rows") {
    RMatrix m(2, 2);
    m(0, 0) = Rational(1, 2);
    m(0, 1) = Rational(1, 3);
    m(1, 0) = Rational(3, 2);
    m(1, 1) = 1;
    CHECK(rank(m) == 1);
    const auto rows = integer_rows(m);
    CHECK(rows[0][0] == 3);
    CHECK(rows[0][1] == 2);
}

TEST_CASE("inverse") {
    const auto m = from_ints({{2, 1}, {7, 4}});
    const auto inv = inverse(m);
    REQUIRE(inv.has_value());
    CHECK(m * *inv == RMatrix::identity(2));
    CHECK_FALSE(inverse(from_ints({{1, 2}, {2, 4}})).has_value());
}

TEST_CASE("independent subset picks the first maximal subsequence") {
    const std::vector<RVector> v{{1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}};
    CHECK(independent_subset(v) == std::vector<std::size_t>{0, 2, 4});
}

TEST_CASE("rank and kernel agree with plain elimination on random matrices") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> dim(1, 12);
    for (int trial = 0; trial < 150; ++trial) {
        const auto m = random_matrix(rng, dim(rng), dim(rng), trial % 3 == 0 ? 1000 : 4);
        const std::size_t expect = oracle::rank(to_oracle(m), m.cols());
        CHECK(rank(m) == expect);
        CHECK(rank(m, {true}) == expect);
        const auto k = kernel_basis(m);
        CHECK(k.size() == m.cols() - expect);
        check_kernel(m, k);
        CHECK(kernel_basis(m, {true}).size() == k.size());
        CHECK(rank(m) + solution_space_dim(m) == m.cols());
    }
}

TEST_CASE("rank is invariant under row permutation and scaling") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> scale(1, 9);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = random_matrix(rng, 6, 7, 5);
        std::vector<RVector> rows;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            RVector r = m.row_vector(i);
            const Rational f(scale(rng) * (trial % 2 ? -1 : 1), scale(rng));
            for (auto& x : r) x *= f;
            rows.push_back(r);
        }
        std::shuffle(rows.begin(), rows.end(), rng);
        CHECK(rank(RMatrix::from_rows(rows, m.cols())) == rank(m));
    }
}

TEST_CASE("modular helpers") {
    const auto& ps = modular::primes();
    REQUIRE(ps.size() >= 2);
    const auto p = ps[0];
    CHECK(modular::mul_mod(modular::inv_mod(12345, p), 12345, p) == 1);
    // 2/3 mod a large prime reconstructs to 2/3.
    const Integer m = p;
    Integer three_inv;
    mpz_invert(three_inv.get_mpz_t(), Integer(3).get_mpz_t(), m.get_mpz_t());
    const Integer residue = (2 * three_inv) % m;
    const auto q = modular::rational_reconstruct(residue, m);
    REQUIRE(q.has_value());
    CHECK(*q == Rational(2, 3));
}

TEST_CASE("certified kernel is verified against the exact matrix") {
    const auto m = from_ints({{1, 2, 3, 4}, {2, 4, 6, 8}, {1, 0, 1, 0}});
    const auto k = modular::certified_kernel(m);
    REQUIRE(k.has_value());
    CHECK(k->size() == 2);
    check_kernel(m, *k);
}

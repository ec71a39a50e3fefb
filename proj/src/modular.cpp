#include "opset/modular.hpp"

#include "opset/exactla.hpp"

#include <algorithm>

namespace opset::modular {

std::span<const std::uint64_t> primes() {
    static const std::vector<std::uint64_t> table = [] {
        std::vector<std::uint64_t> out;
        Integer p = Integer(1) << 61;
        for (int i = 0; i < 64; ++i) {
            mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
            out.push_back(p.get_ui());
        }
        return out;
    }();
    return table;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    // Fermat: a^(p-2)
    std::uint64_t result = 1;
    std::uint64_t base = a % p;
    std::uint64_t e = p - 2;
    while (e) {
        if (e & 1) result = mul_mod(result, base, p);
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    return result;
}

ResidueForm rref_mod(const std::vector<std::vector<Integer>>& m, std::size_t cols, std::uint64_t p) {
    const std::size_t n = m.size();
    std::vector<std::vector<std::uint64_t>> a(n, std::vector<std::uint64_t>(cols));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = mpz_fdiv_ui(m[i][j].get_mpz_t(), p);

    ResidueForm form;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < n; ++c) {
        std::size_t piv = r;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) continue;
        std::swap(a[r], a[piv]);
        const std::uint64_t inv = inv_mod(a[r][c], p);
        for (std::size_t j = c; j < cols; ++j) a[r][j] = mul_mod(a[r][j], inv, p);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const std::uint64_t f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) {
                if (a[r][j] == 0) continue;
                const std::uint64_t sub = mul_mod(f, a[r][j], p);
                a[i][j] = a[i][j] >= sub ? a[i][j] - sub : a[i][j] + (p - sub);
            }
        }
        form.pivot_cols.push_back(c);
        ++r;
    }
    a.resize(r);
    form.rows = std::move(a);
    return form;
}

std::size_t rank_mod(const RMatrix& m, std::uint64_t p) {
    return rref_mod(integer_rows(m), m.cols(), p).pivot_cols.size();
}

std::optional<Rational> rational_reconstruct(const Integer& residue, const Integer& modulus) {
    Integer bound;
    mpz_sqrt(bound.get_mpz_t(), Integer(modulus / 2).get_mpz_t());
    Integer r0 = modulus, r1 = residue % modulus;
    if (r1 < 0) r1 += modulus;
    Integer s0 = 0, s1 = 1;
    while (r1 > bound) {
        Integer q = r0 / r1;
        Integer t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (s1 == 0 || abs(s1) > bound) return std::nullopt;
    Integer g;
    mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), s1.get_mpz_t());
    if (g != 1) return std::nullopt;
    Rational q(r1, s1);
    q.canonicalize();
    return q;
}

namespace {

// Lucky primes give the lexicographically earliest pivot set of maximal size.
bool better_pivots(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
}

} // namespace

std::optional<std::vector<RVector>> certified_kernel(const RMatrix& m, std::size_t max_primes) {
    const auto ints = integer_rows(m);
    const std::size_t cols = m.cols();
    const auto table = primes();
    max_primes = std::min(max_primes, table.size());

    std::vector<std::size_t> pivots;
    std::vector<std::size_t> free_cols;
    std::vector<std::vector<Integer>> acc; // residues of RREF entries at free columns
    Integer modulus = 0;
    std::optional<std::vector<std::vector<Rational>>> last;

    for (std::size_t k = 0; k < max_primes; ++k) {
        const std::uint64_t p = table[k];
        const auto form = rref_mod(ints, cols, p);
        if (modulus == 0 || better_pivots(form.pivot_cols, pivots)) {
            pivots = form.pivot_cols;
            free_cols.clear();
            for (std::size_t c = 0, i = 0; c < cols; ++c) {
                if (i < pivots.size() && pivots[i] == c) {
                    ++i;
                } else {
                    free_cols.push_back(c);
                }
            }
            acc.assign(pivots.size(), std::vector<Integer>(free_cols.size()));
            for (std::size_t i = 0; i < pivots.size(); ++i)
                for (std::size_t f = 0; f < free_cols.size(); ++f) acc[i][f] = form.rows[i][free_cols[f]];
            modulus = Integer(static_cast<unsigned long>(p));
            last.reset();
        } else if (form.pivot_cols != pivots) {
            continue; // unlucky prime
        } else {
            const Integer pz(static_cast<unsigned long>(p));
            Integer minv;
            Integer mod_p = modulus % pz;
            mpz_invert(minv.get_mpz_t(), mod_p.get_mpz_t(), pz.get_mpz_t());
            for (std::size_t i = 0; i < pivots.size(); ++i)
                for (std::size_t f = 0; f < free_cols.size(); ++f) {
                    Integer& a = acc[i][f];
                    Integer diff = Integer(static_cast<unsigned long>(form.rows[i][free_cols[f]])) - a;
                    diff = diff * minv;
                    mpz_fdiv_r(diff.get_mpz_t(), diff.get_mpz_t(), pz.get_mpz_t());
                    a += modulus * diff;
                }
            modulus *= pz;
        }

        std::vector<std::vector<Rational>> rec(pivots.size(), std::vector<Rational>(free_cols.size()));
        bool ok = true;
        for (std::size_t i = 0; i < pivots.size() && ok; ++i)
            for (std::size_t f = 0; f < free_cols.size() && ok; ++f) {
                auto q = rational_reconstruct(acc[i][f], modulus);
                if (!q) {
                    ok = false;
                } else {
                    rec[i][f] = *q;
                }
            }
        if (!ok) continue;
        if (!last || *last != rec) {
            last = std::move(rec);
            continue;
        }

        std::vector<RVector> basis;
        for (std::size_t f = 0; f < free_cols.size(); ++f) {
            RVector v(cols);
            v[free_cols[f]] = 1;
            for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -(*last)[i][f];
            basis.push_back(primitive_integer(v));
        }
        bool verified = true;
        for (const auto& v : basis) {
            if (!is_zero(m * v)) {
                verified = false;
                break;
            }
        }
        if (verified) return basis;
        last.reset();
    }
    return std::nullopt;
}

} // namespace opset::modular

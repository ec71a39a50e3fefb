#include "opset/exactla.hpp"

#include "opset/errors.hpp"
#include "opset/modular.hpp"

#include <stdexcept>

namespace opset {

std::vector<std::vector<Integer>> integer_rows(const RMatrix& m) {
    std::vector<std::vector<Integer>> out(m.rows(), std::vector<Integer>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Integer den = 1;
        for (const auto& x : m.row(r)) {
            if (sgn(x) != 0) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
        }
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const Rational& x = m(r, c);
            if (sgn(x) != 0) out[r][c] = x.get_num() * (den / x.get_den());
        }
    }
    return out;
}

FractionFreeForm fraction_free_reduce(const RMatrix& m) {
    auto a = integer_rows(m);
    const std::size_t n = m.rows();
    const std::size_t cols = m.cols();

    FractionFreeForm form;
    form.cols = cols;
    Integer prev = 1;
    Integer tmp;
    std::size_t r = 0;

    for (std::size_t c = 0; c < cols && r < n; ++c) {
        std::size_t best = n;
        std::size_t best_bits = 0;
        for (std::size_t i = r; i < n; ++i) {
            if (sgn(a[i][c]) == 0) continue;
            const std::size_t bits = mpz_sizeinbase(a[i][c].get_mpz_t(), 2);
            if (best == n || bits < best_bits) {
                best = i;
                best_bits = bits;
            }
        }
        if (best == n) continue;
        std::swap(a[r], a[best]);

        const Integer p = a[r][c];
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r) continue;
            auto& row = a[i];
            const Integer f = row[c];
            for (std::size_t j = 0; j < cols; ++j) {
                if (j == c) continue;
                // row[j] = (p * row[j] - f * a[r][j]) / prev, exact by Sylvester's identity
                tmp = p * row[j];
                if (sgn(f) != 0 && sgn(a[r][j]) != 0) tmp -= f * a[r][j];
                if (prev != 1) {
                    if (!mpz_divisible_p(tmp.get_mpz_t(), prev.get_mpz_t()))
                        throw std::logic_error("fraction_free_reduce: inexact division");
                    mpz_divexact(row[j].get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
                } else {
                    row[j] = tmp;
                }
            }
            row[c] = 0;
        }
        prev = p;
        form.pivot_cols.push_back(c);
        ++r;
    }
    a.resize(r);
    form.rows = std::move(a);
    form.pivot = prev;
    // Normalise so the common pivot is positive.
    if (sgn(form.pivot) < 0) {
        form.pivot = -form.pivot;
        for (auto& row : form.rows)
            for (auto& x : row) x = -x;
    }
    return form;
}

std::vector<RVector> kernel_from_form(const FractionFreeForm& form) {
    std::vector<bool> is_pivot(form.cols, false);
    for (auto c : form.pivot_cols) is_pivot[c] = true;

    std::vector<RVector> basis;
    for (std::size_t f = 0; f < form.cols; ++f) {
        if (is_pivot[f]) continue;
        RVector v(form.cols);
        v[f] = Rational(form.pivot);
        for (std::size_t i = 0; i < form.rank(); ++i) v[form.pivot_cols[i]] = Rational(-form.rows[i][f]);
        basis.push_back(primitive_integer(v));
    }
    return basis;
}

std::size_t rank(const RMatrix& m, const EliminationOptions& opts) {
    if (opts.modular_fast_path) {
        if (auto k = modular::certified_kernel(m)) return m.cols() - k->size();
    }
    return fraction_free_reduce(m).rank();
}

std::vector<RVector> kernel_basis(const RMatrix& m, const EliminationOptions& opts) {
    if (opts.modular_fast_path) {
        if (auto k = modular::certified_kernel(m)) return *std::move(k);
    }
    return kernel_from_form(fraction_free_reduce(m));
}

std::size_t solution_space_dim(const RMatrix& m, const EliminationOptions& opts) {
    return m.cols() - rank(m, opts);
}

std::optional<RMatrix> inverse(const RMatrix& m) {
    if (m.rows() != m.cols()) throw StructuralError("inverse: matrix not square");
    const std::size_t n = m.rows();
    RMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    // Row scaling inside integer_rows rescales each augmented row uniformly,
    // so the right block still carries the inverse up to the common pivot.
    auto form = fraction_free_reduce(aug);
    if (form.rank() < n || form.pivot_cols[n - 1] != n - 1) return std::nullopt;
    RMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            inv(i, j) = Rational(form.rows[i][n + j], form.pivot);
            inv(i, j).canonicalize();
        }
    return inv;
}

std::vector<std::size_t> independent_subset(const std::vector<RVector>& vectors) {
    if (vectors.empty()) return {};
    const auto form = fraction_free_reduce(RMatrix::from_columns(vectors, vectors.front().size()));
    return form.pivot_cols;
}

} // namespace opset

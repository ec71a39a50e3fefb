#pragma once

#include "opset/matrix.hpp"

#include <optional>

namespace opset {

struct EliminationOptions {
    /// Try residue-arithmetic elimination first. The result is only used once
    /// it has been verified exactly; otherwise the fraction-free path runs.
    bool modular_fast_path = false;
};

/// Output of fraction-free Gauss-Jordan elimination on the row-scaled integer
/// image of a rational matrix. Row i (i < rank) has the common pivot value at
/// pivot_cols[i] and zero in every other pivot column.
struct FractionFreeForm {
    std::vector<std::vector<Integer>> rows;
    std::vector<std::size_t> pivot_cols;
    Integer pivot{1};
    std::size_t cols = 0;

    std::size_t rank() const noexcept { return pivot_cols.size(); }
};

/// Integer matrix whose rows are positive multiples of the rows of m.
std::vector<std::vector<Integer>> integer_rows(const RMatrix& m);

/// Fraction-free (Bareiss) Gauss-Jordan elimination. Pivot choice per column:
/// smallest bit length, ties broken by lowest row index.
FractionFreeForm fraction_free_reduce(const RMatrix& m);

std::size_t rank(const RMatrix& m, const EliminationOptions& opts = {});

/// Basis of the right null space as primitive integer vectors, one per free
/// column in increasing column order.
std::vector<RVector> kernel_basis(const RMatrix& m, const EliminationOptions& opts = {});

std::size_t solution_space_dim(const RMatrix& m, const EliminationOptions& opts = {});

std::vector<RVector> kernel_from_form(const FractionFreeForm& form);

std::optional<RMatrix> inverse(const RMatrix& m);

/// Indices of the first maximal linearly independent subsequence of vectors.
std::vector<std::size_t> independent_subset(const std::vector<RVector>& vectors);

} // namespace opset

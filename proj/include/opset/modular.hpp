#pragma once

#include "opset/matrix.hpp"

#include <cstdint>
#include <optional>
#include <span>

// Residue-arithmetic elimination. Rank mod p never exceeds the rational rank,
// so a kernel reconstructed from residues and then checked exactly against the
// original matrix certifies both the kernel and the rank.
namespace opset::modular {

std::span<const std::uint64_t> primes();

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

struct ResidueForm {
    std::vector<std::vector<std::uint64_t>> rows; // reduced row echelon, pivots 1
    std::vector<std::size_t> pivot_cols;
};

ResidueForm rref_mod(const std::vector<std::vector<Integer>>& m, std::size_t cols, std::uint64_t p);

std::size_t rank_mod(const RMatrix& m, std::uint64_t p);

/// Smallest-denominator rational congruent to residue modulo modulus with
/// |num|, den <= sqrt(modulus / 2), if any.
std::optional<Rational> rational_reconstruct(const Integer& residue, const Integer& modulus);

/// Kernel basis reconstructed over growing prime products and verified exactly
/// (m * v == 0 for every vector). nullopt when no verified result was reached
/// within max_primes primes.
std::optional<std::vector<RVector>> certified_kernel(const RMatrix& m, std::size_t max_primes = 24);

} // namespace opset::modular

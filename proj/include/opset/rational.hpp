#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace opset {

using Integer = mpz_class;
/// GMP keeps mpq_class canonical: gcd(num, den) = 1, den > 0, zero is 0/1.
using Rational = mpq_class;
using RVector = std::vector<Rational>;

std::string to_string(const Rational& q);
std::string to_string(const RVector& v);

Rational dot(const RVector& a, const RVector& b);
bool is_zero(const RVector& v);

/// Positive multiple of v with coprime integer entries. The zero vector is
/// returned unchanged.
RVector primitive_integer(const RVector& v);

/// The scalar s with a = s * b, when a and b are proportional (b nonzero).
/// Returns 0 when they are not.
Rational proportionality(const RVector& a, const RVector& b);

/// Kronecker product of a list of vectors, first factor most significant.
RVector kron(const std::vector<RVector>& factors);

RVector unit_vector(std::size_t dim, std::size_t index);

/// Integer vector from a signed-index expression such as "0-1+4-5": each term
/// adds +1 or -1 at the given basis index.
RVector ket(std::size_t dim, const std::string& expr);

} // namespace opset

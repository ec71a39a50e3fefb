#pragma once

#include "opset/rational.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace opset {

/// Dense row-major matrix of exact rationals.
class RMatrix {
public:
    RMatrix() = default;
    RMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RMatrix identity(std::size_t n);
    static RMatrix from_rows(const std::vector<RVector>& rows, std::size_t cols);
    static RMatrix from_columns(const std::vector<RVector>& cols, std::size_t rows);
    static RMatrix outer(const RVector& a, const RVector& b);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Rational> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    RVector row_vector(std::size_t r) const;

    RMatrix transpose() const;
    Rational trace() const;
    bool is_zero() const;
    bool is_symmetric() const;

    RMatrix& operator+=(const RMatrix& o);
    RMatrix& operator-=(const RMatrix& o);
    RMatrix& operator*=(const Rational& s);

    friend RMatrix operator+(RMatrix a, const RMatrix& b) { return a += b; }
    friend RMatrix operator-(RMatrix a, const RMatrix& b) { return a -= b; }
    friend RMatrix operator*(RMatrix a, const Rational& s) { return a *= s; }
    friend RMatrix operator*(const RMatrix& a, const RMatrix& b);
    friend RVector operator*(const RMatrix& a, const RVector& v);
    friend bool operator==(const RMatrix& a, const RMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

/// Kronecker product, left operand most significant.
RMatrix kron(const RMatrix& a, const RMatrix& b);

/// trace(a * b) without forming the product.
Rational trace_of_product(const RMatrix& a, const RMatrix& b);

/// v^T m w.
Rational bilinear(const RVector& v, const RMatrix& m, const RVector& w);

} // namespace opset

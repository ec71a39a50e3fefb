#include "opset/matrix.hpp"

#include "opset/errors.hpp"

namespace opset {

RMatrix RMatrix::identity(std::size_t n) {
    RMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RMatrix RMatrix::from_rows(const std::vector<RVector>& rows, std::size_t cols) {
    RMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw StructuralError("from_rows: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

RMatrix RMatrix::from_columns(const std::vector<RVector>& cols, std::size_t rows) {
    RMatrix m(rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].size() != rows) throw StructuralError("from_columns: ragged columns");
        for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
    }
    return m;
}

RMatrix RMatrix::outer(const RVector& a, const RVector& b) {
    RMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    }
    return m;
}

RVector RMatrix::row_vector(std::size_t r) const {
    auto s = row(r);
    return RVector(s.begin(), s.end());
}

RMatrix RMatrix::transpose() const {
    RMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Rational RMatrix::trace() const {
    Rational acc = 0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) acc += (*this)(i, i);
    return acc;
}

bool RMatrix::is_zero() const {
    for (const auto& x : data_) {
        if (sgn(x) != 0) return false;
    }
    return true;
}

bool RMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = r + 1; c < cols_; ++c)
            if ((*this)(r, c) != (*this)(c, r)) return false;
    return true;
}

RMatrix& RMatrix::operator+=(const RMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw StructuralError("matrix +: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

RMatrix& RMatrix::operator-=(const RMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw StructuralError("matrix -: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

RMatrix& RMatrix::operator*=(const Rational& s) {
    for (auto& x : data_) x *= s;
    return *this;
}

RMatrix operator*(const RMatrix& a, const RMatrix& b) {
    if (a.cols_ != b.rows_) throw StructuralError("matrix *: shape mismatch");
    RMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Rational& aik = a(i, k);
            if (sgn(aik) == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) {
                if (sgn(b(k, j)) != 0) out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

RVector operator*(const RMatrix& a, const RVector& v) {
    if (a.cols_ != v.size()) throw StructuralError("matrix-vector *: shape mismatch");
    RVector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        Rational acc = 0;
        for (std::size_t k = 0; k < a.cols_; ++k) {
            if (sgn(v[k]) != 0 && sgn(a(i, k)) != 0) acc += a(i, k) * v[k];
        }
        out[i] = acc;
    }
    return out;
}

bool operator==(const RMatrix& a, const RMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

RMatrix kron(const RMatrix& a, const RMatrix& b) {
    RMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (sgn(a(i, j)) == 0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return out;
}

Rational trace_of_product(const RMatrix& a, const RMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) throw StructuralError("trace_of_product: shape mismatch");
    Rational acc = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            if (sgn(a(i, k)) != 0 && sgn(b(k, i)) != 0) acc += a(i, k) * b(k, i);
    return acc;
}

Rational bilinear(const RVector& v, const RMatrix& m, const RVector& w) {
    return dot(v, m * w);
}

} // namespace opset

#include "opset/rational.hpp"

#include "opset/errors.hpp"

#include <cctype>
#include <sstream>

namespace opset {

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const RVector& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += v[i].get_str();
    }
    return out + ")";
}

Rational dot(const RVector& a, const RVector& b) {
    if (a.size() != b.size()) throw StructuralError("dot: length mismatch");
    Rational acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0) acc += a[i] * b[i];
    }
    return acc;
}

bool is_zero(const RVector& v) {
    for (const auto& x : v) {
        if (sgn(x) != 0) return false;
    }
    return true;
}

RVector primitive_integer(const RVector& v) {
    Integer den_lcm = 1;
    for (const auto& x : v) {
        if (sgn(x) != 0) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den_mpz_t());
    }
    Integer num_gcd = 0;
    std::vector<Integer> scaled(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (sgn(v[i]) == 0) continue;
        scaled[i] = v[i].get_num() * (den_lcm / v[i].get_den());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled[i].get_mpz_t());
    }
    if (num_gcd == 0) return v;
    RVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rational(scaled[i] / num_gcd);
    return out;
}

Rational proportionality(const RVector& a, const RVector& b) {
    if (a.size() != b.size()) return 0;
    Rational ratio = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool za = sgn(a[i]) == 0;
        const bool zb = sgn(b[i]) == 0;
        if (za != zb) return 0;
        if (za) continue;
        Rational r = a[i] / b[i];
        if (sgn(ratio) == 0) {
            ratio = r;
        } else if (r != ratio) {
            return 0;
        }
    }
    return ratio;
}

RVector kron(const std::vector<RVector>& factors) {
    RVector out{Rational(1)};
    for (const auto& f : factors) {
        RVector next(out.size() * f.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (sgn(out[i]) == 0) continue;
            for (std::size_t j = 0; j < f.size(); ++j) next[i * f.size() + j] = out[i] * f[j];
        }
        out = std::move(next);
    }
    return out;
}

RVector unit_vector(std::size_t dim, std::size_t index) {
    if (index >= dim) throw StructuralError("unit_vector: index out of range");
    RVector v(dim);
    v[index] = 1;
    return v;
}

RVector ket(std::size_t dim, const std::string& expr) {
    RVector v(dim);
    std::size_t pos = 0;
    int sign = 1;
    bool any = false;
    while (pos < expr.size()) {
        const char ch = expr[pos];
        if (ch == '+' || ch == '-') {
            sign = ch == '-' ? -1 : 1;
            ++pos;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++pos;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(ch))) {
            throw StructuralError("ket: unexpected character in '" + expr + "'");
        }
        std::size_t idx = 0;
        while (pos < expr.size() && std::isdigit(static_cast<unsigned char>(expr[pos]))) {
            idx = idx * 10 + static_cast<std::size_t>(expr[pos] - '0');
            ++pos;
        }
        if (idx >= dim) throw StructuralError("ket: index out of range in '" + expr + "'");
        v[idx] += sign;
        sign = 1;
        any = true;
    }
    if (!any) throw StructuralError("ket: empty expression");
    return v;
}

} // namespace opset

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pseudorot {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline double to_double(const BigRat& r) { return r.template convert_to<double>(); }
inline double to_double(const BigInt& n) { return n.template convert_to<double>(); }

// Exact dyadic rational equal to the given finite double.
inline BigRat rat_from_double(double d) {
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite value");
    if (d == 0.0) return BigRat(0);
    int exp2 = 0;
    double m = std::frexp(d, &exp2);
    auto mant = static_cast<long long>(std::ldexp(m, 53));
    int e = exp2 - 53;
    if (e >= 0) return BigRat(BigInt(mant) << e);
    return BigRat(mant) / BigRat(BigInt(1) << (-e));
}

// Floor division with sign convention floor(a/b), b > 0 assumed positive.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline BigInt floor_rat(const BigRat& x) {
    return floor_div(numerator(x), denominator(x));
}

inline BigInt round_rat(const BigRat& x) {
    return floor_rat(x + BigRat(1, 2));
}

// Fractional part in [0, 1).
inline BigRat frac_rat(const BigRat& x) {
    return x - BigRat(floor_rat(x));
}

// Distance to the nearest integer, in [0, 1/2].
inline BigRat torus_dist_rat(const BigRat& x) {
    BigRat f = frac_rat(x);
    return f <= BigRat(1, 2) ? f : BigRat(1) - f;
}

inline BigInt isqrt_floor(const BigInt& n) {
    if (n < 0) throw std::domain_error("isqrt of negative");
    if (n == 0) return 0;
    BigInt x = BigInt(1) << (static_cast<unsigned>(msb(n)) / 2 + 1);
    for (;;) {
        BigInt y = (x + n / x) / 2;
        if (y >= x) break;
        x = y;
    }
    return x;
}

inline bool is_perfect_square(const BigInt& n, BigInt* root = nullptr) {
    if (n < 0) return false;
    BigInt r = isqrt_floor(n);
    if (root) *root = r;
    return r * r == n;
}

// Natural log of a big integer without overflowing double conversion.
inline double log_big(const BigInt& n) {
    if (n <= 0) throw std::domain_error("log of nonpositive");
    if (n < (BigInt(1) << 900)) return std::log(to_double(n));
    unsigned shift = static_cast<unsigned>(msb(n)) - 64;
    BigInt top = n >> shift;
    return std::log(to_double(top)) + shift * std::log(2.0);
}

inline double log_big(const BigRat& r) {
    if (r <= 0) throw std::domain_error("log of nonpositive");
    return log_big(numerator(r)) - log_big(denominator(r));
}

inline std::string to_string(const BigInt& n) { return n.str(); }
inline std::string to_string(const BigRat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

inline BigRat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return BigRat(BigInt(s));
    BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den <= 0) throw std::invalid_argument("rational denominator must be positive: " + s);
    return BigRat(num, den);
}

} // namespace pseudorot

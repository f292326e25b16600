#pragma once

#include <cmath>
#include <cstdint>

#include "pseudorot/exact.hpp"

namespace pseudorot {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double max_abs() const { return std::max(std::abs(x), std::abs(y)); }
};

struct RatVec2 {
    BigRat x, y;

    RatVec2 operator+(const RatVec2& o) const { return {x + o.x, y + o.y}; }
    RatVec2 operator-(const RatVec2& o) const { return {x - o.x, y - o.y}; }
    RatVec2 scaled(const BigRat& s) const { return {x * s, y * s}; }
    Vec2 to_vec2() const { return {to_double(x), to_double(y)}; }
};

struct Mat2i {
    // [[a, b], [c, d]]
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    std::int64_t det() const { return a * d - b * c; }
    Mat2i operator*(const Mat2i& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    bool operator==(const Mat2i& o) const = default;
    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
    Vec2 apply(const Vec2& v) const {
        return {double(a) * v.x + double(b) * v.y, double(c) * v.x + double(d) * v.y};
    }
    RatVec2 apply(const RatVec2& v) const {
        return {BigRat(a) * v.x + BigRat(b) * v.y, BigRat(c) * v.x + BigRat(d) * v.y};
    }
    // Valid only for det = +-1 matrices (the only ones this library builds).
    Mat2i inverse() const {
        std::int64_t s = det();
        return {s * d, -s * b, -s * c, s * a};
    }
    // Largest singular value.
    double op_norm() const {
        double q = double(a) * a + double(b) * b + double(c) * c + double(d) * d;
        double dt = double(det());
        double disc = std::sqrt(std::max(0.0, q * q - 4.0 * dt * dt));
        return std::sqrt((q + disc) / 2.0);
    }
};

} // namespace pseudorot

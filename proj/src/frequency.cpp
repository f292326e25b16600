#include "pseudorot/frequency.hpp"

#include <cmath>

namespace pseudorot {

namespace {

// Sign of a + b*sqrt(k) using only integer arithmetic.
int surd_sign(const BigRat& a, const BigRat& b, const BigInt& k) {
    if (b == 0) return a == 0 ? 0 : (a > 0 ? 1 : -1);
    if (a == 0) return b > 0 ? 1 : -1;
    if (a > 0 && b > 0) return 1;
    if (a < 0 && b < 0) return -1;
    // Opposite signs: compare a^2 with b^2 k; the larger magnitude wins.
    BigRat a2 = a * a, b2k = b * b * BigRat(k);
    if (a2 == b2k) return 0;
    if (a2 > b2k) return a > 0 ? 1 : -1;
    return b > 0 ? 1 : -1;
}

} // namespace

Frequency Frequency::from_double(double v) {
    Frequency f;
    f.kind_ = Kind::Float;
    f.value_ = v;
    return f;
}

Frequency Frequency::rational(const BigRat& r) {
    Frequency f;
    f.kind_ = Kind::Rational;
    f.r0_ = r;
    f.refresh_value();
    return f;
}

Frequency Frequency::surd(const BigRat& r0, const BigRat& r1, const BigInt& k) {
    if (k < 2) throw std::invalid_argument("surd base must be >= 2");
    if (is_perfect_square(k)) throw std::invalid_argument("surd base must not be a perfect square");
    Frequency f;
    f.kind_ = Kind::Surd;
    f.r0_ = r0;
    f.r1_ = r1;
    f.k_ = k;
    f.normalize();
    f.refresh_value();
    return f;
}

Frequency Frequency::liouville_partial(const BigRat& truncation, double tail_bound,
                                       std::vector<BigInt> stage_denominators) {
    Frequency f;
    f.kind_ = Kind::LiouvillePartial;
    f.r0_ = truncation;
    f.tail_bound_ = tail_bound;
    f.stage_q_ = std::move(stage_denominators);
    f.refresh_value();
    return f;
}

void Frequency::refresh_value() {
    value_ = to_double(r0_);
    if (kind_ == Kind::Surd && r1_ != 0)
        value_ += to_double(r1_) * std::sqrt(to_double(k_));
}

void Frequency::normalize() {
    if (kind_ == Kind::Surd && r1_ == 0) {
        kind_ = Kind::Rational;
        k_ = 0;
    }
}

void Frequency::require_exact(const char* op) const {
    if (!has_exact())
        throw std::domain_error(std::string("exact operation '") + op +
                                "' on a float-only frequency");
}

Frequency Frequency::operator+(const Frequency& o) const {
    require_exact("+");
    o.require_exact("+");
    if (kind_ == Kind::Surd && o.kind_ == Kind::Surd && k_ != o.k_)
        throw std::domain_error("cannot combine surds over different bases exactly");
    Frequency f;
    f.r0_ = r0_ + o.r0_;
    if (kind_ == Kind::Surd || o.kind_ == Kind::Surd) {
        f.kind_ = Kind::Surd;
        f.k_ = kind_ == Kind::Surd ? k_ : o.k_;
        f.r1_ = (kind_ == Kind::Surd ? r1_ : BigRat(0)) + (o.kind_ == Kind::Surd ? o.r1_ : BigRat(0));
        f.normalize();
    } else {
        f.kind_ = Kind::Rational;
    }
    f.refresh_value();
    return f;
}

Frequency Frequency::operator-(const Frequency& o) const {
    return *this + o.scaled(BigRat(-1));
}

Frequency Frequency::scaled(const BigRat& c) const {
    require_exact("scale");
    Frequency f = *this;
    if (f.kind_ == Kind::LiouvillePartial) f.kind_ = Kind::Rational;
    f.r0_ *= c;
    f.r1_ *= c;
    f.normalize();
    f.refresh_value();
    return f;
}

Frequency Frequency::shifted(const BigRat& c) const {
    require_exact("shift");
    Frequency f = *this;
    if (f.kind_ == Kind::LiouvillePartial) f.kind_ = Kind::Rational;
    f.r0_ += c;
    f.refresh_value();
    return f;
}

Frequency Frequency::reciprocal() const {
    require_exact("reciprocal");
    if (is_zero()) throw std::domain_error("reciprocal of zero");
    if (kind_ != Kind::Surd) return rational(BigRat(1) / r0_);
    // 1/(a + b sqrt(k)) = (a - b sqrt(k)) / (a^2 - b^2 k)
    BigRat den = r0_ * r0_ - r1_ * r1_ * BigRat(k_);
    return surd(r0_ / den, -r1_ / den, k_);
}

int Frequency::sign() const {
    require_exact("sign");
    if (kind_ != Kind::Surd) return r0_ == 0 ? 0 : (r0_ > 0 ? 1 : -1);
    return surd_sign(r0_, r1_, k_);
}

BigInt Frequency::exact_floor() const {
    require_exact("floor");
    if (kind_ != Kind::Surd) return floor_rat(r0_);
    BigInt m(static_cast<long long>(std::floor(value_)));
    while (surd_sign(r0_ - BigRat(m + 1), r1_, k_) >= 0) ++m;
    while (surd_sign(r0_ - BigRat(m), r1_, k_) < 0) --m;
    return m;
}

Frequency Frequency::fractional_part() const {
    return shifted(BigRat(-exact_floor()));
}

Frequency Frequency::torus_fold() const {
    Frequency f = fractional_part();
    Frequency g = f.scaled(BigRat(-1)).shifted(BigRat(1)); // 1 - f
    return (f - Frequency::rational(BigRat(1, 2))).sign() <= 0 ? f : g;
}

Frequency Frequency::linear(const BigRat& c1, const Frequency& a,
                            const BigRat& c2, const Frequency& b,
                            const BigRat& c0) {
    return (a.scaled(c1) + b.scaled(c2)).shifted(c0);
}

} // namespace pseudorot

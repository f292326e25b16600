#pragma once

#include <optional>
#include <vector>

#include "pseudorot/exact.hpp"

namespace pseudorot {

/**
 * A real frequency with an optional exact form.
 *
 * Exact forms cover the values this library actually needs:
 *   Rational          r0
 *   Surd              r0 + r1*sqrt(k), k >= 2 not a perfect square
 *   LiouvillePartial  an exact rational truncation plus a certified
 *                     tail-magnitude bound and the stage denominators
 *                     of the construction that produced it
 *   Float             no exact form, double only
 *
 * Rational/Surd values form a field (for fixed k), so continued fractions
 * and rational relations on them are computed without rounding.
 */
class Frequency {
public:
    enum class Kind { Float, Rational, Surd, LiouvillePartial };

    Frequency() : kind_(Kind::Rational) {}

    static Frequency from_double(double v);
    static Frequency rational(const BigRat& r);
    static Frequency surd(const BigRat& r0, const BigRat& r1, const BigInt& k);
    static Frequency liouville_partial(const BigRat& truncation, double tail_bound,
                                       std::vector<BigInt> stage_denominators);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    bool has_exact() const { return kind_ != Kind::Float; }
    bool is_rational_exact() const { return kind_ == Kind::Rational || kind_ == Kind::LiouvillePartial; }

    const BigRat& rat_part() const { return r0_; }
    const BigRat& surd_coeff() const { return r1_; }
    const BigInt& surd_base() const { return k_; }
    double tail_bound() const { return tail_bound_; }
    const std::vector<BigInt>& stage_denominators() const { return stage_q_; }

    // Exact field operations; throw std::domain_error when either side lacks
    // an exact form or the surd bases are incompatible.
    Frequency operator+(const Frequency& o) const;
    Frequency operator-(const Frequency& o) const;
    Frequency scaled(const BigRat& c) const;
    Frequency shifted(const BigRat& c) const;
    Frequency reciprocal() const;

    int sign() const;        // exact sign, throws for Kind::Float
    bool is_zero() const { return sign() == 0; }
    BigInt exact_floor() const;
    Frequency fractional_part() const;
    // Distance to the nearest integer as an exact Frequency in [0, 1/2].
    Frequency torus_fold() const;

    // c1*a + c2*b + c0, exact.
    static Frequency linear(const BigRat& c1, const Frequency& a,
                            const BigRat& c2, const Frequency& b,
                            const BigRat& c0);

private:
    Kind kind_;
    double value_ = 0.0;
    BigRat r0_;
    BigRat r1_;
    BigInt k_ = 0;
    double tail_bound_ = 0.0;
    std::vector<BigInt> stage_q_;

    void refresh_value();
    void normalize();
    void require_exact(const char* op) const;
};

} // namespace pseudorot

#pragma once

#include <string>
#include <vector>

#include "pseudorot/geom.hpp"

namespace pseudorot {

// The fixed C-infinity bump shape: b(t) = exp(1 - 1/(1 - t^2)) on |t| < 1,
// 0 outside; b(0) = 1.
double bump(double t);
double bump_deriv(double t);
// Certified bounds max|b'| and max|b''| over (-1, 1).
double bump_deriv_bound();
double bump_second_deriv_bound();

/**
 * A point split into an exact rational base and a small floating correction.
 * Profile evaluation against exact bump centers stays accurate even when the
 * profile period is far below the double-precision resolution of the
 * absolute coordinates.
 */
struct HybridPoint {
    BigRat bx, by;
    double dx = 0.0, dy = 0.0;

    static HybridPoint exact(const RatVec2& p) { return {p.x, p.y, 0.0, 0.0}; }
    static HybridPoint approx(const Vec2& p) { return {BigRat(0), BigRat(0), p.x, p.y}; }
    Vec2 to_vec2() const { return {to_double(bx) + dx, to_double(by) + dy}; }
};

/** A (1/q)-periodic C-infinity function: a sum of disjoint scaled bumps. */
class PeriodicProfile {
public:
    struct Bump {
        BigRat center;     // in [0, period)
        BigRat half_width; // 2*half_width < period
        double amplitude;
    };

    explicit PeriodicProfile(const BigRat& period);

    void add_bump(const BigRat& center, const BigRat& half_width, double amplitude);

    double value(double t) const;
    double derivative(double t) const;
    // Value at base + delta with the base reduced exactly mod the period.
    double value_at(const BigRat& base, double delta) const;

    double sup_norm() const;        // max |A|, attained at bump centers
    double sup_deriv() const;       // certified bound on |phi'|
    double sup_second_deriv() const;

    const BigRat& period() const { return period_; }
    double period_double() const { return period_d_; }
    const std::vector<Bump>& bumps() const { return bumps_; }
    PeriodicProfile negated() const;

private:
    BigRat period_;
    double period_d_;
    std::vector<Bump> bumps_;
    struct BumpCache { double center, half_width, amplitude; };
    std::vector<BumpCache> cache_;
};

struct Generator {
    enum class Kind { Translation, ShearX, ShearY, Linear };

    Kind kind = Kind::Translation;
    RatVec2 shift;                        // Translation (always exact rational)
    Vec2 shift_d;                         // cached double form of shift
    std::vector<PeriodicProfile> profile; // 0 or 1 entries, for shears
    Mat2i matrix;                         // Linear, det +-1

    static Generator translation(const RatVec2& v);
    static Generator translation(const Vec2& v); // converted through decimal doubles
    static Generator shear_x(PeriodicProfile p);
    static Generator shear_y(PeriodicProfile p);
    static Generator linear(const Mat2i& A);

    Generator inverse() const;
    Vec2 apply(const Vec2& w) const;
    HybridPoint apply(const HybridPoint& w) const;
    // Jacobian at w (exact formulas per generator kind).
    void jacobian(const Vec2& w, double J[2][2]) const;

    double lip_bound() const;       // certified Lipschitz constant
    double dlip_bound() const;      // certified Lipschitz constant of the Jacobian
    double lip_minus_id_bound() const; // certified Lipschitz constant of g - Id
    double displacement_sup() const;// certified sup ||g(x) - x|| (Linear: throws)
};

struct GridSpec {
    int resolution = 64;
    Vec2 offset{0.0, 0.0};

    double cell_radius() const { return std::sqrt(2.0) / (2.0 * resolution); }
};

class AreaPreservingMap {
public:
    AreaPreservingMap() = default;
    explicit AreaPreservingMap(std::vector<Generator> gens) : gens_(std::move(gens)) {}

    static AreaPreservingMap identity() { return AreaPreservingMap(); }
    static AreaPreservingMap translation(const RatVec2& v);
    static AreaPreservingMap translation(const Vec2& v);

    const std::vector<Generator>& generators() const { return gens_; }
    void append(Generator g) { gens_.push_back(std::move(g)); }

    Vec2 evaluate_lift(const Vec2& x) const;
    HybridPoint evaluate_lift(const HybridPoint& x) const;
    void jacobian(const Vec2& x, double J[2][2]) const;

    AreaPreservingMap inverse() const;
    // f.after(g) evaluates as f(g(x)).
    AreaPreservingMap after(const AreaPreservingMap& g) const;

    Mat2i linear_part() const;
    bool isotopic_to_identity() const { return linear_part().is_identity(); }

    double lip_bound() const;
    double dlip_bound() const;
    // Certified sup ||F(x) - x|| as a sum over generators; requires M = Id.
    double displacement_sup_bound() const;

private:
    std::vector<Generator> gens_;
};

std::vector<Vec2> iterate(const AreaPreservingMap& map, const Vec2& x, int n);

struct C0Distance {
    double estimate = 0.0;
    double certified = 0.0;
};

C0Distance c0_distance_to_identity(const AreaPreservingMap& map, const GridSpec& grid);
double c1_norm_estimate(const AreaPreservingMap& map, const GridSpec& grid);

AreaPreservingMap conjugate(const AreaPreservingMap& f, const AreaPreservingMap& h);

// JSON map files.
std::string serialize(const AreaPreservingMap& map);
AreaPreservingMap deserialize(const std::string& text);

} // namespace pseudorot

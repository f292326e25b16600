#include "pseudorot/torusmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pseudorot {

double bump(double t) {
    double t2 = t * t;
    if (t2 >= 1.0 - 1e-12) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t2));
}

double bump_deriv(double t) {
    double t2 = t * t;
    if (t2 >= 1.0 - 1e-12) return 0.0;
    double s = 1.0 - t2;
    return -2.0 * t / (s * s) * bump(t);
}

namespace {

double bump_second(double t) {
    double t2 = t * t;
    if (t2 >= 1.0 - 1e-12) return 0.0;
    double s = 1.0 - t2;
    double g = -2.0 * t / (s * s);
    double gp = -2.0 / (s * s) - 8.0 * t2 / (s * s * s);
    return (gp + g * g) * bump(t);
}

double scan_max(double (*f)(double)) {
    const int n = 200000;
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        double t = -1.0 + 2.0 * i / n;
        best = std::max(best, std::abs(f(t)));
    }
    return best * 1.02; // slack over the scan resolution
}

} // namespace

double bump_deriv_bound() {
    static const double v = scan_max(&bump_deriv);
    return v;
}

double bump_second_deriv_bound() {
    static const double v = scan_max(&bump_second);
    return v;
}

PeriodicProfile::PeriodicProfile(const BigRat& period) : period_(period) {
    if (period <= 0) throw std::invalid_argument("profile period must be positive");
    period_d_ = to_double(period);
}

void PeriodicProfile::add_bump(const BigRat& center, const BigRat& half_width,
                               double amplitude) {
    if (half_width <= 0) throw std::invalid_argument("bump half-width must be positive");
    if (2 * half_width >= period_)
        throw std::invalid_argument("bump placement failed: width exceeds period");
    BigRat c = center - BigRat(floor_rat(center / period_)) * period_;
    // Disjointness on the circle of circumference period_.
    for (const Bump& b : bumps_) {
        BigRat d = c - b.center;
        d -= BigRat(floor_rat(d / period_)) * period_;
        if (d > period_ / 2) d = period_ - d;
        if (d < half_width + b.half_width)
            throw std::invalid_argument("bump placement failed: overlapping supports");
    }
    bumps_.push_back({c, half_width, amplitude});
    cache_.push_back({to_double(c), to_double(half_width), amplitude});
}

double PeriodicProfile::value(double t) const {
    double acc = 0.0;
    for (const BumpCache& b : cache_) {
        double dt = t - b.center;
        double n = std::nearbyint(dt / period_d_);
        double r = std::fma(-n, period_d_, dt);
        double u = r / b.half_width;
        if (u > -1.0 && u < 1.0) acc += b.amplitude * bump(u);
    }
    return acc;
}

double PeriodicProfile::derivative(double t) const {
    double acc = 0.0;
    for (const BumpCache& b : cache_) {
        double dt = t - b.center;
        double n = std::nearbyint(dt / period_d_);
        double r = std::fma(-n, period_d_, dt);
        double u = r / b.half_width;
        if (u > -1.0 && u < 1.0) acc += b.amplitude * bump_deriv(u) / b.half_width;
    }
    return acc;
}

double PeriodicProfile::value_at(const BigRat& base, double delta) const {
    double acc = 0.0;
    double dr = 0.0;
    if (std::abs(delta) > period_d_ / 2) {
        double n = std::nearbyint(delta / period_d_);
        dr = std::fma(-n, period_d_, delta);
    } else {
        dr = delta;
    }
    for (std::size_t i = 0; i < bumps_.size(); ++i) {
        BigRat e = base - bumps_[i].center;
        e -= BigRat(floor_rat(e / period_)) * period_; // [0, period)
        if (2 * e >= period_) e -= period_;
        double v = to_double(e) + dr;
        double n = std::nearbyint(v / period_d_);
        v = std::fma(-n, period_d_, v);
        double u = v / cache_[i].half_width;
        if (u > -1.0 && u < 1.0) acc += cache_[i].amplitude * bump(u);
    }
    return acc;
}

double PeriodicProfile::sup_norm() const {
    double m = 0.0;
    for (const BumpCache& b : cache_) m = std::max(m, std::abs(b.amplitude));
    return m;
}

double PeriodicProfile::sup_deriv() const {
    double m = 0.0;
    for (const BumpCache& b : cache_)
        m = std::max(m, std::abs(b.amplitude) * bump_deriv_bound() / b.half_width);
    return m;
}

double PeriodicProfile::sup_second_deriv() const {
    double m = 0.0;
    for (const BumpCache& b : cache_)
        m = std::max(m, std::abs(b.amplitude) * bump_second_deriv_bound() /
                            (b.half_width * b.half_width));
    return m;
}

PeriodicProfile PeriodicProfile::negated() const {
    PeriodicProfile p(period_);
    for (const Bump& b : bumps_) p.add_bump(b.center, b.half_width, -b.amplitude);
    return p;
}

Generator Generator::translation(const RatVec2& v) {
    Generator g;
    g.kind = Kind::Translation;
    g.shift = v;
    g.shift_d = v.to_vec2();
    return g;
}

Generator Generator::translation(const Vec2& v) {
    return translation(RatVec2{BigRat(v.x), BigRat(v.y)});
}

Generator Generator::shear_x(PeriodicProfile p) {
    Generator g;
    g.kind = Kind::ShearX;
    g.profile.push_back(std::move(p));
    return g;
}

Generator Generator::shear_y(PeriodicProfile p) {
    Generator g;
    g.kind = Kind::ShearY;
    g.profile.push_back(std::move(p));
    return g;
}

Generator Generator::linear(const Mat2i& A) {
    if (A.det() != 1 && A.det() != -1)
        throw std::invalid_argument("linear generator must have determinant +-1");
    Generator g;
    g.kind = Kind::Linear;
    g.matrix = A;
    return g;
}

Generator Generator::inverse() const {
    switch (kind) {
    case Kind::Translation: return translation(RatVec2{-shift.x, -shift.y});
    case Kind::ShearX: return shear_x(profile[0].negated());
    case Kind::ShearY: return shear_y(profile[0].negated());
    case Kind::Linear: return linear(matrix.inverse());
    }
    throw std::logic_error("unreachable");
}

Vec2 Generator::apply(const Vec2& w) const {
    switch (kind) {
    case Kind::Translation: return w + shift_d;
    case Kind::ShearX: return {w.x + profile[0].value(w.y), w.y};
    case Kind::ShearY: return {w.x, w.y + profile[0].value(w.x)};
    case Kind::Linear: return matrix.apply(w);
    }
    throw std::logic_error("unreachable");
}

HybridPoint Generator::apply(const HybridPoint& w) const {
    HybridPoint r = w;
    switch (kind) {
    case Kind::Translation:
        r.bx += shift.x;
        r.by += shift.y;
        return r;
    case Kind::ShearX:
        // Fold the (exactly representable) shear value into the exact part so
        // that later generators still see the position at full precision.
        r.bx += rat_from_double(profile[0].value_at(w.by, w.dy));
        return r;
    case Kind::ShearY:
        r.by += rat_from_double(profile[0].value_at(w.bx, w.dx));
        return r;
    case Kind::Linear: {
        RatVec2 b = matrix.apply(RatVec2{w.bx, w.by});
        Vec2 d = matrix.apply(Vec2{w.dx, w.dy});
        return {b.x, b.y, d.x, d.y};
    }
    }
    throw std::logic_error("unreachable");
}

void Generator::jacobian(const Vec2& w, double J[2][2]) const {
    switch (kind) {
    case Kind::Translation:
        J[0][0] = 1; J[0][1] = 0; J[1][0] = 0; J[1][1] = 1;
        return;
    case Kind::ShearX:
        J[0][0] = 1; J[0][1] = profile[0].derivative(w.y); J[1][0] = 0; J[1][1] = 1;
        return;
    case Kind::ShearY:
        J[0][0] = 1; J[0][1] = 0; J[1][0] = profile[0].derivative(w.x); J[1][1] = 1;
        return;
    case Kind::Linear:
        J[0][0] = double(matrix.a); J[0][1] = double(matrix.b);
        J[1][0] = double(matrix.c); J[1][1] = double(matrix.d);
        return;
    }
}

double Generator::lip_bound() const {
    switch (kind) {
    case Kind::Translation: return 1.0;
    case Kind::ShearX:
    case Kind::ShearY: return 1.0 + profile[0].sup_deriv();
    case Kind::Linear: return matrix.op_norm();
    }
    return 1.0;
}

double Generator::dlip_bound() const {
    if (kind == Kind::ShearX || kind == Kind::ShearY)
        return profile[0].sup_second_deriv();
    return 0.0;
}

double Generator::lip_minus_id_bound() const {
    switch (kind) {
    case Kind::Translation: return 0.0;
    case Kind::ShearX:
    case Kind::ShearY: return profile[0].sup_deriv();
    case Kind::Linear: {
        Mat2i d{matrix.a - 1, matrix.b, matrix.c, matrix.d - 1};
        return d.op_norm();
    }
    }
    return 0.0;
}

double Generator::displacement_sup() const {
    switch (kind) {
    case Kind::Translation: return shift_d.norm();
    case Kind::ShearX:
    case Kind::ShearY: return profile[0].sup_norm();
    case Kind::Linear:
        if (matrix.is_identity()) return 0.0;
        throw std::domain_error("not isotopic to identity");
    }
    return 0.0;
}

AreaPreservingMap AreaPreservingMap::translation(const RatVec2& v) {
    return AreaPreservingMap({Generator::translation(v)});
}

AreaPreservingMap AreaPreservingMap::translation(const Vec2& v) {
    return AreaPreservingMap({Generator::translation(v)});
}

Vec2 AreaPreservingMap::evaluate_lift(const Vec2& x) const {
    Vec2 w = x;
    for (const Generator& g : gens_) w = g.apply(w);
    return w;
}

HybridPoint AreaPreservingMap::evaluate_lift(const HybridPoint& x) const {
    HybridPoint w = x;
    for (const Generator& g : gens_) w = g.apply(w);
    return w;
}

void AreaPreservingMap::jacobian(const Vec2& x, double J[2][2]) const {
    double acc[2][2] = {{1, 0}, {0, 1}};
    Vec2 w = x;
    for (const Generator& g : gens_) {
        double Jg[2][2];
        g.jacobian(w, Jg);
        double next[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                next[i][j] = Jg[i][0] * acc[0][j] + Jg[i][1] * acc[1][j];
        std::copy(&next[0][0], &next[0][0] + 4, &acc[0][0]);
        w = g.apply(w);
    }
    std::copy(&acc[0][0], &acc[0][0] + 4, &J[0][0]);
}

AreaPreservingMap AreaPreservingMap::inverse() const {
    std::vector<Generator> gens;
    gens.reserve(gens_.size());
    for (auto it = gens_.rbegin(); it != gens_.rend(); ++it) gens.push_back(it->inverse());
    return AreaPreservingMap(std::move(gens));
}

AreaPreservingMap AreaPreservingMap::after(const AreaPreservingMap& g) const {
    std::vector<Generator> gens = g.gens_;
    gens.insert(gens.end(), gens_.begin(), gens_.end());
    return AreaPreservingMap(std::move(gens));
}

Mat2i AreaPreservingMap::linear_part() const {
    Mat2i m;
    for (const Generator& g : gens_)
        if (g.kind == Generator::Kind::Linear) m = g.matrix * m;
    return m;
}

double AreaPreservingMap::lip_bound() const {
    double l = 1.0;
    for (const Generator& g : gens_) l *= g.lip_bound();
    return l;
}

double AreaPreservingMap::dlip_bound() const {
    // For F = g o f: Lip(DF) <= Lip(Dg) Lip(f)^2 + ||Dg|| Lip(Df).
    double L = 1.0, M = 0.0;
    for (const Generator& g : gens_) {
        M = g.dlip_bound() * L * L + g.lip_bound() * M;
        L = g.lip_bound() * L;
    }
    return M;
}

double AreaPreservingMap::displacement_sup_bound() const {
    if (!isotopic_to_identity()) throw std::domain_error("not isotopic to identity");
    double s = 0.0;
    for (const Generator& g : gens_) s += g.displacement_sup();
    return s;
}

std::vector<Vec2> iterate(const AreaPreservingMap& map, const Vec2& x, int n) {
    if (n < 0) throw std::invalid_argument("iterate: n must be >= 0");
    std::vector<Vec2> orbit;
    orbit.reserve(static_cast<std::size_t>(n) + 1);
    orbit.push_back(x);
    Vec2 w = x;
    for (int k = 0; k < n; ++k) {
        w = map.evaluate_lift(w);
        orbit.push_back(w);
    }
    return orbit;
}

C0Distance c0_distance_to_identity(const AreaPreservingMap& map, const GridSpec& grid) {
    if (!map.isotopic_to_identity()) throw std::domain_error("not isotopic to identity");
    double est = 0.0;
    int G = grid.resolution;
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
            Vec2 x{grid.offset.x + double(i) / G, grid.offset.y + double(j) / G};
            est = std::max(est, (map.evaluate_lift(x) - x).norm());
        }
    // Lip(F - Id): for F = g o f, F - Id = (g - Id) o f + (f - Id).
    double L = 1.0, D = 0.0;
    for (const Generator& g : map.generators()) {
        D = g.lip_minus_id_bound() * L + D;
        L = g.lip_bound() * L;
    }
    double cert = est + D * grid.cell_radius();
    return {est, cert};
}

double c1_norm_estimate(const AreaPreservingMap& map, const GridSpec& grid) {
    double best = 0.0;
    int G = grid.resolution;
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
            Vec2 x{grid.offset.x + double(i) / G, grid.offset.y + double(j) / G};
            double J[2][2];
            map.jacobian(x, J);
            // Largest singular value of J.
            double q = J[0][0] * J[0][0] + J[0][1] * J[0][1] + J[1][0] * J[1][0] +
                       J[1][1] * J[1][1];
            double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            double disc = std::sqrt(std::max(0.0, q * q - 4.0 * det * det));
            best = std::max(best, std::sqrt((q + disc) / 2.0));
        }
    return best;
}

AreaPreservingMap conjugate(const AreaPreservingMap& f, const AreaPreservingMap& h) {
    return h.after(f.after(h.inverse()));
}

} // namespace pseudorot

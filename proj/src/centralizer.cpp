#include "pseudorot/centralizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pseudorot {

namespace {

double torus_dist(const Vec2& a, const Vec2& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    dx -= std::nearbyint(dx);
    dy -= std::nearbyint(dy);
    return std::sqrt(dx * dx + dy * dy);
}

Vec2 frac(const Vec2& p) {
    return {p.x - std::floor(p.x), p.y - std::floor(p.y)};
}

void require_isotopic(const AreaPreservingMap& g) {
    if (!g.isotopic_to_identity())
        throw std::invalid_argument("not isotopic to identity");
}

// Mean lift displacement over a G x G grid. The displacement x -> g~(x) - x is
// continuous and Z^2-periodic when the linear part is trivial, so plain cell
// averaging converges without any unwrapping.
Vec2 mean_displacement(const AreaPreservingMap& g, int G, const Vec2& offset) {
    Vec2 acc{0.0, 0.0};
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
            Vec2 x{(i + 0.5) / G + offset.x, (j + 0.5) / G + offset.y};
            Vec2 y = g.evaluate_lift(x);
            acc.x += y.x - x.x;
            acc.y += y.y - x.y;
        }
    return {acc.x / (G * G), acc.y / (G * G)};
}

} // namespace

CommutatorCheck commutator_defect(const AreaPreservingMap& f, const AreaPreservingMap& g,
                                  const GridSpec& grid) {
    CommutatorCheck res;
    const int G = std::max(2, grid.resolution);
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
            Vec2 x{double(i) / G + grid.offset.x, double(j) / G + grid.offset.y};
            Vec2 fg = f.evaluate_lift(g.evaluate_lift(x));
            Vec2 gf = g.evaluate_lift(f.evaluate_lift(x));
            res.defect = std::max(res.defect, torus_dist(fg, gf));
        }
    res.commutes = res.defect <= 1e-9;
    return res;
}

Vec2 displacement_class(const AreaPreservingMap& g, const Vec2& x) {
    require_isotopic(g);
    // The class only depends on x mod Z^2, so evaluate at the canonical
    // representative; any two lifts of the same point then agree bitwise.
    Vec2 x0 = frac(x);
    Vec2 y = g.evaluate_lift(x0);
    return frac(Vec2{y.x - x0.x, y.y - x0.y});
}

RotationEstimate phi1(const AreaPreservingMap& g, const GridSpec& grid) {
    require_isotopic(g);
    const int G = std::max(4, grid.resolution);
    Vec2 fine = mean_displacement(g, G, grid.offset);
    Vec2 coarse = mean_displacement(g, G / 2, grid.offset);
    RotationEstimate res;
    res.value = frac(fine);
    res.error = std::hypot(fine.x - coarse.x, fine.y - coarse.y) + 1e-12;
    return res;
}

Vec2 phi2(const AreaPreservingMap& g, const Vec2& x0) {
    return frac(g.evaluate_lift(x0));
}

UniformBoundResult verify_uniform_bound(const AreaPreservingMap& f, double kappa,
                                        const AreaPreservingMap& g, int N,
                                        const GridSpec& grid, double tolerance) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    UniformBoundResult res;
    res.commutator = commutator_defect(f, g, grid).defect;
    if (res.commutator > 1e-9) throw std::runtime_error("does not commute");

    const int G = std::max(2, std::min(grid.resolution, 24));
    std::vector<Vec2> start, pos;
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
            Vec2 x{double(i) / G + grid.offset.x, double(j) / G + grid.offset.y};
            start.push_back(x);
            pos.push_back(x);
        }
    res.spread_by_n.reserve(N);
    for (int n = 1; n <= N; ++n) {
        double spread = 0.0;
        for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = g.evaluate_lift(pos[i]);
        for (std::size_t i = 0; i < pos.size(); ++i) {
            Vec2 pi{pos[i].x - start[i].x, pos[i].y - start[i].y};
            for (std::size_t j = i + 1; j < pos.size(); ++j) {
                Vec2 pj{pos[j].x - start[j].x, pos[j].y - start[j].y};
                spread = std::max(spread, std::hypot(pi.x - pj.x, pi.y - pj.y));
            }
        }
        res.spread_by_n.push_back(spread);
        res.max_spread = std::max(res.max_spread, spread);
    }
    res.bound = 2.0 * kappa + tolerance;
    res.pass = res.max_spread <= res.bound;
    res.derived_bmm = 2.0 * kappa;
    return res;
}

HomomorphismCheck verify_homomorphism(const AreaPreservingMap& g1,
                                      const AreaPreservingMap& g2, const GridSpec& grid) {
    require_isotopic(g1);
    require_isotopic(g2);
    RotationEstimate a = phi1(g1, grid);
    RotationEstimate b = phi1(g2, grid);
    RotationEstimate both = phi1(g1.after(g2), grid);
    HomomorphismCheck res;
    res.lhs = both.value;
    res.rhs = frac(Vec2{a.value.x + b.value.x, a.value.y + b.value.y});
    res.error = a.error + b.error + both.error;
    res.pass = torus_dist(res.lhs, res.rhs) <= res.error + 1e-9;
    return res;
}

std::string spread_csv(const UniformBoundResult& result) {
    std::ostringstream out;
    out << "n,spread\n";
    for (std::size_t i = 0; i < result.spread_by_n.size(); ++i)
        out << (i + 1) << "," << result.spread_by_n[i] << "\n";
    return out.str();
}

} // namespace pseudorot

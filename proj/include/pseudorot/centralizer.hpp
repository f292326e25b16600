#pragma once

#include <string>
#include <vector>

#include "pseudorot/torusmap.hpp"

namespace pseudorot {

struct CommutatorCheck {
    double defect = 0.0; // max over grid of d(f(g(x)), g(f(x)))
    bool commutes = false; // defect <= 1e-9
};

CommutatorCheck commutator_defect(const AreaPreservingMap& f, const AreaPreservingMap& g,
                                  const GridSpec& grid);

// Displacement class D_g(x) = (g~(x~) - x~) mod Z^2, independent of the lift.
// Throws "not isotopic to identity" when the linear part is nontrivial.
Vec2 displacement_class(const AreaPreservingMap& g, const Vec2& x);

struct RotationEstimate {
    Vec2 value{0.0, 0.0}; // representative in [0, 1)^2
    double error = 0.0;   // refinement-based quadrature error estimate
};

// phi1(g) = integral of D_g over the torus (the rotation homomorphism),
// computed by grid quadrature of the continuous lift displacement with a
// half-resolution comparison as the error estimate.
RotationEstimate phi1(const AreaPreservingMap& g, const GridSpec& grid);

// phi2(g) = g(x0) for a caller-designated base point (the caller asserts the
// dense-orbit hypothesis).
Vec2 phi2(const AreaPreservingMap& g, const Vec2& x0);

struct UniformBoundResult {
    double max_spread = 0.0;          // max over n <= N, grid pairs of ||Phi_n(x0)-Phi_n(x1)||
    std::vector<double> spread_by_n;  // index n-1
    double bound = 0.0;               // 2 kappa + tolerance
    bool pass = false;
    double derived_bmm = 0.0;         // BMM bound for g implied by the spread bound: 2 kappa
    double commutator = 0.0;
};

// Uniform deviation bound for centralizers: for g commuting with f (f with
// bounded mean motion constant kappa), the spread of Phi_n(x) = g~^n(x~) - x~
// across points is at most 2 kappa. Throws "does not commute" when the
// measured commutator defect exceeds 1e-9.
UniformBoundResult verify_uniform_bound(const AreaPreservingMap& f, double kappa,
                                        const AreaPreservingMap& g, int N,
                                        const GridSpec& grid, double tolerance = 1e-6);

struct HomomorphismCheck {
    Vec2 lhs{0.0, 0.0}, rhs{0.0, 0.0}; // phi1(g1 g2) vs phi1(g1) + phi1(g2), mod Z^2
    double error = 0.0;                // combined quadrature error
    bool pass = false;
};

HomomorphismCheck verify_homomorphism(const AreaPreservingMap& g1,
                                      const AreaPreservingMap& g2, const GridSpec& grid);

std::string spread_csv(const UniformBoundResult& result);

} // namespace pseudorot

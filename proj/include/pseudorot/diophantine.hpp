#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pseudorot/frequency.hpp"
#include "pseudorot/geom.hpp"

namespace pseudorot {

/** A rotation vector with an optional exact form per coordinate. */
struct Vector2 {
    Vec2 v;
    std::optional<std::pair<Frequency, Frequency>> exact;

    static Vector2 from_doubles(double x, double y) { return {{x, y}, std::nullopt}; }
    static Vector2 exact_pair(Frequency a, Frequency b) {
        Vector2 w{{a.value(), b.value()}, std::make_pair(std::move(a), std::move(b))};
        return w;
    }
    static Vector2 exact_rational(const BigRat& x, const BigRat& y) {
        return exact_pair(Frequency::rational(x), Frequency::rational(y));
    }
    bool has_exact() const { return exact.has_value(); }
    bool is_rational_vector() const {
        return has_exact() && exact->first.is_rational_exact() && exact->second.is_rational_exact();
    }
};

struct BestApproxSequence {
    Frequency alpha;
    std::vector<BigInt> partial_quotients; // of the fractional part of alpha
    std::vector<BigInt> q;                 // strictly increasing, q[0] = 1
    std::vector<BigInt> p;                 // matching numerators
    bool terminated = false;               // rational input exhausted
    bool precision_exhausted = false;      // float input could not resolve further
};

struct RationalRelation {
    // c*w1 + d*w2 + p/q = 0
    std::int64_t c = 0, d = 0, p = 0, q = 1;
};

struct CharacterData {
    std::pair<std::int64_t, std::int64_t> character_vector; // (d, -c); the pair is +-this
    std::int64_t character_number = 0;                      // q of the relation
    Mat2i A;                                                // det 1, bottom row (c, d)
    Frequency alpha_prime;                                  // q*(a*w1 + b*w2)
    Frequency beta;                                         // ||alpha_prime||_T in [0, 1/2]
    std::int64_t L = 0;                                     // ell * q
};

struct BrjunoReport {
    std::vector<double> partial_sums; // sums of ln(q_{n+1})/q_n
    std::string classification;       // brjuno-likely | non-brjuno-likely | undecided
    int budget = 0;
    bool terminated_rational = false;
};

struct SubsequenceSelection {
    std::vector<std::size_t> indices;   // positions in seq.q
    std::vector<bool> certificate;      // ||q_{n_j} a||_T < exp(-q_{n_j}/j^2)
    bool exhausted = false;             // no further successor within computed terms
};

struct GrowthSpec {
    std::function<BigInt(const BigInt&)> next; // target for q_{j+1} given q_j
    BigInt q1 = 2;
    std::string description;

    // Accepts "q+1", "2q", "2^q", "q^q".
    static GrowthSpec parse(const std::string& s, const BigInt& q1 = 2);
};

inline constexpr int kDefaultCfCapBits = 40000;

double torus_norm(double alpha);
double torus_norm2(Vec2 omega);
double torus_norm2(const Vector2& omega);
// Exact Euclidean distance-to-lattice squared, for rational vectors.
BigRat torus_norm2_sq_exact(const RatVec2& omega);

BestApproxSequence continued_fraction(const Frequency& alpha, int max_terms,
                                      int q_cap_bits = kDefaultCfCapBits);

// Score n^-1 * a^n * ln ||n omega||; throws "rational direction" if the norm
// vanishes for some n <= n_max.
std::vector<std::pair<std::int64_t, double>>
super_liouville_score(const Vector2& omega, std::int64_t n_max, double holder_a = 1.0);

Vector2 build_liouville_vector(const GrowthSpec& growth, int stages,
                               int q_cap_bits = kDefaultCfCapBits);

Mat2i sl2z_complete(std::int64_t c, std::int64_t d);

CharacterData character_data(const Vector2& omega, const RationalRelation& rel,
                             std::int64_t ell);

BrjunoReport brjuno_report(const Frequency& alpha, int budget_terms);

SubsequenceSelection non_brjuno_subsequence(const BestApproxSequence& seq, double H);

// ln ||q * alpha||_T computed without underflow (exact forms) or via doubles.
double log_torus_norm(const Frequency& alpha, const BigInt& n);

} // namespace pseudorot

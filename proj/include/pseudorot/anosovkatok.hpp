#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pseudorot/torusmap.hpp"

namespace pseudorot {

// Thrown when a stage would exceed the construction budget (CLI exit code 3).
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Output of the conjugator builder: an area-preserving h built from
 * cell-periodic shears (all profile periods are 1/q) together with the exact
 * pulled-back pair (x', y') and certified bounds.
 *
 * Guarantees: h(x') = x exactly, and h(y') = y exactly when the displacement
 * y - x is dyadic (up to a residual far below 1e-10 otherwise);
 * d(x', y') = s sqrt(2) < sigma with s a power of two; both probe points
 * x' + (1/(2q), 0) and y' + (1/(2q), 0) avoid every bump support, so h moves
 * them by the same exact translation and d(h(x'+e), h(y'+e)) = d(x', y').
 */
struct BuildHResult {
    AreaPreservingMap h;
    RatVec2 x_prime, y_prime; // exact torus points in [0,1)^2
    RatVec2 offset;           // exact y' - x' (equal dyadic coordinates)
    double certified_c0 = 0.0; // certified d_C0(h~, Id), <= 3 d(x,y) + 2/q
    BigRat tau_prime;          // exact distance of the offset coords to (1/q)Z
    double probe_contraction = 0.0; // measured d(h(x'+e), h(y'+e))
    double marker_defect = 0.0;     // max of d(h(x'), x), d(h(y'), y)
};

/**
 * Builds h as a product of single-bump (1/q)-periodic shears followed by the
 * translation (0, -k/q) with k = -floor(q (y2 - x2)), so h commutes with
 * T_(1/q,0) and T_(0,1/q) exactly. Vertical shears (bumps in x at offset s
 * from x1) move the marker path up to the landing height; horizontal shears
 * (bumps in y at the exact landing height) move it onto y. Every shear value
 * is an exactly-representable double fired at an exact bump center.
 * Preconditions: both coordinates of y - x at distance >= tau from (1/q)Z
 * and d(x, y) < 1/2.
 */
BuildHResult build_h(const BigInt& q, const RatVec2& x, const RatVec2& y, double sigma,
                     double tau);

struct ConstructionParams {
    std::uint64_t seed = 0;
    int grid_resolution = 64;   // verification grids (periodicity, BMM report)
    BigInt q_cap;               // refuse advancing once q_n exceeds this
    BigInt r_start;             // optional override for the r-search start (0 = policy)
    int r_iteration_cap = 2000; // odd-doubling steps before giving up

    ConstructionParams();
};

struct StageState {
    int n = 1;
    std::vector<AreaPreservingMap> h; // h_1..h_n (h_1 = Id)
    AreaPreservingMap H;              // h_1 o ... o h_n
    RatVec2 omega;                    // exact; q * omega is integral
    BigInt q;
    RatVec2 x_marker, y_marker;           // exact marker pair
    RatVec2 x_probe_seed, y_probe_seed;   // exact H-preimages of the probes
    Vec2 x_probe{0, 0}, y_probe{0, 0};    // probe pair on the torus
    BigInt m_exponent;                    // separation witness exponent m_n
    BigRat gamma1;                        // f^m = H T_((-1/(2q_{n-1}) + gamma1, 0)) H^-1 shift
    double epsilon = 0.0;                 // stage margin
    BigRat tau;                           // exact transversality floor
    double kappa = 0.0;                   // continuity radius used at this stage
    BigInt v, r;                          // policy integers (zero at stage 1)
    double c0_sum = 0.0;                  // sum of certified d_C0(h_i, Id)
    double c0_last = 0.0;                 // certified d_C0(h_n, Id)
};

// Numeric record of every check performed while advancing to stage `n`.
struct StageChecks {
    int n = 1;
    double sigma = 0.0, kappa = 0.0;
    double c0_h = 0.0, c0_sum = 0.0;
    double marker_distance = 0.0, separation = 0.0;
    double probe_distance = 0.0, witness_separation = 0.0;
    double beta_norm = 0.0, c0_closeness = 0.0, c1_closeness = 0.0;
    double beta_threshold = 0.0, closeness_threshold = 0.0;
    double density_bound = 0.0, density_threshold = 0.0;
    double gamma_norm = 0.0;
    double epsilon = 0.0;
    bool a4_pass = true;
    long long a4_count = 0;
    int r_iterations = 0;
    std::string m_string, v_string, r_string, q_string;
};

StageState initial_stage();
void validate_stage(const StageState& state);

StageState advance_stage(const StageState& state, const ConstructionParams& params,
                         StageChecks* checks = nullptr);

// f_n = H_n T_{omega_n} H_n^-1.
AreaPreservingMap stage_map(const StageState& state);

struct CounterexampleResult {
    AreaPreservingMap f;
    StageState state;
    std::string report; // structured text, one block per condition (a1)-(a6)
    bool all_pass = false;
};

CounterexampleResult counterexample(int stages, const ConstructionParams& params);

std::string serialize_stage(const StageState& state);
StageState deserialize_stage(const std::string& text);

} // namespace pseudorot

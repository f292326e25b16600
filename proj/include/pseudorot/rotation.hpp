#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pseudorot/torusmap.hpp"

namespace pseudorot {

struct RotationVectorEstimate {
    Vec2 rho{0.0, 0.0};
    double residual = 0.0; // sample spread + 2 * measured deviation cap / N
};

struct RotationSetEstimate {
    std::vector<Vec2> hull; // convex hull vertices, counterclockwise
    double diameter = 0.0;
    bool pseudo_rotation = false;
    double tolerance = 1e-3;
};

struct DeviationSample {
    int n = 0;
    int z_index = 0;
    Vec2 dev{0.0, 0.0};
};

struct DeviationSeries {
    Vec2 rho{0.0, 0.0};
    std::vector<DeviationSample> samples;
    std::vector<double> running_max_norm; // index n-1, nondecreasing
    std::vector<double> running_max_proj; // empty when no direction given
    double kappa_hat = 0.0;               // bounded-mean-motion estimate
    double kappa_hat_v = 0.0;             // bounded-deviation estimate along v
    bool has_direction = false;
    Vec2 direction{0.0, 0.0};
};

struct RigidityCandidate {
    int n = 0;
    double c0_dist = 0.0;
    double c1_dist = 0.0; // max ||DF^n - Id|| over the grid, partial evidence
};

RotationVectorEstimate estimate_rotation_vector(const AreaPreservingMap& map, int samples,
                                                int N, std::uint64_t seed = 0);

RotationSetEstimate estimate_rotation_set(const AreaPreservingMap& map, int samples, int N,
                                          std::uint64_t seed = 0, double tolerance = 1e-3);

DeviationSeries deviation_series(const AreaPreservingMap& map, const Vec2& rho, int samples,
                                 int N, std::optional<Vec2> direction = std::nullopt,
                                 std::uint64_t seed = 0);

std::vector<RigidityCandidate> rigidity_search(const AreaPreservingMap& map, int N_max,
                                               const GridSpec& grid);

std::string deviation_series_csv(const DeviationSeries& series);
std::string rigidity_csv(const std::vector<RigidityCandidate>& candidates);
std::string hull_csv(const RotationSetEstimate& estimate);

} // namespace pseudorot

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pseudorot/torusmap.hpp"

namespace pseudorot {

struct FundamentalDomain {
    Vec2 base{0.0, 0.0};
    bool centered = true; // base + [-1/2, 1/2)^2; otherwise base + [0, 1)^2

    static FundamentalDomain centered_at(const Vec2& x) { return {x, true}; }
    static FundamentalDomain corner_at(const Vec2& x) { return {x, false}; }

    double diameter() const;          // sqrt(2) for unit squares
    Vec2 lo() const;                  // lower-left corner
    bool contains(const Vec2& p) const;
};

class SimpleDisc {
public:
    enum class Shape { Round, Rect, Snake };

    static SimpleDisc round(const Vec2& center, double radius);
    static SimpleDisc rect(const Vec2& lo, const Vec2& hi);
    // Chain of w-by-w axis cells at integer offsets from origin; consecutive
    // cells must share an edge and non-consecutive cells must not touch.
    static SimpleDisc snake(const Vec2& origin, double w,
                            const std::vector<std::pair<int, int>>& cells);

    Shape shape() const { return shape_; }
    double area() const { return area_; }       // closed form
    bool contains(const Vec2& p) const;          // lift representative D~
    bool contains_torus(const Vec2& p) const;    // membership mod Z^2
    double distance(const Vec2& p) const;        // euclidean distance to D~
    double distance_torus(const Vec2& p) const;  // min over Z^2 translates
    Vec2 bbox_lo() const { return bbox_lo_; }
    Vec2 bbox_hi() const { return bbox_hi_; }
    // Throws "disc not simple" when the lift is not contained in F with margin.
    void check_simple(const FundamentalDomain& F, double margin = 1e-9) const;
    std::string describe() const;

private:
    Shape shape_ = Shape::Round;
    Vec2 center_{0.0, 0.0};
    double radius_ = 0.0;
    Vec2 lo_{0.0, 0.0}, hi_{0.0, 0.0};
    Vec2 origin_{0.0, 0.0};
    double w_ = 0.0;
    std::vector<std::pair<int, int>> cells_;
    double area_ = 0.0;
    Vec2 bbox_lo_{0.0, 0.0}, bbox_hi_{0.0, 0.0};
};

double c_constant(double kappa, const FundamentalDomain& F); // 8(kappa + 6 diam F)
double c_constant_sup(double kappa);                         // sup over unit squares

enum class DiscVerdict { Intersects, DisjointWithMargin, Inconclusive };

struct DiscDisplacementResult {
    DiscVerdict verdict = DiscVerdict::Inconclusive;
    int hits = 0;           // Monte-Carlo hits of f(sample) in D
    double margin = 0.0;    // certified clearance when disjoint
    double area = 0.0;
    double threshold = 0.0; // c(kappa, F) * ||omega||
    bool alarm = false;     // area > threshold yet certified disjoint
};

DiscDisplacementResult verify_disc_displacement(const AreaPreservingMap& map, double kappa,
                                                const FundamentalDomain& F,
                                                const SimpleDisc& disc, int mc_points,
                                                const Vec2& omega, std::uint64_t seed = 0);

struct C0BoundCheck {
    double lhs = 0.0; // d_C0(f, Id) grid estimate
    double rhs = 0.0;
    bool pass = false;
    bool hypothesis_ok = true; // ||omega|| < 1/(2 c(kappa))
    std::string note;
};

C0BoundCheck c0_bound_check(const AreaPreservingMap& map, double kappa, const GridSpec& grid);

struct ReturnRecord {
    Vec2 z{0.0, 0.0};
    int n = 0;           // first return time n_D
    long long lx = 0, ly = 0; // lattice point l_D
};

struct ReturnStats {
    std::vector<ReturnRecord> records;              // first returns
    std::vector<std::vector<ReturnRecord>> chains;  // successive returns per sample
    double return_fraction = 0.0;
    double kac_estimate = 0.0; // area(D) * mean(n_D)
    double kac_sigma = 0.0;
    bool kac_pass = false;
    double mean_return_time = 0.0; // time average of n_D along the return orbit
};

ReturnStats first_return_stats(const AreaPreservingMap& map, const SimpleDisc& disc,
                               int horizon, int samples, std::uint64_t seed = 0);

struct DiscCampaignRecord {
    std::string shape;
    double area = 0.0;
    double threshold = 0.0;
    std::string verdict;
    int hits = 0;
    double margin = 0.0;
    bool alarm = false;
};

std::string campaign_report(const std::vector<DiscCampaignRecord>& records);
std::string return_histogram_csv(const ReturnStats& stats);

} // namespace pseudorot

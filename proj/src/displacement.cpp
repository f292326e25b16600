#include "pseudorot/displacement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pseudorot/rotation.hpp"

namespace pseudorot {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double box_distance(const Vec2& p, const Vec2& lo, const Vec2& hi) {
    double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return std::sqrt(dx * dx + dy * dy);
}

Vec2 minimal_torus_rep(const Vec2& v) {
    return {v.x - std::nearbyint(v.x), v.y - std::nearbyint(v.y)};
}

} // namespace

double FundamentalDomain::diameter() const { return std::sqrt(2.0); }

Vec2 FundamentalDomain::lo() const {
    return centered ? Vec2{base.x - 0.5, base.y - 0.5} : base;
}

bool FundamentalDomain::contains(const Vec2& p) const {
    Vec2 l = lo();
    return p.x >= l.x && p.x < l.x + 1.0 && p.y >= l.y && p.y < l.y + 1.0;
}

SimpleDisc SimpleDisc::round(const Vec2& center, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
    SimpleDisc d;
    d.shape_ = Shape::Round;
    d.center_ = center;
    d.radius_ = radius;
    d.area_ = M_PI * radius * radius;
    d.bbox_lo_ = {center.x - radius, center.y - radius};
    d.bbox_hi_ = {center.x + radius, center.y + radius};
    return d;
}

SimpleDisc SimpleDisc::rect(const Vec2& lo, const Vec2& hi) {
    if (hi.x <= lo.x || hi.y <= lo.y) throw std::invalid_argument("degenerate rectangle");
    SimpleDisc d;
    d.shape_ = Shape::Rect;
    d.lo_ = lo;
    d.hi_ = hi;
    d.area_ = (hi.x - lo.x) * (hi.y - lo.y);
    d.bbox_lo_ = lo;
    d.bbox_hi_ = hi;
    return d;
}

SimpleDisc SimpleDisc::snake(const Vec2& origin, double w,
                             const std::vector<std::pair<int, int>>& cells) {
    if (w <= 0.0 || cells.empty()) throw std::invalid_argument("degenerate snake");
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
        int di = std::abs(cells[i + 1].first - cells[i].first);
        int dj = std::abs(cells[i + 1].second - cells[i].second);
        if (di + dj != 1) throw std::invalid_argument("snake cells must be edge-adjacent");
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 2; j < cells.size(); ++j) {
            int di = std::abs(cells[i].first - cells[j].first);
            int dj = std::abs(cells[i].second - cells[j].second);
            // Diagonal contact right around a bend is fine: the shared corner
            // already belongs to the cell between them.
            bool bend_contact = (j == i + 2) && di == 1 && dj == 1;
            if (std::max(di, dj) <= 1 && !bend_contact)
                throw std::invalid_argument("snake cells must not self-touch");
        }
    SimpleDisc d;
    d.shape_ = Shape::Snake;
    d.origin_ = origin;
    d.w_ = w;
    d.cells_ = cells;
    d.area_ = double(cells.size()) * w * w;
    d.bbox_lo_ = d.bbox_hi_ = {origin.x + cells[0].first * w, origin.y + cells[0].second * w};
    for (const auto& [ci, cj] : cells) {
        d.bbox_lo_.x = std::min(d.bbox_lo_.x, origin.x + ci * w);
        d.bbox_lo_.y = std::min(d.bbox_lo_.y, origin.y + cj * w);
        d.bbox_hi_.x = std::max(d.bbox_hi_.x, origin.x + (ci + 1) * w);
        d.bbox_hi_.y = std::max(d.bbox_hi_.y, origin.y + (cj + 1) * w);
    }
    return d;
}

bool SimpleDisc::contains(const Vec2& p) const {
    switch (shape_) {
    case Shape::Round: {
        double dx = p.x - center_.x, dy = p.y - center_.y;
        return dx * dx + dy * dy <= radius_ * radius_;
    }
    case Shape::Rect:
        return p.x >= lo_.x && p.x <= hi_.x && p.y >= lo_.y && p.y <= hi_.y;
    case Shape::Snake:
        for (const auto& [ci, cj] : cells_) {
            double cx = origin_.x + ci * w_, cy = origin_.y + cj * w_;
            if (p.x >= cx && p.x <= cx + w_ && p.y >= cy && p.y <= cy + w_) return true;
        }
        return false;
    }
    return false;
}

double SimpleDisc::distance(const Vec2& p) const {
    switch (shape_) {
    case Shape::Round: {
        double d = std::hypot(p.x - center_.x, p.y - center_.y) - radius_;
        return std::max(0.0, d);
    }
    case Shape::Rect:
        return box_distance(p, lo_, hi_);
    case Shape::Snake: {
        double best = 1e300;
        for (const auto& [ci, cj] : cells_) {
            Vec2 clo{origin_.x + ci * w_, origin_.y + cj * w_};
            best = std::min(best, box_distance(p, clo, Vec2{clo.x + w_, clo.y + w_}));
        }
        return best;
    }
    }
    return 0.0;
}

bool SimpleDisc::contains_torus(const Vec2& p) const { return distance_torus(p) == 0.0; }

double SimpleDisc::distance_torus(const Vec2& p) const {
    Vec2 c{(bbox_lo_.x + bbox_hi_.x) / 2, (bbox_lo_.y + bbox_hi_.y) / 2};
    Vec2 q{p.x - std::nearbyint(p.x - c.x), p.y - std::nearbyint(p.y - c.y)};
    double best = 1e300;
    for (int zx = -1; zx <= 1; ++zx)
        for (int zy = -1; zy <= 1; ++zy)
            best = std::min(best, distance(Vec2{q.x + zx, q.y + zy}));
    return best;
}

void SimpleDisc::check_simple(const FundamentalDomain& F, double margin) const {
    Vec2 l = F.lo();
    if (bbox_lo_.x < l.x + margin || bbox_lo_.y < l.y + margin ||
        bbox_hi_.x > l.x + 1.0 - margin || bbox_hi_.y > l.y + 1.0 - margin)
        throw std::domain_error("disc not simple: lift not contained in the fundamental domain");
}

std::string SimpleDisc::describe() const {
    switch (shape_) {
    case Shape::Round: return "round";
    case Shape::Rect: return "rect";
    case Shape::Snake: return "snake";
    }
    return "?";
}

double c_constant(double kappa, const FundamentalDomain& F) {
    if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
    return 8.0 * (kappa + 6.0 * F.diameter());
}

double c_constant_sup(double kappa) {
    if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
    return 8.0 * (kappa + 6.0 * std::sqrt(2.0));
}

DiscDisplacementResult verify_disc_displacement(const AreaPreservingMap& map, double kappa,
                                                const FundamentalDomain& F,
                                                const SimpleDisc& disc, int mc_points,
                                                const Vec2& omega, std::uint64_t seed) {
    disc.check_simple(F);
    if (mc_points < 1) throw std::invalid_argument("mc_points must be >= 1");

    DiscDisplacementResult res;
    res.area = disc.area();
    res.threshold = c_constant(kappa, F) * minimal_torus_rep(omega).norm();

    Vec2 blo = disc.bbox_lo(), bhi = disc.bbox_hi();
    for (int i = 0; i < mc_points; ++i) {
        std::mt19937_64 rng(splitmix64(seed + std::uint64_t(i)));
        std::uniform_real_distribution<double> ux(blo.x, bhi.x), uy(blo.y, bhi.y);
        Vec2 p;
        do {
            p = {ux(rng), uy(rng)};
        } while (!disc.contains(p));
        if (disc.contains_torus(map.evaluate_lift(p))) ++res.hits;
    }
    if (res.hits > 0) {
        res.verdict = DiscVerdict::Intersects;
        return res;
    }

    // Certified disjointness: cover the disc with grid cells and use the
    // Lipschitz modulus of the map to exclude hits between samples.
    const int R = std::max(8, int(std::ceil(std::sqrt(double(mc_points)))));
    double cw = (bhi.x - blo.x) / R, ch = (bhi.y - blo.y) / R;
    double r = std::sqrt(cw * cw + ch * ch) / 2.0;
    double lip = map.lip_bound();
    double margin = 1e300;
    bool any = false;
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < R; ++j) {
            Vec2 c{blo.x + (i + 0.5) * cw, blo.y + (j + 0.5) * ch};
            if (disc.distance(c) > r) continue; // cell cannot meet the disc
            any = true;
            Vec2 fc = map.evaluate_lift(c);
            if (disc.contains_torus(fc)) {
                res.verdict = DiscVerdict::Intersects;
                res.hits = 1;
                return res;
            }
            margin = std::min(margin, disc.distance_torus(fc) - lip * r);
        }
    if (any && margin > 0.0) {
        res.verdict = DiscVerdict::DisjointWithMargin;
        res.margin = margin;
        res.alarm = res.area > res.threshold;
    } else {
        res.verdict = DiscVerdict::Inconclusive;
        res.margin = std::min(margin, 0.0);
    }
    return res;
}

C0BoundCheck c0_bound_check(const AreaPreservingMap& map, double kappa, const GridSpec& grid) {
    C0BoundCheck out;
    double c = c_constant_sup(kappa);
    Vec2 omega = minimal_torus_rep(estimate_rotation_vector(map, 8, 200, 1).rho);
    double wn = omega.norm();
    if (wn >= 1.0 / (2.0 * c)) {
        out.hypothesis_ok = false;
        out.note = "hypothesis violated: ||omega|| >= 1/(2 c(kappa))";
    }

    out.lhs = c0_distance_to_identity(map, grid).estimate;

    double r = std::sqrt(c * wn);
    double lip = map.lip_bound();
    double max_diam = 0.0;
    const int G = grid.resolution, K = 16;
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
            Vec2 z{grid.offset.x + double(i) / G, grid.offset.y + double(j) / G};
            std::vector<Vec2> imgs;
            imgs.push_back(map.evaluate_lift(z));
            for (int k = 0; k < K; ++k) {
                double a = 2.0 * M_PI * k / K;
                imgs.push_back(map.evaluate_lift(
                    Vec2{z.x + r * std::cos(a), z.y + r * std::sin(a)}));
                imgs.push_back(map.evaluate_lift(
                    Vec2{z.x + 0.5 * r * std::cos(a), z.y + 0.5 * r * std::sin(a)}));
            }
            double d = 0.0;
            for (std::size_t a = 0; a < imgs.size(); ++a)
                for (std::size_t b = a + 1; b < imgs.size(); ++b)
                    d = std::max(d, (imgs[a] - imgs[b]).norm());
            max_diam = std::max(max_diam, d + 2.0 * lip * 0.4 * r); // covering slack
        }
    out.rhs = r + max_diam;
    out.pass = out.lhs <= out.rhs + 1e-9;
    return out;
}

ReturnStats first_return_stats(const AreaPreservingMap& map, const SimpleDisc& disc,
                               int horizon, int samples, std::uint64_t seed) {
    if (horizon < 1 || samples < 1) throw std::invalid_argument("bad horizon or samples");
    Vec2 blo = disc.bbox_lo(), bhi = disc.bbox_hi();
    Vec2 bc{(blo.x + bhi.x) / 2, (blo.y + bhi.y) / 2};

    ReturnStats out;
    int returned = 0;
    double total_n = 0.0, chain_n = 0.0;
    long long chain_count = 0;
    std::vector<double> first_ns;
    for (int s = 0; s < samples; ++s) {
        std::mt19937_64 rng(splitmix64(seed + 0x51ed2700ULL + std::uint64_t(s)));
        std::uniform_real_distribution<double> ux(blo.x, bhi.x), uy(blo.y, bhi.y);
        Vec2 z;
        do {
            z = {ux(rng), uy(rng)};
        } while (!disc.contains(z));

        std::vector<ReturnRecord> chain;
        Vec2 w = z;
        int since = 0;
        long long cum_x = 0, cum_y = 0;
        for (int n = 1; n <= horizon; ++n) {
            w = map.evaluate_lift(w);
            ++since;
            // representative of w in the lift D~
            Vec2 rep{w.x - std::nearbyint(w.x - bc.x), w.y - std::nearbyint(w.y - bc.y)};
            if (!disc.contains(rep)) continue;
            ReturnRecord rec;
            rec.z = z;
            rec.n = since;
            long long cx = std::llround(w.x - rep.x), cy = std::llround(w.y - rep.y);
            rec.lx = cx - cum_x; // lattice point relative to the previous landing
            rec.ly = cy - cum_y;
            cum_x = cx;
            cum_y = cy;
            chain.push_back(rec);
            since = 0;
        }
        if (!chain.empty()) {
            ++returned;
            first_ns.push_back(double(chain[0].n));
            total_n += chain[0].n;
            out.records.push_back(chain[0]);
            for (const auto& rec : chain) {
                chain_n += rec.n;
                ++chain_count;
            }
        }
        out.chains.push_back(std::move(chain));
    }
    out.return_fraction = double(returned) / samples;
    if (out.return_fraction < 0.95)
        throw std::runtime_error("insufficient returns: fewer than 95% of samples returned");

    double mean = total_n / returned;
    double var = 0.0;
    for (double n : first_ns) var += (n - mean) * (n - mean);
    var /= std::max(1, returned - 1);
    out.kac_estimate = disc.area() * mean;
    out.kac_sigma = disc.area() * std::sqrt(var / returned);
    out.kac_pass = out.kac_estimate <= 1.0 + 3.0 * out.kac_sigma;
    out.mean_return_time = chain_count > 0 ? chain_n / double(chain_count) : 0.0;
    return out;
}

std::string campaign_report(const std::vector<DiscCampaignRecord>& records) {
    nlohmann::json discs = nlohmann::json::array();
    int alarms = 0;
    for (const auto& r : records) {
        discs.push_back({{"shape", r.shape},
                         {"area", r.area},
                         {"threshold", r.threshold},
                         {"verdict", r.verdict},
                         {"hits", r.hits},
                         {"margin", r.margin},
                         {"alarm", r.alarm}});
        if (r.alarm) ++alarms;
    }
    nlohmann::json doc{{"discs", discs},
                       {"summary", {{"count", records.size()}, {"alarms", alarms}}}};
    return doc.dump(2) + "\n";
}

std::string return_histogram_csv(const ReturnStats& stats) {
    std::map<int, int> hist;
    for (const auto& r : stats.records) ++hist[r.n];
    std::ostringstream os;
    os << "n_D,count\n";
    for (const auto& [n, c] : hist) os << n << ',' << c << '\n';
    return os.str();
}

} // namespace pseudorot

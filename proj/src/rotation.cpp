#include "pseudorot/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pseudorot {

namespace {

std::vector<Vec2> sample_points(int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        double x = u(rng), y = u(rng);
        pts.push_back({x, y});
    }
    return pts;
}

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain; returns CCW hull without the repeated first vertex.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double torus_displacement_norm(const Vec2& d) {
    double dx = d.x - std::nearbyint(d.x);
    double dy = d.y - std::nearbyint(d.y);
    return std::sqrt(dx * dx + dy * dy);
}

double op_norm_2x2(double a, double b, double c, double d) {
    double t = a * a + b * b + c * c + d * d;
    double det = a * d - b * c;
    double disc = std::max(0.0, t * t - 4.0 * det * det);
    return std::sqrt(std::max(0.0, (t + std::sqrt(disc)) / 2.0));
}

} // namespace

RotationVectorEstimate estimate_rotation_vector(const AreaPreservingMap& map, int samples,
                                                int N, std::uint64_t seed) {
    if (!map.isotopic_to_identity()) throw std::domain_error("not isotopic to identity");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    std::vector<Vec2> pts = sample_points(samples, seed);

    std::vector<Vec2> finite(pts.size());
    std::vector<std::vector<Vec2>> orbits(pts.size());
    Vec2 mean{0.0, 0.0};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        orbits[i] = iterate(map, pts[i], N);
        finite[i] = {(orbits[i].back().x - pts[i].x) / N, (orbits[i].back().y - pts[i].y) / N};
        mean.x += finite[i].x;
        mean.y += finite[i].y;
    }
    mean.x /= double(pts.size());
    mean.y /= double(pts.size());

    double spread = 0.0, dev_cap = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        spread = std::max(spread, (finite[i] - mean).norm());
        for (int n = 1; n <= N; ++n) {
            Vec2 d{orbits[i][std::size_t(n)].x - pts[i].x - n * mean.x,
                   orbits[i][std::size_t(n)].y - pts[i].y - n * mean.y};
            dev_cap = std::max(dev_cap, d.norm());
        }
    }
    return {mean, spread + 2.0 * dev_cap / N};
}

RotationSetEstimate estimate_rotation_set(const AreaPreservingMap& map, int samples, int N,
                                          std::uint64_t seed, double tolerance) {
    if (!map.isotopic_to_identity()) throw std::domain_error("not isotopic to identity");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    std::vector<Vec2> pts = sample_points(samples, seed);

    std::vector<Vec2> cloud;
    for (const Vec2& z : pts) {
        auto orbit = iterate(map, z, N);
        for (int n = (N + 1) / 2; n <= N; ++n)
            cloud.push_back({(orbit[std::size_t(n)].x - z.x) / n,
                             (orbit[std::size_t(n)].y - z.y) / n});
    }

    RotationSetEstimate est;
    est.hull = convex_hull(std::move(cloud));
    est.tolerance = tolerance;
    for (std::size_t i = 0; i < est.hull.size(); ++i)
        for (std::size_t j = i + 1; j < est.hull.size(); ++j)
            est.diameter = std::max(est.diameter, (est.hull[i] - est.hull[j]).norm());
    est.pseudo_rotation = est.diameter < tolerance;
    return est;
}

DeviationSeries deviation_series(const AreaPreservingMap& map, const Vec2& rho, int samples,
                                 int N, std::optional<Vec2> direction, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    std::vector<Vec2> pts = sample_points(samples, seed);

    DeviationSeries out;
    out.rho = rho;
    out.running_max_norm.assign(static_cast<std::size_t>(N), 0.0);
    Vec2 vperp{0.0, 0.0};
    if (direction) {
        double nv = direction->norm();
        if (nv == 0.0) throw std::invalid_argument("direction must be nonzero");
        vperp = {-direction->y / nv, direction->x / nv};
        out.has_direction = true;
        out.direction = *direction;
        out.running_max_proj.assign(static_cast<std::size_t>(N), 0.0);
    }

    for (std::size_t i = 0; i < pts.size(); ++i) {
        Vec2 w = pts[i];
        for (int n = 1; n <= N; ++n) {
            w = map.evaluate_lift(w);
            Vec2 d{w.x - pts[i].x - n * rho.x, w.y - pts[i].y - n * rho.y};
            out.samples.push_back({n, int(i), d});
            std::size_t k = std::size_t(n - 1);
            out.running_max_norm[k] = std::max(out.running_max_norm[k], d.norm());
            if (out.has_direction) {
                double p = std::fabs(d.x * vperp.x + d.y * vperp.y);
                out.running_max_proj[k] = std::max(out.running_max_proj[k], p);
            }
        }
    }
    for (std::size_t k = 1; k < out.running_max_norm.size(); ++k) {
        out.running_max_norm[k] = std::max(out.running_max_norm[k], out.running_max_norm[k - 1]);
        if (out.has_direction)
            out.running_max_proj[k] =
                std::max(out.running_max_proj[k], out.running_max_proj[k - 1]);
    }
    out.kappa_hat = out.running_max_norm.empty() ? 0.0 : out.running_max_norm.back();
    out.kappa_hat_v = out.running_max_proj.empty() ? 0.0 : out.running_max_proj.back();
    return out;
}

std::vector<RigidityCandidate> rigidity_search(const AreaPreservingMap& map, int N_max,
                                               const GridSpec& grid) {
    if (N_max < 1) throw std::invalid_argument("N_max must be >= 1");
    const int G = grid.resolution;
    struct PointState {
        Vec2 x, w;
        double J[2][2];
    };
    std::vector<PointState> states;
    states.reserve(static_cast<std::size_t>(G) * G);
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
            Vec2 x{grid.offset.x + double(i) / G, grid.offset.y + double(j) / G};
            states.push_back({x, x, {{1.0, 0.0}, {0.0, 1.0}}});
        }

    std::vector<RigidityCandidate> all;
    all.reserve(static_cast<std::size_t>(N_max));
    for (int n = 1; n <= N_max; ++n) {
        double c0 = 0.0, c1 = 0.0;
        for (auto& s : states) {
            double Jg[2][2];
            map.jacobian(s.w, Jg);
            double a = Jg[0][0] * s.J[0][0] + Jg[0][1] * s.J[1][0];
            double b = Jg[0][0] * s.J[0][1] + Jg[0][1] * s.J[1][1];
            double c = Jg[1][0] * s.J[0][0] + Jg[1][1] * s.J[1][0];
            double d = Jg[1][0] * s.J[0][1] + Jg[1][1] * s.J[1][1];
            s.J[0][0] = a; s.J[0][1] = b; s.J[1][0] = c; s.J[1][1] = d;
            s.w = map.evaluate_lift(s.w);
            c0 = std::max(c0, torus_displacement_norm(s.w - s.x));
            c1 = std::max(c1, op_norm_2x2(a - 1.0, b, c, d - 1.0));
        }
        all.push_back({n, c0, c1});
    }
    std::stable_sort(all.begin(), all.end(), [](const RigidityCandidate& a,
                                                const RigidityCandidate& b) {
        return a.c0_dist < b.c0_dist;
    });
    if (all.size() > 10) all.resize(10);
    return all;
}

std::string deviation_series_csv(const DeviationSeries& series) {
    std::ostringstream os;
    os.precision(17);
    os << "n,dev_x,dev_y,norm,proj_v\n";
    Vec2 vperp{0.0, 0.0};
    if (series.has_direction) {
        double nv = series.direction.norm();
        vperp = {-series.direction.y / nv, series.direction.x / nv};
    }
    for (const auto& s : series.samples) {
        double proj =
            series.has_direction ? std::fabs(s.dev.x * vperp.x + s.dev.y * vperp.y) : 0.0;
        os << s.n << ',' << s.dev.x << ',' << s.dev.y << ',' << s.dev.norm() << ',' << proj
           << '\n';
    }
    return os.str();
}

std::string rigidity_csv(const std::vector<RigidityCandidate>& candidates) {
    std::ostringstream os;
    os.precision(17);
    os << "n,c0_dist,c1_dist\n";
    for (const auto& c : candidates)
        os << c.n << ',' << c.c0_dist << ',' << c.c1_dist << '\n';
    return os.str();
}

std::string hull_csv(const RotationSetEstimate& estimate) {
    std::ostringstream os;
    os.precision(17);
    os << "x,y\n";
    for (const auto& v : estimate.hull) os << v.x << ',' << v.y << '\n';
    return os.str();
}

} // namespace pseudorot

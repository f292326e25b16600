#include <doctest.h>

#include <cmath>
#include <random>

#include "pseudorot/displacement.hpp"
#include "pseudorot/rotation.hpp"

using namespace pseudorot;

namespace {

AreaPreservingMap gentle_conjugator(double amp) {
    PeriodicProfile px(BigRat(1));
    px.add_bump(BigRat(1, 4), BigRat(1, 8), amp);
    px.add_bump(BigRat(3, 4), BigRat(1, 8), -amp / 2);
    PeriodicProfile py(BigRat(1));
    py.add_bump(BigRat(1, 2), BigRat(1, 5), amp / 2);
    AreaPreservingMap h;
    h.append(Generator::shear_y(py));
    h.append(Generator::shear_x(px));
    return h;
}

const FundamentalDomain kUnit = FundamentalDomain::corner_at(Vec2{0.0, 0.0});

} // namespace

TEST_CASE("c constant formula") {
    CHECK(c_constant(0.0, kUnit) == doctest::Approx(48.0 * std::sqrt(2.0)));
    CHECK(c_constant(0.0, kUnit) == doctest::Approx(67.8823).epsilon(1e-4));
    CHECK(c_constant(1.0, kUnit) == doctest::Approx(8.0 * (1.0 + 6.0 * std::sqrt(2.0))));
    CHECK(c_constant(1.0, kUnit) == doctest::Approx(75.8823).epsilon(1e-4));
    CHECK(c_constant_sup(0.5) < 8.0 * (0.5 + 12.0));
    CHECK_THROWS((void)c_constant(-1.0, kUnit));
}

TEST_CASE("disc geometry") {
    SimpleDisc r = SimpleDisc::round(Vec2{0.5, 0.5}, 0.15);
    CHECK(r.area() == doctest::Approx(M_PI * 0.0225));
    CHECK(r.contains(Vec2{0.5, 0.6}));
    CHECK_FALSE(r.contains(Vec2{0.5, 0.66}));
    CHECK(r.contains_torus(Vec2{1.5, -0.4})); // translate of (0.5, 0.6)
    CHECK(r.distance(Vec2{0.5, 0.75}) == doctest::Approx(0.1));

    SimpleDisc box = SimpleDisc::rect(Vec2{0.1, 0.2}, Vec2{0.4, 0.5});
    CHECK(box.area() == doctest::Approx(0.09));
    CHECK(box.distance(Vec2{0.5, 0.35}) == doctest::Approx(0.1));

    SimpleDisc sn = SimpleDisc::snake(Vec2{0.2, 0.2}, 0.1, {{0, 0}, {1, 0}, {1, 1}});
    CHECK(sn.area() == doctest::Approx(0.03)); // exact cell count * w^2
    CHECK(sn.contains(Vec2{0.25, 0.25}));
    CHECK(sn.contains(Vec2{0.35, 0.35}));
    CHECK_FALSE(sn.contains(Vec2{0.25, 0.35}));

    CHECK_THROWS((void)SimpleDisc::snake(Vec2{0, 0}, 0.1, {{0, 0}, {1, 1}}));
    // closed loop: first and last cells touch
    CHECK_THROWS((void)SimpleDisc::snake(Vec2{0, 0}, 0.1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}));

    CHECK_NOTHROW(r.check_simple(kUnit));
    SimpleDisc edge = SimpleDisc::round(Vec2{0.05, 0.5}, 0.1);
    CHECK_THROWS_WITH(edge.check_simple(kUnit), doctest::Contains("disc not simple"));
}

TEST_CASE("disc displacement verdicts for a small translation") {
    AreaPreservingMap t = AreaPreservingMap::translation(Vec2{0.001, 0.0});
    Vec2 omega{0.001, 0.0};

    SimpleDisc big = SimpleDisc::round(Vec2{0.5, 0.5}, 0.15);
    auto res = verify_disc_displacement(t, 0.0, kUnit, big, 400, omega, 1);
    CHECK(res.verdict == DiscVerdict::Intersects);
    CHECK(res.area > res.threshold); // 0.0707 > 48*sqrt(2)*0.001
    CHECK_FALSE(res.alarm);

    SimpleDisc tiny = SimpleDisc::round(Vec2{0.5, 0.5}, 0.0004);
    auto res2 = verify_disc_displacement(t, 0.0, kUnit, tiny, 400, omega, 1);
    CHECK(res2.verdict == DiscVerdict::DisjointWithMargin);
    CHECK(res2.margin > 0.0);
    CHECK(res2.area < res2.threshold);
    CHECK_FALSE(res2.alarm);

    SimpleDisc outside = SimpleDisc::round(Vec2{0.05, 0.5}, 0.1);
    CHECK_THROWS_WITH(
        (void)verify_disc_displacement(t, 0.0, kUnit, outside, 10, omega, 1),
        doctest::Contains("disc not simple"));
}

TEST_CASE("displacement campaign: no alarms over 200 randomized discs") {
    AreaPreservingMap h = gentle_conjugator(0.005);
    Vec2 omega{5e-5, 2e-5};
    AreaPreservingMap f = conjugate(AreaPreservingMap::translation(omega), h);

    auto dev = deviation_series(f, omega, 8, 80, omega, 17);
    double kappa = dev.kappa_hat_v;

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uc(0.3, 0.7), ur(0.1, 0.18), us(0.1, 0.3);
    std::vector<DiscCampaignRecord> records;
    int alarms = 0, intersects = 0;
    for (int i = 0; i < 200; ++i) {
        SimpleDisc disc = [&] {
            switch (i % 3) {
            case 0: return SimpleDisc::round(Vec2{uc(rng), uc(rng)}, ur(rng));
            case 1: {
                double x = uc(rng), y = uc(rng), a = us(rng) / 2, b = us(rng) / 2;
                return SimpleDisc::rect(Vec2{x - a, y - b}, Vec2{x + a, y + b});
            }
            default:
                return SimpleDisc::snake(Vec2{uc(rng) - 0.1, uc(rng) - 0.1}, 0.1,
                                         {{0, 0}, {1, 0}, {1, 1}});
            }
        }();
        auto res = verify_disc_displacement(f, kappa, kUnit, disc, 50, omega, 1000 + i);
        REQUIRE(res.area > res.threshold); // campaign only covers supercritical discs
        if (res.verdict == DiscVerdict::Intersects) ++intersects;
        if (res.alarm) ++alarms;
        records.push_back({disc.describe(), res.area, res.threshold,
                           res.verdict == DiscVerdict::Intersects ? "intersects"
                           : res.verdict == DiscVerdict::DisjointWithMargin
                               ? "disjoint-with-margin"
                               : "inconclusive",
                           res.hits, res.margin, res.alarm});
    }
    CHECK(intersects == 200);
    CHECK(alarms == 0);

    std::string report = campaign_report(records);
    CHECK(report.find("\"alarms\": 0") != std::string::npos);
    CHECK(report.find("\"count\": 200") != std::string::npos);
}

TEST_CASE("c0 bound check") {
    GridSpec grid;
    grid.resolution = 8;

    auto id = c0_bound_check(AreaPreservingMap::identity(), 0.0, grid);
    CHECK(id.lhs == 0.0);
    CHECK(id.pass);

    auto tr = c0_bound_check(AreaPreservingMap::translation(Vec2{1e-6, 0.0}), 0.0, grid);
    CHECK(tr.hypothesis_ok);
    CHECK(tr.lhs == doctest::Approx(1e-6));
    CHECK(tr.rhs >= std::sqrt(c_constant_sup(0.0) * 1e-6));
    CHECK(tr.pass);

    AreaPreservingMap f =
        conjugate(AreaPreservingMap::translation(Vec2{1e-8, 0.0}), gentle_conjugator(0.05));
    auto cj = c0_bound_check(f, 0.0, grid);
    CHECK(cj.hypothesis_ok);
    CHECK(cj.pass);

    auto bad = c0_bound_check(AreaPreservingMap::translation(Vec2{0.3, 0.4}), 0.0, grid);
    CHECK_FALSE(bad.hypothesis_ok);
    CHECK(bad.note.find("hypothesis violated") != std::string::npos);
}

TEST_CASE("first return statistics on a minimal translation") {
    double g = (std::sqrt(5.0) - 1.0) / 2.0;
    Vec2 omega{0.01 * g, 0.01 * g * g};
    AreaPreservingMap t = AreaPreservingMap::translation(omega);
    SimpleDisc disc = SimpleDisc::round(Vec2{0.5, 0.5}, std::sqrt(0.05 / M_PI));

    auto stats = first_return_stats(t, disc, 2000, 20000, 7);
    CHECK(stats.return_fraction >= 0.95);
    CHECK(stats.kac_pass);
    CHECK(stats.kac_estimate <= 1.0 + 3.0 * stats.kac_sigma);

    // return-time lower bound with kappa = 0 for an exact translation
    double bound = 1.0 / (c_constant(0.0, kUnit) * omega.norm());
    CHECK(stats.mean_return_time >= bound * 0.9);

    // lift identity: F^(sum n) (z) = sum l + representative in the lift disc
    int checked = 0;
    for (const auto& chain : stats.chains) {
        if (chain.size() < 3) continue;
        Vec2 w = chain[0].z;
        long long total_n = 0, sx = 0, sy = 0;
        for (const auto& rec : chain) {
            total_n += rec.n;
            sx += rec.lx;
            sy += rec.ly;
        }
        for (long long k = 0; k < total_n; ++k) w = t.evaluate_lift(w);
        Vec2 rep{w.x - double(sx), w.y - double(sy)};
        CHECK(disc.distance(rep) <= 1e-9);
        if (++checked >= 50) break;
    }
    CHECK(checked > 0);

    std::string csv = return_histogram_csv(stats);
    CHECK(csv.rfind("n_D,count\n", 0) == 0);
}

TEST_CASE("period-2 return for a half translation") {
    AreaPreservingMap t = AreaPreservingMap::translation(RatVec2{BigRat(1, 2), BigRat(0)});
    SimpleDisc disc = SimpleDisc::round(Vec2{0.25, 0.5}, 0.1);
    auto stats = first_return_stats(t, disc, 50, 2000, 3);
    for (const auto& rec : stats.records) CHECK(rec.n == 2);
    CHECK(stats.kac_estimate == doctest::Approx(2.0 * disc.area()));
    CHECK(stats.mean_return_time == doctest::Approx(2.0));

    CHECK_THROWS_WITH(
        (void)first_return_stats(AreaPreservingMap::translation(Vec2{0.37, 0.21}), disc, 1,
                                 200, 3),
        doctest::Contains("insufficient returns"));
}

TEST_CASE("lift identity on a conjugated translation") {
    AreaPreservingMap f =
        conjugate(AreaPreservingMap::translation(Vec2{0.23, 0.11}), gentle_conjugator(0.02));
    SimpleDisc disc = SimpleDisc::round(Vec2{0.5, 0.5}, 0.2);
    auto stats = first_return_stats(f, disc, 400, 400, 5);
    int checked = 0;
    for (const auto& chain : stats.chains) {
        if (chain.size() < 2) continue;
        Vec2 w = chain[0].z;
        long long total_n = 0, sx = 0, sy = 0;
        for (const auto& rec : chain) {
            total_n += rec.n;
            sx += rec.lx;
            sy += rec.ly;
            CHECK(rec.n >= 1);
        }
        for (long long k = 0; k < total_n; ++k) w = f.evaluate_lift(w);
        Vec2 rep{w.x - double(sx), w.y - double(sy)};
        CHECK(disc.distance(rep) <= 1e-9);
        if (++checked >= 30) break;
    }
    CHECK(checked > 0);
}

#include <doctest.h>

#include <cmath>

#include "pseudorot/rotation.hpp"

using namespace pseudorot;

namespace {

AreaPreservingMap small_conjugator() {
    PeriodicProfile px(BigRat(1));
    px.add_bump(BigRat(1, 4), BigRat(1, 8), 0.03);
    px.add_bump(BigRat(3, 4), BigRat(1, 8), -0.02);
    PeriodicProfile py(BigRat(1));
    py.add_bump(BigRat(1, 2), BigRat(1, 5), 0.025);
    AreaPreservingMap h;
    h.append(Generator::shear_y(py));
    h.append(Generator::shear_x(px));
    return h;
}

double torus_norm_d(double x, double y) {
    double dx = x - std::nearbyint(x), dy = y - std::nearbyint(y);
    return std::sqrt(dx * dx + dy * dy);
}

AreaPreservingMap repeat(const AreaPreservingMap& f, int q) {
    AreaPreservingMap g;
    for (int i = 0; i < q; ++i) g = f.after(g);
    return g;
}

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0; // 0.618...

} // namespace

TEST_CASE("rotation vector of a translation is exact") {
    auto est = estimate_rotation_vector(AreaPreservingMap::translation(Vec2{0.3, 0.7}), 8, 50);
    CHECK(est.rho.x == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(est.rho.y == doctest::Approx(0.7).epsilon(1e-13));
    CHECK(est.residual < 1e-10);

    AreaPreservingMap lin;
    lin.append(Generator::linear(Mat2i{1, 1, 0, 1}));
    CHECK_THROWS_WITH((void)estimate_rotation_vector(lin, 4, 10),
                      doctest::Contains("not isotopic to identity"));
}

TEST_CASE("rotation vector of a conjugated translation") {
    AreaPreservingMap h = small_conjugator();
    GridSpec grid;
    grid.resolution = 96;
    double delta = c0_distance_to_identity(h, grid).certified;
    Vec2 omega{0.137, 0.294};
    AreaPreservingMap f = conjugate(AreaPreservingMap::translation(omega), h);

    const int N = 100;
    auto est = estimate_rotation_vector(f, 12, N, 5);
    double err = std::hypot(est.rho.x - omega.x, est.rho.y - omega.y);
    CHECK(err <= 2.0 * delta / N);
    CHECK(err <= est.residual + 1e-12);
}

TEST_CASE("rotation set of a translation is a point") {
    auto est = estimate_rotation_set(AreaPreservingMap::translation(Vec2{0.21, 0.55}), 10, 60);
    CHECK(est.diameter <= 1e-12);
    CHECK(est.pseudo_rotation);
    REQUIRE(!est.hull.empty());
    CHECK(est.hull[0].x == doctest::Approx(0.21).epsilon(1e-12));
}

TEST_CASE("rotation set of a conjugated translation is small") {
    AreaPreservingMap h = small_conjugator();
    GridSpec grid;
    grid.resolution = 96;
    double delta = c0_distance_to_identity(h, grid).certified;
    AreaPreservingMap f = conjugate(AreaPreservingMap::translation(Vec2{0.101, 0.377}), h);
    const int N = 200;
    auto est = estimate_rotation_set(f, 10, N, 2);
    CHECK(est.diameter <= 4.0 * delta / (N / 2.0));
}

TEST_CASE("mean-zero shear has a horizontal segment rotation set") {
    PeriodicProfile p(BigRat(1));
    p.add_bump(BigRat(1, 4), BigRat(1, 8), 0.05);
    p.add_bump(BigRat(3, 4), BigRat(1, 8), -0.05);
    AreaPreservingMap s;
    s.append(Generator::shear_x(p));

    auto est = estimate_rotation_set(s, 60, 40, 9);
    for (const Vec2& v : est.hull) {
        CHECK(std::fabs(v.y) < 1e-12);
        CHECK(v.x >= -0.05 - 1e-12);
        CHECK(v.x <= 0.05 + 1e-12);
    }
    CHECK(est.diameter <= 0.1 + 1e-12);
    CHECK(est.diameter > 1e-3);
    CHECK_FALSE(est.pseudo_rotation);
}

TEST_CASE("deviation series") {
    Vec2 omega{0.173, 0.511};
    AreaPreservingMap t = AreaPreservingMap::translation(omega);

    auto zero = deviation_series(t, omega, 6, 40);
    CHECK(zero.kappa_hat < 1e-12);

    auto drift = deviation_series(t, Vec2{omega.x + 0.01, omega.y}, 6, 40);
    CHECK(drift.running_max_norm.back() == doctest::Approx(0.01 * 40).epsilon(1e-9));
    // running maxima are nondecreasing
    for (std::size_t k = 1; k < drift.running_max_norm.size(); ++k)
        CHECK(drift.running_max_norm[k] >= drift.running_max_norm[k - 1]);

    AreaPreservingMap h = small_conjugator();
    GridSpec grid;
    grid.resolution = 96;
    double delta = c0_distance_to_identity(h, grid).certified;
    AreaPreservingMap f = conjugate(t, h);
    auto dev = deviation_series(f, omega, 10, 120, Vec2{omega.x, omega.y}, 3);
    CHECK(dev.kappa_hat <= 2.0 * delta + 1e-9);
    CHECK(dev.kappa_hat_v <= dev.kappa_hat + 1e-15);
}

TEST_CASE("rigidity search on rational and golden translations") {
    GridSpec grid;
    grid.resolution = 4;
    auto rational = rigidity_search(
        AreaPreservingMap::translation(RatVec2{BigRat(1, 8), BigRat(3, 8)}), 8, grid);
    REQUIRE(!rational.empty());
    CHECK(rational[0].n == 8);
    CHECK(rational[0].c0_dist < 1e-12);
    CHECK(rational[0].c1_dist < 1e-12);

    Vec2 omega{kGolden, kGolden * kGolden};
    auto cands = rigidity_search(AreaPreservingMap::translation(omega), 1000, grid);
    REQUIRE(cands.size() == 10);
    // direct scan oracle
    int best_n = 1;
    double best = 1e9;
    for (int n = 1; n <= 1000; ++n) {
        double d = torus_norm_d(n * omega.x, n * omega.y);
        if (d < best) { best = d; best_n = n; }
    }
    CHECK(cands[0].n == best_n);
    CHECK(cands[0].c0_dist == doctest::Approx(best).epsilon(1e-9));
    bool fib = false;
    for (int f : {1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987})
        if (best_n == f) fib = true;
    CHECK(fib);
    // sorted ascending by distance
    for (std::size_t i = 1; i < cands.size(); ++i)
        CHECK(cands[i].c0_dist >= cands[i - 1].c0_dist);
}

TEST_CASE("rigidity search respects the conjugation bound") {
    AreaPreservingMap h = small_conjugator();
    Vec2 omega{kGolden, kGolden * kGolden};
    AreaPreservingMap f = conjugate(AreaPreservingMap::translation(omega), h);
    GridSpec grid;
    grid.resolution = 6;
    auto cands = rigidity_search(f, 200, grid);
    REQUIRE(!cands.empty());
    double oracle = 1e9;
    for (int n = 1; n <= 200; ++n)
        oracle = std::min(oracle, torus_norm_d(n * omega.x, n * omega.y));
    CHECK(cands[0].c0_dist <= h.lip_bound() * oracle + 1e-9);
}

TEST_CASE("rotation vector of powers and linear conjugates") {
    AreaPreservingMap h = small_conjugator();
    Vec2 omega{0.0831, 0.2412};
    AreaPreservingMap f = conjugate(AreaPreservingMap::translation(omega), h);
    auto base = estimate_rotation_vector(f, 8, 120, 4);

    for (int q = 2; q <= 8; ++q) {
        auto powered = estimate_rotation_vector(repeat(f, q), 8, 120, 4);
        double err = std::hypot(powered.rho.x - q * base.rho.x,
                                powered.rho.y - q * base.rho.y);
        CHECK(err <= powered.residual + q * base.residual + 1e-12);
    }

    for (Mat2i A : {Mat2i{1, 1, 0, 1}, Mat2i{2, 1, 1, 1}}) {
        AreaPreservingMap ta;
        ta.append(Generator::linear(A));
        AreaPreservingMap fa = conjugate(f, ta);
        REQUIRE(fa.isotopic_to_identity());
        auto ra = estimate_rotation_vector(fa, 8, 120, 4);
        Vec2 expect = A.apply(base.rho);
        double err = std::hypot(ra.rho.x - expect.x, ra.rho.y - expect.y);
        CHECK(err <= ra.residual + A.op_norm() * base.residual + 1e-12);
    }
}

TEST_CASE("bounded mean motion stability under powers and conjugation") {
    AreaPreservingMap h = small_conjugator();
    Vec2 omega{0.171, 0.305};
    AreaPreservingMap f = conjugate(AreaPreservingMap::translation(omega), h);

    const int m = 3, N = 30;
    auto base = deviation_series(f, omega, 10, m * N, std::nullopt, 8);
    auto powered = deviation_series(repeat(f, m), Vec2{m * omega.x, m * omega.y}, 10, N,
                                    std::nullopt, 8);
    CHECK(powered.kappa_hat <= base.kappa_hat + 1e-12);

    for (Mat2i A : {Mat2i{1, 1, 0, 1}, Mat2i{2, 1, 1, 1}}) {
        AreaPreservingMap ta;
        ta.append(Generator::linear(A));
        AreaPreservingMap fa = conjugate(f, ta);
        auto dev_a = deviation_series(fa, A.apply(omega), 10, 90, std::nullopt, 8);
        CHECK(dev_a.kappa_hat <= A.op_norm() * base.kappa_hat + 0.05);
    }
}

TEST_CASE("csv emitters have fixed headers") {
    Vec2 omega{0.1, 0.2};
    AreaPreservingMap t = AreaPreservingMap::translation(omega);
    auto dev = deviation_series(t, omega, 2, 3, Vec2{1.0, 0.0});
    std::string csv = deviation_series_csv(dev);
    CHECK(csv.rfind("n,dev_x,dev_y,norm,proj_v\n", 0) == 0);

    GridSpec grid;
    grid.resolution = 2;
    std::string rcsv = rigidity_csv(rigidity_search(t, 5, grid));
    CHECK(rcsv.rfind("n,c0_dist,c1_dist\n", 0) == 0);

    std::string hcsv = hull_csv(estimate_rotation_set(t, 3, 10));
    CHECK(hcsv.rfind("x,y\n", 0) == 0);
}

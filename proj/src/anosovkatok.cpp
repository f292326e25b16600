#include "pseudorot/anosovkatok.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pseudorot/rotation.hpp"

namespace pseudorot {

namespace {

using nlohmann::json;

// Representative of x in (-1/2, 1/2].
BigRat reduce_half(const BigRat& x) { return x - BigRat(round_rat(x)); }

BigRat mod_period(const BigRat& x, const BigRat& p) {
    return x - BigRat(floor_rat(x / p)) * p;
}

RatVec2 frac(const RatVec2& p) { return {frac_rat(p.x), frac_rat(p.y)}; }

BigInt pow_big(int base, int e) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

double torus_dist(const Vec2& a, const Vec2& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    dx -= std::nearbyint(dx);
    dy -= std::nearbyint(dy);
    return std::sqrt(dx * dx + dy * dy);
}

Vec2 eval_exact(const AreaPreservingMap& map, const RatVec2& p) {
    return map.evaluate_lift(HybridPoint::exact(p)).to_vec2();
}

// Integer lattice vectors for the orbit-density bound.
struct LatVec {
    BigInt x, y;
};

BigInt norm_sq(const LatVec& v) { return v.x * v.x + v.y * v.y; }
BigInt dot(const LatVec& a, const LatVec& b) { return a.x * b.x + a.y * b.y; }

void gauss_reduce(LatVec& a, LatVec& b) {
    if (norm_sq(b) < norm_sq(a)) std::swap(a, b);
    for (int it = 0; it < 20000; ++it) {
        BigInt mu = round_rat(BigRat(dot(a, b), norm_sq(a)));
        if (mu != 0) {
            b.x -= mu * a.x;
            b.y -= mu * a.y;
        }
        if (norm_sq(b) >= norm_sq(a)) break;
        std::swap(a, b);
    }
}

// log of (covering radius of the lattice spanned by b1, b2, scaled by 1/scale):
// every point lies within half the longer diagonal of the reduced cell.
double log_covering_radius(LatVec b1, LatVec b2, const BigInt& scale) {
    gauss_reduce(b1, b2);
    BigInt d = dot(b1, b2);
    if (d < 0) d = -d;
    BigInt diag_sq = norm_sq(b1) + norm_sq(b2) + 2 * d;
    return 0.5 * log_big(diag_sq) - std::log(2.0) - log_big(scale);
}

BigRat abs_rat(const BigRat& x) { return x < 0 ? BigRat(-x) : x; }

void check_a4(const RatVec2& omega, int range, bool* pass, long long* count) {
    *pass = true;
    *count = 0;
    for (int k1 = -range; k1 <= range; ++k1)
        for (int k2 = -range; k2 <= range; ++k2)
            for (int k3 = -range; k3 <= range; ++k3) {
                if (k1 == 0 && k2 == 0 && k3 == 0) continue;
                ++*count;
                if (BigRat(k1) * omega.x + BigRat(k2) * omega.y + BigRat(k3) == 0)
                    *pass = false;
            }
}

} // namespace

BuildHResult build_h(const BigInt& q, const RatVec2& x, const RatVec2& y, double sigma,
                     double tau) {
    if (q < 2) throw std::invalid_argument("q must be >= 2");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("transversality too small");
    const BigRat taur = rat_from_double(tau);
    const BigRat per(1, q);

    const RatVec2 d{reduce_half(y.x - x.x), reduce_half(y.y - x.y)};
    if (d.x * d.x + d.y * d.y >= BigRat(1, 4))
        throw std::invalid_argument("d(x,y) must be below 1/2");
    for (const BigRat& c : {d.x, d.y}) {
        if (torus_dist_rat(BigRat(c * q)) / BigRat(q) < taur)
            throw std::invalid_argument("transversality too small");
    }

    // Vertical cell alignment: -k/q < y2 - x2 < -(k-1)/q.
    const BigInt k = -floor_rat(BigRat(d.y * q));
    const BigRat delta2 = d.y + BigRat(k, q); // in (0, 1/q)

    // Dyadic marker offset s = 2^-j: y' = x' + (s, s). Keep it below 1/(8q)
    // and sigma/4, and off the vertical landing offset delta2 so the shear
    // supports below have positive clearance.
    BigRat s(1, 2);
    const BigRat s_limit = std::min(BigRat(per / 8), BigRat(rat_from_double(sigma) / 4));
    if (s_limit <= 0) throw std::runtime_error("bump placement failed");
    for (int z = 0; s > s_limit; ++z) {
        if (z > 4000) throw std::runtime_error("bump placement failed");
        s /= 2;
    }
    if (s == delta2) s /= 2;

    // Decompose an exact displacement into exactly-representable double
    // chunks. Each chunk becomes one shear value, applied at an exact bump
    // center, so the marker path through h stays exact. Dyadic displacements
    // decompose completely; otherwise a residual far below the defect
    // tolerance remains and is reported.
    const BigRat res_floor = std::min(BigRat(s / 2), BigRat(1, BigInt(1) << 140));
    auto chunks_of = [&](BigRat delta) {
        std::vector<double> out;
        for (int i = 0; i < 100 && delta != 0 && abs_rat(delta) >= res_floor; ++i) {
            double c = to_double(delta);
            if (c == 0.0) break;
            out.push_back(c);
            delta -= rat_from_double(c);
        }
        return std::make_pair(out, delta);
    };
    auto [cy, res_y] = chunks_of(d.y - s);
    auto [cx, res_x] = chunks_of(d.x - s);

    // Vertical moves: bumps in the x-coordinate at offset s from x1, so they
    // fire exactly on the marker path and miss x' (offset 0) and both probes
    // (offsets near half a cell away).
    std::vector<Generator> gens;
    const BigRat center_y = mod_period(x.x + s, per);
    for (double c : cy) {
        PeriodicProfile p(per);
        p.add_bump(center_y, BigRat(s / 2), c);
        gens.push_back(Generator::shear_y(std::move(p)));
    }

    // Horizontal moves: bumps in the y-coordinate at the exact post-move
    // height of the marker path. Clearance against the x' path (offset 0)
    // and the pulled-back y probe (offset s) is computed exactly.
    BigRat y_final = x.y + BigRat(k, q) + s;
    for (double c : cy) y_final += rat_from_double(c);
    const BigRat center_x = mod_period(y_final, per);
    auto per_dist = [&](const BigRat& a, const BigRat& b) {
        BigRat e2 = mod_period(a - b, per);
        return std::min(e2, BigRat(per - e2));
    };
    const BigRat clear_x =
        std::min(per_dist(center_x, mod_period(x.y, per)),
                 per_dist(center_x, mod_period(x.y + s, per)));
    if (clear_x <= 0) throw std::runtime_error("bump placement failed");
    for (double c : cx) {
        PeriodicProfile p(per);
        p.add_bump(center_x, BigRat(clear_x / 2), c);
        gens.push_back(Generator::shear_x(std::move(p)));
    }
    gens.push_back(Generator::translation(RatVec2{BigRat(0), -BigRat(k, q)}));

    BuildHResult res;
    res.h = AreaPreservingMap(std::move(gens));
    res.x_prime = {frac_rat(x.x), frac_rat(BigRat(x.y + BigRat(k, q)))};
    res.y_prime = frac(RatVec2{res.x_prime.x + s, res.x_prime.y + s});
    res.offset = {s, s};
    res.tau_prime = torus_dist_rat(BigRat(s * q)) / BigRat(q);

    double sum_moves = 0.0;
    for (double c : cy) sum_moves += std::abs(c);
    for (double c : cx) sum_moves += std::abs(c);
    res.certified_c0 = sum_moves + to_double(BigRat(abs_rat(res_x) + abs_rat(res_y))) +
                       to_double(BigRat(BigRat(abs(k)) / q));

    // Exact verification: evaluate h on the markers and probes in hybrid
    // arithmetic (values fold into the exact part) and measure defects as
    // exact rationals.
    auto exact_image = [&](const RatVec2& p) {
        HybridPoint hp = res.h.evaluate_lift(HybridPoint::exact(p));
        return RatVec2{BigRat(hp.bx + rat_from_double(hp.dx)),
                       BigRat(hp.by + rat_from_double(hp.dy))};
    };
    auto exact_tdist = [](const RatVec2& a, const RatVec2& b) {
        BigRat ex = torus_dist_rat(BigRat(a.x - b.x));
        BigRat ey = torus_dist_rat(BigRat(a.y - b.y));
        return std::sqrt(to_double(BigRat(ex * ex + ey * ey)));
    };
    res.marker_defect = std::max(exact_tdist(exact_image(res.x_prime), x),
                                 exact_tdist(exact_image(res.y_prime), y));
    const RatVec2 e{BigRat(1, 2 * q), BigRat(0)};
    res.probe_contraction = exact_tdist(exact_image(frac(res.x_prime + e)),
                                        exact_image(frac(res.y_prime + e)));

    if (res.marker_defect > 1e-10)
        throw std::runtime_error("bump placement failed: marker defect too large");
    double s_d = to_double(s);
    if (!(std::hypot(s_d, s_d) < sigma) || !(res.probe_contraction < sigma))
        throw std::runtime_error("bump placement failed: sigma budget missed");
    return res;
}

// Default budget: stage 3 needs q_2 (34 digits); stage 4 would need q_3
// (290 digits), far beyond what the double-precision certificates support.
ConstructionParams::ConstructionParams() : q_cap(pow_big(10, 60)), r_start(0) {}

StageState initial_stage() {
    StageState s;
    s.n = 1;
    s.h = {AreaPreservingMap::identity()};
    s.H = AreaPreservingMap::identity();
    s.omega = {BigRat(1, 100), BigRat(1, 10)};
    s.q = 100;
    s.x_marker = {BigRat(1, 3), BigRat(1, 7)};
    s.y_marker = {BigRat(1, 3) + BigRat(3, 1000), BigRat(1, 7) + BigRat(3, 1000)};
    s.x_probe_seed = s.x_marker;
    s.y_probe_seed = s.y_marker;
    s.x_probe = s.x_marker.to_vec2();
    s.y_probe = s.y_marker.to_vec2();
    s.m_exponent = 1;
    s.gamma1 = 0;
    s.tau = BigRat(3, 1000);
    s.kappa = 0.0;
    s.v = 0;
    s.r = 0;
    s.c0_sum = 0.0;
    s.c0_last = 0.0;

    // Half the minimum slack across the stage-1 checks.
    double dist = torus_dist(s.x_marker.to_vec2(), s.y_marker.to_vec2());
    double density =
        std::exp(log_covering_radius(LatVec{1, 10}, LatVec{0, 100}, BigInt(100)));
    s.epsilon = 0.5 * std::min({1e-2 - dist, dist - 1e-3, 0.5, 0.5 - density});
    return s;
}

void validate_stage(const StageState& st) {
    auto fail = [](const std::string& why) {
        throw std::invalid_argument("invalid stage state: " + why);
    };
    if (st.n < 1) fail("stage index must be >= 1");
    if (static_cast<int>(st.h.size()) != st.n) fail("conjugator list length mismatch");
    if (st.q <= pow_big(10, st.n)) fail("q_n must exceed 10^n");
    for (const BigRat& c : {st.omega.x, st.omega.y}) {
        if (c < 0 || c >= 1) fail("omega coordinates must lie in [0,1)");
        if (denominator(BigRat(c * st.q)) != 1)
            fail("omega denominator does not divide q_n");
    }
    for (const RatVec2* p : {&st.x_marker, &st.y_marker, &st.x_probe_seed, &st.y_probe_seed}) {
        if (frac_rat(p->x) != p->x || frac_rat(p->y) != p->y)
            fail("marker/probe coordinates must lie in [0,1)");
    }
    const RatVec2 d{reduce_half(st.y_marker.x - st.x_marker.x),
                    reduce_half(st.y_marker.y - st.x_marker.y)};
    if (d.x * d.x + d.y * d.y >= BigRat(1, pow_big(10, 4 * st.n)))
        fail("marker distance exceeds 10^-2n");
    if (st.tau <= 0) fail("transversality floor must be positive");
    for (const BigRat& c : {d.x, d.y}) {
        if (torus_dist_rat(c * st.q) / BigRat(st.q) < st.tau)
            fail("marker transversality below the stored floor");
    }
    if (!(st.epsilon > 0.0)) fail("epsilon must be positive");
    if (!(st.c0_sum < 1.0 - std::ldexp(1.0, -st.n))) fail("certified C0 sum too large");
}

StageState advance_stage(const StageState& state, const ConstructionParams& params,
                         StageChecks* checks) {
    validate_stage(state);
    if (state.q > params.q_cap)
        throw BudgetExceeded("stage budget exceeded: q_n has " +
                             std::to_string(state.q.str().size()) +
                             " digits, beyond the configured cap");
    const int n = state.n;
    StageChecks ck;
    ck.n = n + 1;

    const double C1H = state.H.lip_bound();
    const double sigma = std::pow(10.0, -2 * n - 4) / std::max(1.0, C1H);
    ck.sigma = sigma;

    // Round the exact floor down so equality at the floor still passes.
    BuildHResult bh = build_h(state.q, state.x_marker, state.y_marker, sigma,
                              std::nextafter(to_double(state.tau), 0.0));
    ck.c0_h = bh.certified_c0;
    if (!(bh.certified_c0 < std::ldexp(1.0, -(n + 1))))
        throw std::runtime_error("(a1) failed: certified d_C0(h, Id) too large");
    ck.c0_sum = state.c0_sum + bh.certified_c0;
    if (!(ck.c0_sum < 1.0 - std::ldexp(1.0, -(n + 1))))
        throw std::runtime_error("(a1) failed: certified C0 sum too large");

    AreaPreservingMap H1 = state.H.after(bh.h);
    const double C1H1 = H1.lip_bound();
    const double dlipH1 = H1.dlip_bound();
    const double lipInv = H1.inverse().lip_bound();
    if (!std::isfinite(C1H1) || !std::isfinite(dlipH1) || !std::isfinite(lipInv))
        throw BudgetExceeded(
            "stage budget exceeded: certified derivative bounds of H_" +
            std::to_string(n + 1) + " are not representable in double precision");

    // (a2): marker conservation and separation through the new conjugacy.
    Vec2 Hx = eval_exact(H1, bh.x_prime), Hy = eval_exact(H1, bh.y_prime);
    Vec2 Hx0 = eval_exact(state.H, state.x_marker);
    Vec2 Hy0 = eval_exact(state.H, state.y_marker);
    if (torus_dist(Hx, Hx0) > 1e-9 || torus_dist(Hy, Hy0) > 1e-9)
        throw std::runtime_error("marker conservation violated");
    ck.marker_distance = torus_dist(bh.x_prime.to_vec2(), bh.y_prime.to_vec2());
    if (!(ck.marker_distance < std::pow(10.0, -2 * (n + 1))))
        throw std::runtime_error("(a2) failed: new marker distance too large");
    ck.separation = torus_dist(Hx, Hy);
    const double margin = ck.separation - 1e-3;
    if (!(margin > 0.0))
        throw std::runtime_error("kappa collapsed: separation margin " +
                                 std::to_string(margin));
    const double kappa = std::min(margin, std::ldexp(1.0, -(n + 1))) / (2.0 * C1H1);
    if (!(kappa > 1e-300))
        throw std::runtime_error("kappa collapsed: continuity radius underflow "
                                 "(separation margin " +
                                 std::to_string(margin) + ")");
    ck.kappa = kappa;

    // v policy: smallest odd integer above 100 max(1/kappa, n+1); also above
    // 2 q_n so the witness index below is nondegenerate.
    BigInt v = floor_rat(rat_from_double(100.0 * std::max(1.0 / kappa, double(n + 1)))) + 1;
    if (v < 2 * state.q + 1) v = 2 * state.q + 1;
    if (v % 2 == 0) ++v;

    // Probes: push the markers half a cell to the right through H_{n+1}.
    const RatVec2 e{BigRat(1, 2 * state.q), BigRat(0)};
    RatVec2 xps = frac(bh.x_prime + e), yps = frac(bh.y_prime + e);
    Vec2 xp = eval_exact(H1, xps), yp = eval_exact(H1, yps);
    ck.probe_distance = torus_dist(xp, yp);
    if (!(ck.probe_distance < std::ldexp(1.0, -(n + 1))))
        throw std::runtime_error("(a3) failed: probe pair not close enough");

    // Witness shift gamma (independent of r): j/v = -1/(2 q_n) + gamma1 mod 1.
    const BigInt j0 = round_rat(-BigRat(v, 2 * state.q));
    const BigInt j = ((j0 % v) + v) % v;
    if (j == 0) throw std::runtime_error("kappa collapsed: degenerate witness index");
    const BigRat gamma1 = BigRat(j0, v) + BigRat(1, 2 * state.q);
    if (!(abs_rat(gamma1) < rat_from_double(kappa)))
        throw std::runtime_error("(a3) failed: witness shift exceeds kappa");
    ck.gamma_norm = std::abs(to_double(gamma1));
    Vec2 gx = eval_exact(H1, frac(RatVec2{bh.x_prime.x + gamma1, bh.x_prime.y}));
    Vec2 gy = eval_exact(H1, frac(RatVec2{bh.y_prime.x + gamma1, bh.y_prime.y}));
    ck.witness_separation = torus_dist(gx, gy);
    if (!(ck.witness_separation > 1e-3))
        throw std::runtime_error("(a3) failed: separation witness below 1/1000");

    // r-search: r = 2 q_n v t with t odd, doubled (2t+1) until all checks pass.
    const double thr_beta = std::ldexp(1.0, -n) * state.epsilon;
    const double thr_close = std::ldexp(1.0, -(n + 1)) * state.epsilon;
    const double thr_density_log = -(n + 1) * std::log(2.0);
    ck.beta_threshold = thr_beta;
    ck.closeness_threshold = thr_close;
    ck.density_threshold = std::ldexp(1.0, -(n + 1));

    BigInt r_floor = (floor_rat(rat_from_double(100.0 * (n + 1) * (n + 1) / kappa)) + 1) * v;
    if (params.r_start > r_floor) r_floor = params.r_start;
    BigInt t = (r_floor + 2 * state.q * v - 1) / (2 * state.q * v);
    if (t < 1) t = 1;
    if (t % 2 == 0) ++t;

    const BigInt vsq1 = 1 + v * v;
    bool accepted = false;
    BigInt r, q1;
    RatVec2 omega1;
    double log_beta = 0.0, log_density = 0.0;
    std::string last_fail = "none";
    for (int iter = 0; iter < params.r_iteration_cap; ++iter, t = 2 * t + 1) {
        ++ck.r_iterations;
        r = 2 * state.q * v * t;
        q1 = state.q * r;
        log_beta = 0.5 * log_big(vsq1) - log_big(q1);
        if (!(log_beta < std::log(thr_beta))) {
            last_fail = "beta";
            continue;
        }
        if (!(std::log(C1H1) + log_beta < std::log(thr_close))) {
            last_fail = "c0 closeness";
            continue;
        }
        if (dlipH1 > 0.0 &&
            !(std::log(dlipH1) + log_beta + std::log(lipInv) < std::log(thr_close))) {
            last_fail = "c1 closeness";
            continue;
        }
        omega1 = {state.omega.x + BigRat(1, q1), state.omega.y + BigRat(v, q1)};
        check_a4(omega1, n + 1, &ck.a4_pass, &ck.a4_count);
        if (!ck.a4_pass) {
            last_fail = "a4";
            continue;
        }
        log_density = std::log(C1H1) + log_covering_radius(LatVec{1, v}, LatVec{0, r}, r);
        if (!(log_density < thr_density_log)) {
            last_fail = "a5 density";
            continue;
        }
        accepted = true;
        break;
    }
    if (!accepted)
        throw std::runtime_error("r search exceeded cap: last failing check '" + last_fail +
                                 "' after " + std::to_string(ck.r_iterations) +
                                 " doublings (stage " + std::to_string(n + 1) + ")");

    ck.beta_norm = std::exp(log_beta);
    ck.c0_closeness = std::exp(std::log(C1H1) + log_beta);
    ck.c1_closeness =
        dlipH1 > 0.0 ? std::exp(std::log(dlipH1) + log_beta + std::log(lipInv)) : 0.0;
    ck.density_bound = std::exp(log_density);

    // Witness exponent: m = k q_n with k = (r/v) j, so that
    // m omega_{n+1} = (-1/(2 q_n) + gamma1, 0) mod Z^2 -- verified exactly.
    const BigInt m = 2 * state.q * state.q * t * j;
    if (frac_rat(BigRat(m) * omega1.x) != frac_rat(gamma1 - BigRat(1, 2 * state.q)) ||
        frac_rat(BigRat(m) * omega1.y) != 0)
        throw std::logic_error("witness exponent identity failed");

    const double eps1 =
        0.5 * std::min({thr_beta - ck.beta_norm, thr_close - ck.c0_closeness,
                        thr_close - ck.c1_closeness,
                        ck.density_threshold - ck.density_bound});
    if (!(eps1 > 0.0)) throw std::runtime_error("stage margin collapsed");
    ck.epsilon = eps1;
    ck.m_string = m.str();
    ck.v_string = v.str();
    ck.r_string = r.str();
    ck.q_string = q1.str();

    StageState out;
    out.n = n + 1;
    out.h = state.h;
    out.h.push_back(bh.h);
    out.H = std::move(H1);
    out.omega = omega1;
    out.q = q1;
    out.x_marker = bh.x_prime;
    out.y_marker = bh.y_prime;
    out.x_probe_seed = xps;
    out.y_probe_seed = yps;
    out.x_probe = {xp.x - std::floor(xp.x), xp.y - std::floor(xp.y)};
    out.y_probe = {yp.x - std::floor(yp.x), yp.y - std::floor(yp.y)};
    out.m_exponent = m;
    out.gamma1 = gamma1;
    out.epsilon = eps1;
    out.tau = std::min(torus_dist_rat(bh.offset.x * q1), torus_dist_rat(bh.offset.y * q1)) /
              BigRat(q1);
    out.kappa = kappa;
    out.v = v;
    out.r = r;
    out.c0_sum = ck.c0_sum;
    out.c0_last = bh.certified_c0;
    validate_stage(out);
    if (checks) *checks = ck;
    return out;
}

AreaPreservingMap stage_map(const StageState& state) {
    return conjugate(AreaPreservingMap::translation(state.omega), state.H);
}

namespace {

StageChecks stage1_checks(const StageState& st) {
    StageChecks ck;
    ck.n = 1;
    ck.c0_h = 0.0;
    ck.c0_sum = 0.0;
    ck.marker_distance = torus_dist(st.x_marker.to_vec2(), st.y_marker.to_vec2());
    ck.separation = ck.marker_distance; // H_1 = Id
    ck.probe_distance = ck.marker_distance;
    ck.witness_separation = ck.marker_distance; // f_1 is a rigid translation
    check_a4(st.omega, 1, &ck.a4_pass, &ck.a4_count);
    ck.density_bound =
        std::exp(log_covering_radius(LatVec{1, 10}, LatVec{0, 100}, BigInt(100)));
    ck.density_threshold = 0.5;
    ck.epsilon = st.epsilon;
    ck.m_string = st.m_exponent.str();
    ck.v_string = "0";
    ck.r_string = "0";
    ck.q_string = st.q.str();
    return ck;
}

} // namespace

CounterexampleResult counterexample(int stages, const ConstructionParams& params) {
    if (stages < 1) throw std::invalid_argument("stages must be >= 1");
    StageState st = initial_stage();
    std::vector<StageChecks> checks{stage1_checks(st)};
    std::vector<BigInt> q_history{st.q};
    for (int k = 2; k <= stages; ++k) {
        StageChecks ck;
        st = advance_stage(st, params, &ck);
        checks.push_back(ck);
        q_history.push_back(st.q);
    }
    const StageChecks& fin = checks.back();
    const int N = st.n;

    AreaPreservingMap f = stage_map(st);

    // Measured bounded-mean-motion constant of f_N.
    auto dev = deviation_series(f, st.omega.to_vec2(), 6, 50, std::nullopt, params.seed);

    // Exact periodicity: q_N omega_N in Z^2, so f^{q_N} = H H^{-1} on the torus.
    bool q_omega_integral = denominator(BigRat(st.omega.x * st.q)) == 1 &&
                            denominator(BigRat(st.omega.y * st.q)) == 1;
    AreaPreservingMap roundtrip = st.H.after(st.H.inverse());
    double periodicity_defect = 0.0;
    const int G = std::max(2, params.grid_resolution);
    for (int i = 0; i < G; ++i)
        for (int jj = 0; jj < G; ++jj) {
            RatVec2 p{BigRat(i, G), BigRat(jj, G)};
            HybridPoint hp = roundtrip.evaluate_lift(HybridPoint::exact(p));
            BigRat ex = torus_dist_rat(BigRat(hp.bx + rat_from_double(hp.dx) - p.x));
            BigRat ey = torus_dist_rat(BigRat(hp.by + rat_from_double(hp.dy) - p.y));
            periodicity_defect = std::max(
                periodicity_defect, std::sqrt(to_double(BigRat(ex * ex + ey * ey))));
        }

    json rep;
    rep["stages"] = N;
    rep["omega"] = {{"x", to_string(st.omega.x)}, {"y", to_string(st.omega.y)}};
    rep["q"] = st.q.str();

    json conds;
    std::vector<double> c0s;
    for (const auto& c : checks) c0s.push_back(c.c0_h);
    bool a1p = fin.c0_sum < 1.0 - std::ldexp(1.0, -N);
    conds["a1"] = {{"per_stage_certified_c0", c0s},
                   {"sum", fin.c0_sum},
                   {"threshold", 1.0 - std::ldexp(1.0, -N)},
                   {"pass", a1p}};
    bool a2p = fin.marker_distance < std::pow(10.0, -2 * N) && fin.separation > 1e-3;
    conds["a2"] = {{"marker_distance", fin.marker_distance},
                   {"marker_threshold", std::pow(10.0, -2 * N)},
                   {"separation", fin.separation},
                   {"separation_threshold", 1e-3},
                   {"pass", a2p}};
    bool a3p = fin.probe_distance < std::ldexp(1.0, -N) && fin.witness_separation > 1e-3;
    conds["a3"] = {{"probe_distance", fin.probe_distance},
                   {"probe_threshold", std::ldexp(1.0, -N)},
                   {"m", fin.m_string},
                   {"gamma_norm", fin.gamma_norm},
                   {"witness_separation", fin.witness_separation},
                   {"separation_threshold", 1e-3},
                   {"pass", a3p}};
    conds["a4"] = {{"range", N},
                   {"count", fin.a4_count},
                   {"note", "exact rational arithmetic, zero tolerance"},
                   {"pass", fin.a4_pass}};
    bool a5p = fin.density_bound < std::ldexp(1.0, -N);
    conds["a5"] = {{"density_bound", fin.density_bound},
                   {"threshold", std::ldexp(1.0, -N)},
                   {"pass", a5p}};
    if (N == 1) {
        conds["a6"] = {{"note", "no predecessor stage"}, {"pass", true}};
    } else {
        bool a6p = fin.c0_closeness < fin.closeness_threshold &&
                   fin.c1_closeness < fin.closeness_threshold;
        conds["a6"] = {{"c0_closeness", fin.c0_closeness},
                       {"c1_closeness", fin.c1_closeness},
                       {"threshold", fin.closeness_threshold},
                       {"note", "c0/c1 closeness (C0/C1 relaxation)"},
                       {"pass", a6p}};
    }
    rep["conditions"] = conds;

    bool bmm_pass = dev.kappa_hat < 10.0;
    rep["bmm"] = {{"kappa_hat", dev.kappa_hat}, {"threshold", 10.0}, {"pass", bmm_pass}};
    bool per_pass = q_omega_integral && periodicity_defect <= 1e-9;
    rep["periodicity"] = {{"q_omega_integral", q_omega_integral},
                          {"max_defect", periodicity_defect},
                          {"threshold", 1e-9},
                          {"pass", per_pass}};

    // Partial super-Liouville witness: score n^-1 ln ||n omega_N|| at n = q_k.
    json scores = json::array();
    for (std::size_t k = 0; k + 1 < q_history.size(); ++k) {
        BigRat cx = torus_dist_rat(BigRat(q_history[k]) * st.omega.x);
        BigRat cy = torus_dist_rat(BigRat(q_history[k]) * st.omega.y);
        BigRat nsq = cx * cx + cy * cy;
        if (nsq == 0) continue;
        double score = 0.5 * log_big(nsq) / to_double(q_history[k]);
        scores.push_back({{"n", q_history[k].str()}, {"score", score}});
    }
    rep["liouville_partial_witness"] = scores;

    CounterexampleResult out;
    out.all_pass = a1p && a2p && a3p && fin.a4_pass && a5p && bmm_pass && per_pass &&
                   (N == 1 || (fin.c0_closeness < fin.closeness_threshold &&
                               fin.c1_closeness < fin.closeness_threshold));
    rep["all_pass"] = out.all_pass;
    out.f = std::move(f);
    out.state = std::move(st);
    out.report = rep.dump(2) + "\n";
    return out;
}

namespace {

json ratvec_json(const RatVec2& p) {
    return {{"x", to_string(p.x)}, {"y", to_string(p.y)}};
}

RatVec2 ratvec_from_json(const json& j) {
    return {rat_from_string(j.at("x").get<std::string>()),
            rat_from_string(j.at("y").get<std::string>())};
}

} // namespace

std::string serialize_stage(const StageState& st) {
    json j;
    j["schema"] = 1;
    j["n"] = st.n;
    j["omega"] = ratvec_json(st.omega);
    j["q"] = st.q.str();
    j["x_marker"] = ratvec_json(st.x_marker);
    j["y_marker"] = ratvec_json(st.y_marker);
    j["x_probe_seed"] = ratvec_json(st.x_probe_seed);
    j["y_probe_seed"] = ratvec_json(st.y_probe_seed);
    j["m"] = st.m_exponent.str();
    j["gamma1"] = to_string(st.gamma1);
    j["epsilon"] = st.epsilon;
    j["tau"] = to_string(st.tau);
    j["kappa"] = st.kappa;
    j["v"] = st.v.str();
    j["r"] = st.r.str();
    j["c0_sum"] = st.c0_sum;
    j["c0_last"] = st.c0_last;
    json hs = json::array();
    for (const auto& h : st.h) hs.push_back(json::parse(serialize(h)));
    j["h"] = hs;
    return j.dump(2) + "\n";
}

StageState deserialize_stage(const std::string& text) {
    json j = json::parse(text);
    StageState st;
    st.n = j.at("n").get<int>();
    st.omega = ratvec_from_json(j.at("omega"));
    st.q = BigInt(j.at("q").get<std::string>());
    st.x_marker = ratvec_from_json(j.at("x_marker"));
    st.y_marker = ratvec_from_json(j.at("y_marker"));
    st.x_probe_seed = ratvec_from_json(j.at("x_probe_seed"));
    st.y_probe_seed = ratvec_from_json(j.at("y_probe_seed"));
    st.m_exponent = BigInt(j.at("m").get<std::string>());
    st.gamma1 = rat_from_string(j.at("gamma1").get<std::string>());
    st.epsilon = j.at("epsilon").get<double>();
    st.tau = rat_from_string(j.at("tau").get<std::string>());
    st.kappa = j.at("kappa").get<double>();
    st.v = BigInt(j.at("v").get<std::string>());
    st.r = BigInt(j.at("r").get<std::string>());
    st.c0_sum = j.at("c0_sum").get<double>();
    st.c0_last = j.at("c0_last").get<double>();
    st.H = AreaPreservingMap::identity();
    for (const auto& hj : j.at("h")) {
        AreaPreservingMap h = deserialize(hj.dump());
        st.h.push_back(h);
        st.H = st.H.after(h);
    }
    st.x_probe = eval_exact(st.H, st.x_probe_seed);
    st.y_probe = eval_exact(st.H, st.y_probe_seed);
    st.x_probe = {st.x_probe.x - std::floor(st.x_probe.x),
                  st.x_probe.y - std::floor(st.x_probe.y)};
    st.y_probe = {st.y_probe.x - std::floor(st.y_probe.x),
                  st.y_probe.y - std::floor(st.y_probe.y)};
    validate_stage(st);
    return st;
}

} // namespace pseudorot

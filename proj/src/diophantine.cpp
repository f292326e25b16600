#include "pseudorot/diophantine.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

namespace pseudorot {

namespace {

double signed_frac(double x) { return x - std::nearbyint(x); }

// ln |value| of an exact frequency, safe against double underflow for rationals.
double log_abs(const Frequency& f) {
    if (f.is_rational_exact()) {
        BigRat r = f.rat_part();
        if (r == 0) throw std::domain_error("log of zero frequency");
        return log_big(r < 0 ? BigRat(-r) : r);
    }
    double v = std::abs(f.value());
    if (v == 0.0) throw std::domain_error("log of zero frequency");
    return std::log(v);
}

struct ConvergentState {
    std::vector<BigInt> quotients;
    std::vector<BigInt> q{1}, p{0};

    void push(const BigInt& a) {
        quotients.push_back(a);
        std::size_t n = quotients.size();
        BigInt q_prev = n >= 2 ? q[n - 1] : BigInt(1);
        BigInt q_pp = n >= 2 ? q[n - 2] : BigInt(0);
        BigInt p_prev = n >= 2 ? p[n - 1] : BigInt(0);
        BigInt p_pp = n >= 2 ? p[n - 2] : BigInt(1);
        if (n == 1) {
            q.push_back(a);
            p.push_back(1);
        } else {
            q.push_back(a * q_prev + q_pp);
            p.push_back(a * p_prev + p_pp);
        }
    }
};

void dedupe_increasing(BestApproxSequence& s) {
    std::vector<BigInt> q2, p2;
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        if (!q2.empty() && s.q[i] == q2.back()) {
            p2.back() = s.p[i]; // keep the better approximation
        } else {
            q2.push_back(s.q[i]);
            p2.push_back(s.p[i]);
        }
    }
    s.q = std::move(q2);
    s.p = std::move(p2);
}

} // namespace

double torus_norm(double alpha) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("torus_norm: non-finite input");
    return std::abs(signed_frac(alpha));
}

double torus_norm2(Vec2 omega) {
    double rx = signed_frac(omega.x), ry = signed_frac(omega.y);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            best = std::min(best, std::hypot(rx - i, ry - j));
    return best;
}

double torus_norm2(const Vector2& omega) { return torus_norm2(omega.v); }

BigRat torus_norm2_sq_exact(const RatVec2& omega) {
    BigRat dx = torus_dist_rat(omega.x), dy = torus_dist_rat(omega.y);
    return dx * dx + dy * dy;
}

BestApproxSequence continued_fraction(const Frequency& alpha, int max_terms, int q_cap_bits) {
    if (max_terms < 1) throw std::invalid_argument("continued_fraction: max_terms must be >= 1");
    BestApproxSequence out;
    out.alpha = alpha;
    ConvergentState st;

    auto over_cap = [&](const BigInt& q) {
        return q > 0 && static_cast<int>(msb(q)) >= q_cap_bits;
    };

    if (alpha.is_rational_exact()) {
        // Euclid on the fractional part num/den.
        BigRat f = frac_rat(alpha.rat_part());
        BigInt num = numerator(f), den = denominator(f);
        out.terminated = true;
        for (int i = 0; i < max_terms; ++i) {
            if (num == 0) break;
            BigInt a = den / num;
            st.push(a);
            if (over_cap(st.q.back())) break;
            BigInt r = den % num;
            den = num;
            num = r;
            if (num == 0) break;
            if (i + 1 == max_terms) out.terminated = false;
        }
    } else if (alpha.has_exact()) {
        // Quadratic irrational in the normal form (P + sqrt(D)) / Q with
        // Q | D - P^2; sizes stay bounded along the expansion.
        BigInt v = denominator(alpha.rat_part()), t = denominator(alpha.surd_coeff());
        BigInt m = lcm(v, t);
        BigInt A = numerator(alpha.rat_part()) * (m / v);
        BigInt B = numerator(alpha.surd_coeff()) * (m / t);
        BigInt C = m;
        if (B < 0) { A = -A; C = -C; B = -B; }
        BigInt P = A, Q = C, D = B * B * alpha.surd_base();
        if ((D - P * P) % Q != 0) {
            BigInt aq = abs(Q);
            P *= aq;
            D *= aq * aq;
            Q *= aq;
        }
        BigInt r = isqrt_floor(D);
        // floor((N + sqrt(D))/Q); exact since sqrt(D) is irrational here.
        auto floor_surd = [&r](const BigInt& N, const BigInt& Q_) {
            if (Q_ > 0) return floor_div(N + r, Q_);
            return -floor_div(N + r, -Q_) - 1;
        };
        // Discard the integer part first.
        BigInt a0 = floor_surd(P, Q);
        P -= a0 * Q;
        for (int i = 0; i < max_terms; ++i) {
            // Reciprocal of (P + sqrt(D))/Q is (-P + sqrt(D))/Q2, Q2 = (D - P^2)/Q.
            BigInt Q2 = (D - P * P) / Q;
            BigInt a = floor_surd(-P, Q2);
            st.push(a);
            if (over_cap(st.q.back())) break;
            P = -P - a * Q2;
            Q = Q2;
        }
    } else {
        double x = alpha.value() - std::floor(alpha.value());
        for (int i = 0; i < max_terms; ++i) {
            double q_d = to_double(st.q.back());
            if (x < 1e-12 * q_d * q_d || x <= 0.0) {
                out.precision_exhausted = true;
                break;
            }
            double y = 1.0 / x;
            double a_d = std::floor(y);
            if (a_d > 9e15) {
                out.precision_exhausted = true;
                break;
            }
            st.push(BigInt(static_cast<long long>(a_d)));
            if (over_cap(st.q.back())) break;
            x = y - a_d;
        }
    }

    out.partial_quotients = st.quotients;
    out.q = st.q;
    out.p = st.p;
    if (!out.terminated && !out.precision_exhausted && out.q.size() >= 2) {
        // The final convergent only certifies the DBRA bound of its
        // predecessor; it is not itself a listed best approximation.
        out.q.pop_back();
        out.p.pop_back();
    }
    dedupe_increasing(out);
    return out;
}

double log_torus_norm(const Frequency& alpha, const BigInt& n) {
    if (alpha.has_exact()) {
        Frequency f = alpha.scaled(BigRat(n)).torus_fold();
        if (f.is_zero()) return -std::numeric_limits<double>::infinity();
        return log_abs(f);
    }
    double t = torus_norm(to_double(n) * alpha.value());
    if (t == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(t);
}

std::vector<std::pair<std::int64_t, double>>
super_liouville_score(const Vector2& omega, std::int64_t n_max, double holder_a) {
    if (n_max < 1) throw std::invalid_argument("super_liouville_score: n_max must be >= 1");
    if (!(holder_a > 0.0 && holder_a <= 1.0))
        throw std::invalid_argument("super_liouville_score: holder_a must be in (0, 1]");
    std::vector<std::pair<std::int64_t, double>> scores;
    scores.reserve(static_cast<std::size_t>(n_max));
    const double ln_a = std::log(holder_a);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        double ln_norm;
        if (omega.has_exact()) {
            Frequency fx = omega.exact->first.scaled(BigRat(n)).torus_fold();
            Frequency fy = omega.exact->second.scaled(BigRat(n)).torus_fold();
            bool zx = fx.is_zero(), zy = fy.is_zero();
            if (zx && zy)
                throw std::domain_error("rational direction: ||n omega|| = 0 at n = " +
                                        std::to_string(n));
            if (zx) ln_norm = log_abs(fy);
            else if (zy) ln_norm = log_abs(fx);
            else {
                double lx = log_abs(fx), ly = log_abs(fy);
                double hi = std::max(lx, ly), lo = std::min(lx, ly);
                ln_norm = hi + 0.5 * std::log1p(std::exp(2.0 * (lo - hi)));
            }
        } else {
            double t = torus_norm2(omega.v * double(n));
            if (t < 1e-15)
                throw std::domain_error("rational direction: ||n omega|| = 0 at n = " +
                                        std::to_string(n));
            ln_norm = std::log(t);
        }
        double score = std::exp(double(n) * ln_a) * ln_norm / double(n);
        scores.emplace_back(n, score);
    }
    return scores;
}

GrowthSpec GrowthSpec::parse(const std::string& s, const BigInt& q1) {
    GrowthSpec g;
    g.q1 = q1;
    g.description = s;
    if (s == "q+1") {
        g.next = [](const BigInt& q) { return q + 1; };
    } else if (s == "2q") {
        g.next = [](const BigInt& q) { return 2 * q; };
    } else if (s == "2^q") {
        g.next = [](const BigInt& q) {
            if (q > 200000) throw std::overflow_error("big-integer cap exceeded");
            return BigInt(1) << static_cast<unsigned>(q);
        };
    } else if (s == "q^q") {
        g.next = [](const BigInt& q) {
            if (q > 4096) throw std::overflow_error("big-integer cap exceeded");
            return pow(q, static_cast<unsigned>(q));
        };
    } else {
        throw std::invalid_argument("unknown growth spec: " + s);
    }
    return g;
}

Vector2 build_liouville_vector(const GrowthSpec& growth, int stages, int q_cap_bits) {
    if (stages < 1) throw std::invalid_argument("at least one stage required");
    if (growth.q1 < 2) throw std::invalid_argument("initial denominator must be >= 2");

    ConvergentState st;
    st.push(growth.q1); // q_1 = a_1
    std::vector<BigInt> stage_q{growth.q1};
    for (int j = 0; j < stages; ++j) {
        const BigInt& qj = st.q.back();
        const BigInt& qjm = st.q[st.q.size() - 2];
        BigInt target = growth.next(qj);
        if (target <= qj) throw std::invalid_argument("growth not strictly increasing");
        if (static_cast<int>(msb(target)) >= q_cap_bits)
            throw std::overflow_error("big-integer cap exceeded");
        BigInt a = (target - qjm + qj - 1) / qj; // ceil
        if (a < 1) a = 1;
        st.push(a);
        stage_q.push_back(st.q.back());
    }

    const BigInt& qL = st.q.back();
    const BigInt& pL = st.p.back();
    double tail = std::exp(-2.0 * log_big(qL));
    if (tail == 0.0) tail = DBL_MIN;
    Frequency alpha = Frequency::liouville_partial(BigRat(pL, qL), tail, stage_q);
    return Vector2::exact_pair(alpha, Frequency::rational(BigRat(0)));
}

Mat2i sl2z_complete(std::int64_t c, std::int64_t d) {
    if (std::gcd(c, d) != 1) throw std::invalid_argument("not coprime");
    // Extended Euclid for a*d - b*c = 1.
    std::int64_t old_r = d, r = c, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        std::int64_t quo = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - quo * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - quo * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - quo * t);
    }
    // old_s*d + old_t*c = old_r = +-1
    std::int64_t a0 = old_s, b0 = -old_t;
    if (old_r < 0) { a0 = -a0; b0 = -b0; }
    // Minimize max(|a|, |b|) over (a, b) = (a0, b0) + t(c, d).
    double denom = double(c) * c + double(d) * d;
    std::int64_t t0 = std::llround(-(double(a0) * c + double(b0) * d) / denom);
    Mat2i best;
    bool found = false;
    auto better = [](const Mat2i& m1, const Mat2i& m2) {
        auto key = [](const Mat2i& m) {
            return std::make_pair(std::max(std::abs(m.a), std::abs(m.b)),
                                  std::abs(m.a) + std::abs(m.b));
        };
        return key(m1) < key(m2);
    };
    for (std::int64_t dt = -3; dt <= 3; ++dt) {
        Mat2i cand{a0 + (t0 + dt) * c, b0 + (t0 + dt) * d, c, d};
        if (!found || better(cand, best)) {
            best = cand;
            found = true;
        }
    }
    if (best.det() != 1) throw std::logic_error("sl2z_complete: determinant check failed");
    return best;
}

CharacterData character_data(const Vector2& omega, const RationalRelation& rel,
                             std::int64_t ell) {
    if (ell < 1) throw std::invalid_argument("ell must be >= 1");
    if (rel.q <= 0) throw std::invalid_argument("relation q must be positive");
    if (rel.c == 0 && rel.d == 0) throw std::invalid_argument("(c, d) must be nonzero");
    if (std::gcd(rel.c, rel.d) != 1) throw std::invalid_argument("gcd(c, d) must be 1");
    if (rel.p != 0 && std::gcd(rel.p, rel.q) != 1)
        throw std::invalid_argument("gcd(p, q) must be 1");
    if (!omega.has_exact())
        throw std::domain_error("character_data needs an exact vector");
    if (omega.is_rational_vector()) throw std::domain_error("rational vector");

    const Frequency& w1 = omega.exact->first;
    const Frequency& w2 = omega.exact->second;
    Frequency resid = Frequency::linear(BigRat(rel.c), w1, BigRat(rel.d), w2,
                                        BigRat(rel.p, rel.q));
    if (!resid.is_zero()) throw std::domain_error("relation violated");

    CharacterData cd;
    cd.character_vector = {rel.d, -rel.c};
    cd.character_number = rel.q;
    cd.A = sl2z_complete(rel.c, rel.d);
    cd.alpha_prime = Frequency::linear(BigRat(rel.q * cd.A.a), w1,
                                       BigRat(rel.q * cd.A.b), w2, BigRat(0));
    cd.beta = cd.alpha_prime.torus_fold();
    cd.L = ell * rel.q;
    return cd;
}

BrjunoReport brjuno_report(const Frequency& alpha, int budget_terms) {
    if (budget_terms < 2) throw std::invalid_argument("brjuno_report: budget must be >= 2");
    BestApproxSequence seq = continued_fraction(alpha, budget_terms);
    BrjunoReport rep;
    rep.budget = budget_terms;
    // A Liouville partial is an exact truncation of an irrational: its
    // finite expansion still classifies, so it is not flagged as rational.
    rep.terminated_rational =
        seq.terminated && alpha.kind() != Frequency::Kind::LiouvillePartial;

    std::vector<double> incs;
    double sum = 0.0;
    for (std::size_t n = 0; n + 1 < seq.q.size(); ++n) {
        double inc = log_big(seq.q[n + 1]) / to_double(BigRat(seq.q[n]));
        incs.push_back(inc);
        sum += inc;
        rep.partial_sums.push_back(sum);
    }

    if (rep.terminated_rational || incs.empty()) {
        rep.classification = "undecided";
        return rep;
    }
    if (incs.back() > 1.0) {
        rep.classification = "non-brjuno-likely";
    } else if (incs.size() >= 3 &&
               std::all_of(incs.end() - 3, incs.end(),
                           [](double v) { return v < 1e-3; })) {
        rep.classification = "brjuno-likely";
    } else {
        rep.classification = "undecided";
    }
    return rep;
}

SubsequenceSelection non_brjuno_subsequence(const BestApproxSequence& seq, double H) {
    if (seq.q.size() < 2) throw std::invalid_argument("sequence too short for H");
    if (!(H > 1.0)) throw std::invalid_argument("H must be > 1");

    SubsequenceSelection sel;
    const double ln_H = std::log(H);
    std::size_t cur = 0;
    sel.indices.push_back(cur);
    for (;;) {
        double need_log = to_double(BigRat(seq.q[cur])) * ln_H; // ln of H^{q_cur}
        std::size_t next = cur + 1;
        while (next < seq.q.size() && log_big(seq.q[next]) < need_log - 1e-12) ++next;
        if (next >= seq.q.size()) {
            sel.exhausted = true;
            break;
        }
        sel.indices.push_back(next);
        cur = next;
    }
    if (sel.indices.size() < 2) throw std::invalid_argument("sequence too short for H");

    for (std::size_t j = 0; j < sel.indices.size(); ++j) {
        const BigInt& qn = seq.q[sel.indices[j]];
        double lhs_log = log_torus_norm(seq.alpha, qn);
        double rhs_log = -to_double(BigRat(qn)) / (double(j + 1) * double(j + 1));
        sel.certificate.push_back(lhs_log < rhs_log);
    }
    return sel;
}

} // namespace pseudorot

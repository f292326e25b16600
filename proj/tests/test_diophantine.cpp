#include "doctest.h"

#include <cmath>
#include <numeric>

#include "pseudorot/diophantine.hpp"

using namespace pseudorot;

namespace {

Frequency sqrt2_minus_1() { return Frequency::surd(BigRat(-1), BigRat(1), 2); }
Frequency golden_frac() { return Frequency::surd(BigRat(-1, 2), BigRat(1, 2), 5); }

// Exact distance of q*alpha to the nearest integer, as a Frequency.
Frequency fold(const Frequency& alpha, const BigInt& q) {
    return alpha.scaled(BigRat(q)).torus_fold();
}

// Brute-force best-approximation oracle, independent of continued_fraction:
// checks that no 1 <= q < q_limit beats q_n, and the 1/q_{n+1} bound.
void check_dbra(const BestApproxSequence& seq, const BigInt& scan_cap) {
    REQUIRE(seq.q.size() >= 2);
    REQUIRE(seq.q.front() == 1);
    for (std::size_t n = 0; n + 1 < seq.q.size(); ++n) {
        CHECK(seq.q[n] < seq.q[n + 1]);
        if (seq.q[n + 1] > scan_cap) continue;
        Frequency best = fold(seq.alpha, seq.q[n]);
        for (BigInt q = 1; q < seq.q[n + 1]; ++q) {
            Frequency other = fold(seq.alpha, q);
            CHECK((best - other).sign() <= 0);
        }
        // ||q_n alpha|| < 1/q_{n+1}; a terminating rational reaches exact
        // equality at its final step.
        Frequency gap = best.scaled(BigRat(seq.q[n + 1])).shifted(BigRat(-1));
        bool final_exact = seq.terminated && n + 2 == seq.q.size();
        CHECK(gap.sign() <= (final_exact ? 0 : -1));
    }
}

} // namespace

TEST_CASE("torus norms") {
    CHECK(torus_norm(0.0) == 0.0);
    CHECK(torus_norm(0.75) == doctest::Approx(0.25));
    CHECK(torus_norm(-3.1) == doctest::Approx(0.1).epsilon(1e-12));

    CHECK(torus_norm2(Vec2{0, 0}) == 0.0);
    CHECK(torus_norm2(Vec2{0.4, 0.9}) == doctest::Approx(std::sqrt(0.17)).epsilon(1e-12));
    CHECK(torus_norm2(Vec2{0.5, 0.5}) == doctest::Approx(std::sqrt(2.0) / 2));

    // Lattice invariance; dyadic coordinates keep the shifts exact in doubles.
    Vec2 w{0.287109375, 0.94140625};
    for (int i = -3; i <= 3; ++i)
        for (int j = -3; j <= 3; ++j)
            CHECK(torus_norm2(Vec2{w.x + i, w.y + j}) == torus_norm2(w));
}

TEST_CASE("continued fraction of sqrt(2)-1") {
    auto seq = continued_fraction(sqrt2_minus_1(), 5);
    REQUIRE(seq.partial_quotients.size() == 5);
    for (const auto& a : seq.partial_quotients) CHECK(a == 2);
    REQUIRE(seq.q.size() == 5);
    CHECK(seq.q == std::vector<BigInt>{1, 2, 5, 12, 29});
    CHECK(!seq.terminated);
    check_dbra(seq, 100000);
}

TEST_CASE("continued fraction of 1/3 terminates") {
    auto seq = continued_fraction(Frequency::rational(BigRat(1, 3)), 8);
    CHECK(seq.terminated);
    CHECK(seq.partial_quotients == std::vector<BigInt>{3});
    CHECK(seq.q == std::vector<BigInt>{1, 3});
    CHECK(seq.p.back() == 1);
}

TEST_CASE("continued fraction of the golden fractional part") {
    auto seq = continued_fraction(golden_frac(), 8);
    CHECK(seq.q == std::vector<BigInt>{1, 2, 3, 5, 8, 13, 21});
    check_dbra(seq, 100000);
}

TEST_CASE("float input falls back to guarded expansion") {
    auto seq = continued_fraction(Frequency::from_double(M_PI), 30);
    REQUIRE(seq.q.size() >= 4);
    CHECK(seq.partial_quotients[0] == 7);
    CHECK(seq.partial_quotients[1] == 15);
    CHECK(seq.q[1] == 7);
    CHECK(seq.q[2] == 106);
    CHECK(seq.q[3] == 113);
    // Truncation happened through the precision guard, not exhaustion.
    CHECK(seq.precision_exhausted);
}

TEST_CASE("super-liouville score: rational direction error") {
    auto w = Vector2::exact_rational(BigRat(1, 4), BigRat(0));
    CHECK_THROWS_WITH_AS(super_liouville_score(w, 4), doctest::Contains("rational direction"),
                         std::domain_error);
}

TEST_CASE("super-liouville score: badly approximable pair stays bounded") {
    auto w = Vector2::exact_pair(golden_frac(), sqrt2_minus_1());
    auto scores = super_liouville_score(w, 100, 1.0);
    REQUIRE(scores.size() == 100);
    for (auto& [n, s] : scores) {
        CHECK(std::isfinite(s));
        CHECK(s > -1.0);
    }
}

TEST_CASE("build_liouville_vector: polynomial growth is not super-Liouvillean") {
    auto w = build_liouville_vector(GrowthSpec::parse("q+1"), 3);
    REQUIRE(w.has_exact());
    const auto& alpha = w.exact->first;
    CHECK(alpha.kind() == Frequency::Kind::LiouvillePartial);
    // The CF recurrence can only guarantee q_{j+1} >= target.
    CHECK(alpha.stage_denominators() == std::vector<BigInt>{2, 3, 5, 8});
    CHECK(alpha.tail_bound() > 0.0);
    auto scores = super_liouville_score(w, 4, 1.0);
    for (auto& [n, s] : scores) CHECK(s > -3.0);
}

TEST_CASE("build_liouville_vector: exponential growth certificate") {
    auto w = build_liouville_vector(GrowthSpec::parse("2^q"), 3);
    const auto& alpha = w.exact->first;
    auto qs = alpha.stage_denominators();
    REQUIRE(qs.size() == 4);
    BigRat a = alpha.rat_part();
    // ||q_j omega|| <= 2/q_{j+1} for every constructed stage, exactly.
    for (std::size_t j = 0; j + 1 < qs.size(); ++j) {
        BigRat dist = torus_dist_rat(BigRat(qs[j]) * a);
        CHECK(dist * BigRat(qs[j + 1]) <= 2);
    }
    // Spec anchor: ||q_2 omega|| <= 2 * 2^{-q_2}.
    BigRat q2 = BigRat(qs[1]);
    BigRat dist2 = torus_dist_rat(q2 * a);
    BigInt pow2 = BigInt(1) << static_cast<unsigned>(qs[1]);
    CHECK(dist2 * BigRat(pow2) <= 2);
}

TEST_CASE("build_liouville_vector: diverging score witness for q^q growth") {
    auto w = build_liouville_vector(GrowthSpec::parse("q^q"), 3);
    auto qs = w.exact->first.stage_denominators();
    std::int64_t q3 = qs[2].convert_to<std::int64_t>();
    auto scores = super_liouville_score(w, q3, 1.0);
    double at_q3 = scores[static_cast<std::size_t>(q3) - 1].second;
    // True value is -ln(q_4)/q_3 ~= -ln(q_3); the oracle-computed anchor.
    CHECK(at_q3 < -5.0);
    CHECK(at_q3 < -0.9 * std::log(double(q3)));
    CHECK(at_q3 > -1.5 * std::log(double(q3)));
}

TEST_CASE("build_liouville_vector: degenerate stage count") {
    CHECK_THROWS_WITH_AS(build_liouville_vector(GrowthSpec::parse("2^q"), 0),
                         "at least one stage required", std::invalid_argument);
}

TEST_CASE("sl2z_complete") {
    Mat2i id = sl2z_complete(0, 1);
    CHECK(id.is_identity());

    Mat2i m = sl2z_complete(2, 3);
    CHECK(m.a == 1);
    CHECK(m.b == 1);
    CHECK(m.c == 2);
    CHECK(m.d == 3);
    CHECK(m.det() == 1);

    CHECK_THROWS_WITH_AS(sl2z_complete(2, 4), "not coprime", std::invalid_argument);

    // Determinant and bottom row over a spread of coprime pairs.
    for (std::int64_t c = -12; c <= 12; ++c)
        for (std::int64_t d = -12; d <= 12; ++d) {
            if (std::gcd(c, d) != 1) continue;
            Mat2i A = sl2z_complete(c, d);
            CHECK(A.det() == 1);
            CHECK(A.c == c);
            CHECK(A.d == d);
        }
}

TEST_CASE("character_data: (sqrt2-1, 1/2) with relation (0,1,-1,2)") {
    auto w = Vector2::exact_pair(sqrt2_minus_1(), Frequency::rational(BigRat(1, 2)));
    auto cd = character_data(w, RationalRelation{0, 1, -1, 2}, 1);
    CHECK(cd.character_vector == std::make_pair<std::int64_t, std::int64_t>(1, 0));
    CHECK(cd.character_number == 2);
    CHECK(cd.A.is_identity());
    CHECK(cd.alpha_prime.value() == doctest::Approx(2 * std::sqrt(2.0) - 2).epsilon(1e-14));
    // beta = 1 - (2 sqrt 2 - 2) = 3 - 2 sqrt 2, exactly.
    CHECK(cd.beta.rat_part() == 3);
    CHECK(cd.beta.surd_coeff() == -2);
    CHECK(cd.beta.surd_base() == 2);
    CHECK(cd.beta.value() == doctest::Approx(3 - 2 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(cd.L == 2);

    // Well-definedness: (A, v) and (-A, -v) give the same beta.
    Frequency neg = cd.alpha_prime.scaled(BigRat(-1));
    CHECK((neg.torus_fold() - cd.beta).is_zero());
}

TEST_CASE("character_data: relation with both coordinates irrational") {
    auto w2 = sqrt2_minus_1().shifted(BigRat(1, 3));
    auto w = Vector2::exact_pair(sqrt2_minus_1(), w2);
    auto cd = character_data(w, RationalRelation{1, -1, 1, 3}, 2);
    CHECK(cd.character_vector == std::make_pair<std::int64_t, std::int64_t>(-1, -1));
    CHECK(cd.A.det() == 1);
    CHECK(cd.A.c == 1);
    CHECK(cd.A.d == -1);
    CHECK(cd.L == 6);
    CHECK(cd.beta.value() >= 0.0);
    CHECK(cd.beta.value() <= 0.5);
}

TEST_CASE("character_data: error cases") {
    auto rat = Vector2::exact_rational(BigRat(1, 3), BigRat(1, 5));
    CHECK_THROWS_WITH_AS(character_data(rat, RationalRelation{0, 1, -1, 5}, 1),
                         "rational vector", std::domain_error);

    auto w = Vector2::exact_pair(sqrt2_minus_1(), Frequency::rational(BigRat(1, 2)));
    CHECK_THROWS_WITH_AS(character_data(w, RationalRelation{0, 1, -1, 3}, 1),
                         "relation violated", std::domain_error);
}

TEST_CASE("brjuno_report") {
    auto golden = brjuno_report(golden_frac(), 24);
    CHECK(golden.classification == "brjuno-likely");
    for (std::size_t i = 0; i + 1 < golden.partial_sums.size(); ++i)
        CHECK(golden.partial_sums[i] <= golden.partial_sums[i + 1]);

    // Extending the budget preserves the earlier partial sums.
    auto golden2 = brjuno_report(golden_frac(), 30);
    for (std::size_t i = 0; i < golden.partial_sums.size(); ++i)
        CHECK(golden2.partial_sums[i] == doctest::Approx(golden.partial_sums[i]).epsilon(1e-12));

    // q^q growth: increments are ln q_j, above 1 from the start.
    auto lv = build_liouville_vector(GrowthSpec::parse("q^q"), 3);
    auto rep = brjuno_report(lv.exact->first, 6);
    CHECK(rep.classification == "non-brjuno-likely");
    REQUIRE(rep.partial_sums.size() >= 3);

    // 2^q growth keeps increments near ln 2 < 1: heuristically undecidable.
    auto lv2 = build_liouville_vector(GrowthSpec::parse("2^q"), 3);
    auto rep2 = brjuno_report(lv2.exact->first, 6);
    CHECK(rep2.classification == "undecided");

    auto rat = brjuno_report(Frequency::rational(BigRat(1, 3)), 5);
    CHECK(rat.classification == "undecided");
    CHECK(rat.terminated_rational);
}

TEST_CASE("non_brjuno_subsequence") {
    auto lv = build_liouville_vector(GrowthSpec::parse("2^q"), 3);
    auto seq = continued_fraction(lv.exact->first, 40);
    auto sel = non_brjuno_subsequence(seq, 2.0);
    // Every index qualifies for H = 2 under doubling growth.
    CHECK(sel.indices.size() == seq.q.size());
    for (std::size_t j = 1; j < sel.certificate.size(); ++j) CHECK(sel.certificate[j]);

    auto fib = continued_fraction(golden_frac(), 8);
    auto fsel = non_brjuno_subsequence(fib, 2.0);
    REQUIRE(fsel.indices.size() == 3); // q = 1, 2, 5; then 2^5 = 32 > 21
    CHECK(fib.q[fsel.indices[2]] == 5);
    CHECK(fsel.exhausted);

    auto single = continued_fraction(Frequency::rational(BigRat(2)), 3);
    CHECK_THROWS_WITH_AS(non_brjuno_subsequence(single, 2.0),
                         "sequence too short for H", std::invalid_argument);
}

TEST_CASE("dbra oracle over a frequency battery") {
    std::vector<Frequency> battery = {
        sqrt2_minus_1(),
        golden_frac(),
        Frequency::surd(BigRat(0), BigRat(1, 2), 3),
        Frequency::surd(BigRat(1, 7), BigRat(1, 3), 7),
        Frequency::rational(BigRat(355, 113)),
        Frequency::rational(BigRat(22, 7)),
        build_liouville_vector(GrowthSpec::parse("2^q"), 2).exact->first,
        build_liouville_vector(GrowthSpec::parse("q+1"), 4).exact->first,
    };
    for (const auto& f : battery) {
        auto seq = continued_fraction(f, 10);
        if (seq.q.size() >= 2) check_dbra(seq, 20000);
    }
}

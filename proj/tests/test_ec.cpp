#include "siav/ec.hpp"
#include "siav/quadratic.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace siav;
using namespace siav::ec;

TEST_CASE("trace test") {
    CHECK(is_super_isolated_trace(Int(7), Int(5)));      // 25 - 28 = -3
    CHECK_FALSE(is_super_isolated_trace(Int(7), Int(1)));  // -27 non-maximal
    CHECK(is_super_isolated_trace(Int(13), Int(7)));     // 49 - 52 = -3
    CHECK_THROWS(is_super_isolated_trace(Int(7), Int(0)));   // supersingular
    CHECK_THROWS(is_super_isolated_trace(Int(7), Int(14)));  // supersingular
    CHECK_THROWS(is_super_isolated_trace(Int(7), Int(6)));   // Hasse violation
}

TEST_CASE("families match the published table") {
    struct Row { int d; long p0, p1, N0, N1; Int g; };
    // (p, N) coefficient spot checks plus the full gcd column
    auto f3 = family_for(3);
    CHECK(f3.p_poly == std::array<Int, 3>{Int(1), Int(1), Int(1)});
    CHECK(f3.N_poly == std::array<Int, 3>{Int(1), Int(-1), Int(1)});
    auto f8 = family_for(8);
    CHECK(f8.p_poly == std::array<Int, 3>{Int(2), Int(0), Int(1)});
    CHECK(f8.N_poly == std::array<Int, 3>{Int(3), Int(-2), Int(1)});
    auto f163 = family_for(163);
    CHECK(f163.p_poly == std::array<Int, 3>{Int(41), Int(1), Int(1)});
    CHECK(f163.N_poly == std::array<Int, 3>{Int(41), Int(-1), Int(1)});
    CHECK_THROWS(family_for(5));

    std::map<int, long> gcds{{3, 1}, {4, 2}, {8, 6}, {7, 4}, {11, 3},
                             {19, 1}, {43, 1}, {67, 1}, {163, 1}};
    for (auto [d, g] : gcds) CHECK(family_content_gcd(d) == g);

    // N = p + 1 - t with t^2 - 4p = -d, for all families and several x
    for (int d : kAllFamilyDiscs) {
        auto f = family_for(d);
        for (long x = -5; x <= 5; ++x) {
            Int t = f.trace(Int(x));
            CHECK(t * t - 4 * f.eval_p(Int(x)) == -Int(d));
        }
    }
}

TEST_CASE("scalar multiplication basics") {
    WeierstrassCurve c{Int(7), Int(0), Int(4)};
    ECPoint P = ECPoint::affine(Int(0), Int(2));
    REQUIRE(on_curve(c, P));
    CHECK(ec_scalar_mul(c, P, Int(0)).infinity);
    auto P1 = ec_scalar_mul(c, P, Int(1));
    CHECK(P1.x == P.x);
    CHECK(P1.y == P.y);
    // group order 3: [3]Q = infinity for every point
    std::vector<ECPoint> pts;
    for (long x = 0; x < 7; ++x)
        for (long y = 0; y < 7; ++y) {
            ECPoint q = ECPoint::affine(Int(x), Int(y));
            if (on_curve(c, q)) pts.push_back(q);
        }
    CHECK(pts.size() == 2);  // order 3 = 2 affine + infinity
    for (const auto& q : pts) CHECK(ec_scalar_mul(c, q, Int(3)).infinity);
    CHECK_THROWS(ec_scalar_mul(c, ECPoint::affine(Int(1), Int(1)), Int(2)));
}

TEST_CASE("verify_curve_order") {
    WeierstrassCurve c{Int(7), Int(0), Int(4)};
    CHECK(verify_curve_order(c, Int(3), 5));
    CHECK_FALSE(verify_curve_order(c, Int(7), 5));
    CHECK(verify_curve_order(c, Int(3), 0));  // minimum trials enforced at 1
}

TEST_CASE("construct_curve at desk scale") {
    auto c = construct_curve(3, Int(7), Int(3));
    CHECK(c.a4 == 0);
    CHECK(c.a6 == 4);  // smallest valid sextic twist: exhaustive count gives b=4
    // d=19 small admissible prime: p = x^2+x+5 at x=1 -> p=7, N=x^2-x+5=5
    auto c19 = construct_curve(19, Int(7), Int(5));
    long count = 1;
    for (long x = 0; x < 7; ++x)
        for (long y = 0; y < 7; ++y)
            if (on_curve(c19, ECPoint::affine(Int(x), Int(y)))) ++count;
    CHECK(count == 5);
    CHECK_THROWS(construct_curve(3, Int(7), Int(5)));  // inconsistent inputs
}

TEST_CASE("search_curves: tiny x values") {
    std::vector<Int> xs{Int(2), Int(3)};
    size_t idx = 0;
    auto src = [&]() -> std::optional<Int> {
        if (idx >= xs.size()) return std::nullopt;
        return xs[idx++];
    };
    auto recs = search_curves(3, src, 10);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].p == 7);
    CHECK(recs[0].N == 3);
    CHECK(recs[1].p == 13);
    CHECK(recs[1].N == 7);
    for (const auto& r : recs) {
        CHECK(r.t * r.t - 4 * r.p == -3);
        CHECK(verify_curve_order(r.curve, r.N, 8));
    }
    CHECK_THROWS(search_curves(8, src, 1));  // content gcd 6: not searchable
}

TEST_CASE("published 256-bit example") {
    Int x("321438704914423479101766132343967029098");
    auto fam = family_for(3);
    Int p = fam.eval_p(x), N = fam.eval_N(x);
    CHECK(mpz_sizeinbase(p.get_mpz_t(), 2) == 256);
    CHECK(mpz_sizeinbase(N.get_mpz_t(), 2) == 256);
    CHECK(is_prime(p));
    CHECK(is_prime(N));
    auto c = construct_curve(3, p, N);
    CHECK(c.a4 == 0);  // j = 0
    CHECK(verify_curve_order(c, N, 8));
    // sextic-twist equivalence with y^2 = x^3 + 244944: b1/b2 a sixth power
    Int inv, b2(244944);
    REQUIRE(mpz_invert(inv.get_mpz_t(), b2.get_mpz_t(), p.get_mpz_t()));
    Int ratio = c.a6 * inv % p;
    Int e = (p - 1) / 6;
    Int t;
    mpz_powm(t.get_mpz_t(), ratio.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    CHECK(t == 1);
}

TEST_CASE("hamming-weight example") {
    Int x = (Int(1) << 127) + 13906;
    auto fam = family_for(3);
    Int p = fam.eval_p(x), N = fam.eval_N(x);
    CHECK(mpz_sizeinbase(p.get_mpz_t(), 2) == 255);
    CHECK(mpz_sizeinbase(N.get_mpz_t(), 2) == 255);
    CHECK(is_prime(p));
    CHECK(is_prime(N));
    CHECK(mpz_popcount(p.get_mpz_t()) == 24);
    CHECK(mpz_popcount(N.get_mpz_t()) == 27);
}

TEST_CASE("census: exhaustive isogeny classes") {
    auto c7 = isogeny_class_census(7);
    CHECK(c7[5] == 1);
    // internal consistency: totals match a direct class count
    long total = 0;
    for (auto [t, n] : c7) total += n;
    long direct = 0;
    {
        long p = 7;
        std::map<std::pair<long, long>, bool> seen;
        for (long a = 0; a < p; ++a)
            for (long b = 0; b < p; ++b) {
                if ((4 * a * a * a + 27 * b * b) % p == 0) continue;
                // canonical orbit representative under (a,b) ~ (u^4 a, u^6 b)
                std::pair<long, long> best{p, p};
                for (long u = 1; u < p; ++u) {
                    long u2 = u * u % p, u4 = u2 * u2 % p, u6 = u4 * u2 % p;
                    best = std::min(best, {u4 * a % p, u6 * b % p});
                }
                if (!seen[best]) {
                    // ordinary only
                    long pts = 1;
                    for (long x = 0; x < p; ++x) {
                        long rhs = (x * x % p * x + a * x + b) % p;
                        if (rhs == 0) { pts += 1; continue; }
                        long leg = 1;
                        bool is_sq = false;
                        for (long y = 1; y <= p / 2; ++y)
                            if (y * y % p == rhs) { is_sq = true; break; }
                        pts += is_sq ? 2 : 0;
                        (void)leg;
                    }
                    long t = p + 1 - pts;
                    if (t % p != 0) ++direct;
                    seen[best] = true;
                }
            }
        CHECK(total == direct);
    }
    CHECK_THROWS(isogeny_class_census(3));
    CHECK_THROWS(isogeny_class_census(1000));
}

TEST_CASE("census equals Kronecker class numbers (p = 13)") {
    auto c13 = isogeny_class_census(13);
    for (auto [t, n] : c13) {
        long disc = t * t - 52;
        CHECK_MESSAGE(n == quad::kronecker_class_number(disc), "t = ", t);
    }
}

TEST_CASE("bateman-horn constants at reduced cutoff") {
    // unit-scale cutoff; the acceptance suite pins the 10^7 values
    double c3 = bateman_horn_constant(3, 200000);
    CHECK(std::abs(c3 - 2.9) < 0.15);
    double c163 = bateman_horn_constant(163, 200000);
    CHECK(std::abs(c163 - 44.8) < 1.5);
    // omega: exhaustive evaluation vs symbol route across the q = 1000 seam
    auto fam = family_for(43);
    for (long q : {983L, 991L, 997L}) {
        long cnt = 0;
        for (long a = 0; a < q; ++a) {
            Int v = fam.eval_p(Int(a)) * fam.eval_N(Int(a));
            if (mpz_divisible_ui_p(v.get_mpz_t(), q)) ++cnt;
        }
        Int disc_p = fam.p_poly[1] * fam.p_poly[1] - 4 * fam.p_poly[0];
        Int disc_N = fam.N_poly[1] * fam.N_poly[1] - 4 * fam.N_poly[0];
        long via_symbols = 2 + kronecker_symbol(disc_p, Int(q)) + kronecker_symbol(disc_N, Int(q));
        CHECK(cnt == via_symbols);
    }
}

TEST_CASE("expected_curve_count") {
    CHECK(expected_curve_count(4.0, 100000) == 0.0);
    double sum = 0;
    for (int d : kSearchableDiscs) sum += bateman_horn_constant(d, 1000000);
    CHECK(std::abs(sum / 4 - 19.7) < 0.2);
    CHECK_THROWS(expected_curve_count(3.0));
}

TEST_CASE("curve record round trip") {
    std::vector<Int> xs{Int(2)};
    size_t idx = 0;
    auto src = [&]() -> std::optional<Int> {
        if (idx >= xs.size()) return std::nullopt;
        return xs[idx++];
    };
    auto recs = search_curves(3, src, 1);
    REQUIRE(recs.size() == 1);
    std::ostringstream os;
    write_record(os, recs[0]);
    auto back = parse_curve_record(os.str());
    CHECK(back.d == recs[0].d);
    CHECK(back.x == recs[0].x);
    CHECK(back.p == recs[0].p);
    CHECK(back.N == recs[0].N);
    CHECK(back.t == recs[0].t);
    CHECK(back.curve.a4 == recs[0].curve.a4);
    CHECK(back.curve.a6 == recs[0].curve.a6);
    std::ostringstream os2;
    write_record(os2, back);
    CHECK(os.str() == os2.str());
}

TEST_CASE("seeded stream determinism") {
    auto s1 = seeded_x_stream(42, 96);
    auto s2 = seeded_x_stream(42, 96);
    for (int i = 0; i < 5; ++i) {
        auto a = s1(), b = s2();
        REQUIRE(a.has_value());
        CHECK(*a == *b);
        CHECK(mpz_sizeinbase(a->get_mpz_t(), 2) <= 96);
    }
}

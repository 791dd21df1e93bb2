#include "siav/cm_field.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace siav;
using namespace siav::cm;

namespace {

std::vector<CMFieldData>& registry() {
    static std::vector<CMFieldData> reg = load_field_registry_file(default_registry_path());
    return reg;
}

const CMFieldData& field_by_id(const std::string& id) {
    for (const auto& f : registry())
        if (f.id == id) return f;
    REQUIRE_MESSAGE(false, "field not in registry: ", id);
    throw std::logic_error("unreachable");
}

QuarticElement elt(const CMFieldData& f, long a1, long a2, long a3, long a4) {
    QuarticElement e;
    e.field = &f;
    e.coords = {Rat(a1), Rat(a2), Rat(a3), Rat(a4)};
    return e;
}

// 128-bit float embeddings for the numeric cross-check
struct F128 {
    mpf_class re, im;
    F128() : re(0, 192), im(0, 192) {}
};

F128 embed(const CMFieldData& fld, const KPair& x, int which, const mpf_class& sqrt_df,
           const mpf_class& s_eta) {
    auto phiF = [&](const quad::RealQuadElement& r) {
        mpf_class u(0, 192), v(0, 192);
        mpf_set_q(u.get_mpf_t(), Rat(r.u()).get_mpq_t());
        mpf_set_q(v.get_mpf_t(), Rat(r.v()).get_mpq_t());
        return which == 1 ? mpf_class(u + v * sqrt_df) : mpf_class(u - v * sqrt_df);
    };
    F128 out;
    out.re = phiF(x.a);
    out.im = phiF(x.b) * s_eta;  // eta maps to +i * sqrt(|phi(beta)|)
    return out;
}

}  // namespace

TEST_CASE("registry loads and validates") {
    auto& reg = registry();
    CHECK(reg.size() >= 1);
    const auto& z5 = field_by_id("zeta5");
    CHECK(z5.delta_f == 5);
    CHECK(z5.delta_k == 125);
    CHECK(z5.class_number == 1);
}

TEST_CASE("registry rejects corrupted records") {
    // serialize zeta5 with delta_k off by one: the discriminant check must name it
    std::ostringstream rec;
    rec << "field broken\n"
        << "eta_poly 5 0 5 0 1\n"
        << "delta_k 126\n"
        << "delta_f 5\n"
        << "beta -5/2 -1/2\n"
        << "alpha1 1/1 0/1 0/1 0/1\n"
        << "alpha2 5/2 1/2 0/1 0/1\n"
        << "alpha3 -3/4 5/4 -1/4 1/4\n"
        << "alpha4 -1/1 -1/2 -7/4 5/4\n"
        << "class_number 1\nend\n";
    std::istringstream in(rec.str());
    try {
        load_field_registry(in);
        FAIL("expected RegistryError");
    } catch (const RegistryError& e) {
        CHECK(std::string(e.what()).find("discriminant") != std::string::npos);
    }
    // beta not totally negative
    std::istringstream in2(
        "field bad2\neta_poly 5 0 5 0 1\ndelta_k 125\ndelta_f 5\nbeta 5/2 1/2\n"
        "alpha1 1/1 0/1 0/1 0/1\nalpha2 5/2 1/2 0/1 0/1\n"
        "alpha3 -3/4 5/4 -1/4 1/4\nalpha4 -1/1 -1/2 -7/4 5/4\nclass_number 1\nend\n");
    CHECK_THROWS_AS(load_field_registry(in2), RegistryError);
}

TEST_CASE("worked-example search polynomials, exact") {
    const auto& z5 = field_by_id("zeta5");
    auto sp = compute_search_polynomials(z5);
    CHECK(sp.f1 == std::array<Int, 4>{Int(0), Int(2), Int(5), Int(-2)});
    CHECK(sp.f2.a == 1);
    CHECK(sp.f2.b == 9);
    CHECK(sp.f2.c == 19);
    CHECK(sp.f2.disc() == 5);
    // phat coefficient table, exact
    auto want = [&](int i, int j, const Rat& v) { CHECK(sp.phat[i][j] == v); };
    want(0, 0, Rat(1));
    want(0, 1, Rat(5));
    want(1, 1, Rat(15, 2));
    want(0, 2, Rat(-3, 2));
    want(1, 2, Rat(5, 2));
    want(2, 2, Rat(9));
    want(0, 3, Rat(-2));
    want(1, 3, Rat(-15, 2));
    want(2, 3, Rat(3, 2));
    want(3, 3, Rat(37, 2));
    auto want0 = [&](int i, int j, const Rat& v) { CHECK(sp.p0[i][j] == v); };
    want0(0, 0, Rat(0));
    want0(0, 1, Rat(1));
    want0(1, 1, Rat(5, 2));
    want0(0, 2, Rat(5, 2));
    want0(1, 2, Rat(11, 2));
    want0(2, 2, Rat(-2));
    want0(0, 3, Rat(-1));
    want0(1, 3, Rat(-7, 2));
    want0(2, 3, Rat(-7, 2));
    want0(3, 3, Rat(-9, 2));
    // printed solution
    std::array<Rat, 4> xs{Rat(115), Rat(-45), Rat(17), Rat(-3)};
    CHECK(sp.eval_f1(xs) == 1);
    CHECK(sp.eval_f2(xs[2], xs[3]) == 1);
    CHECK(sp.eval_p0(xs) == 0);
    CHECK(sp.eval_phat(xs) == 61);
}

TEST_CASE("search polynomial invariants across the registry") {
    for (const auto& f : registry()) {
        auto sp = compute_search_polynomials(f);  // throws on invariant violation
        CHECK(sp.f2.disc() == f.delta_f);
        CHECK(sp.f1[1] != 0);
        // 2*p0 - f1*x1 free of x1 is asserted inside; g coefficients integer
        for (int i = 1; i < 4; ++i)
            for (int j = i; j < 4; ++j)
                CHECK(sp.g2[i][j].get_den() == 1);
    }
}

TEST_CASE("conjugation is an involution fixing F") {
    const auto& z5 = field_by_id("zeta5");
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        QuarticElement g = elt(z5, rng() % 19 - 9, rng() % 19 - 9, rng() % 19 - 9,
                               rng() % 19 - 9);
        auto gc = conjugate(conjugate(g));
        CHECK(gc.coords == g.coords);
        // g + conj(g) has vanishing eta-part
        KPair p = g.pair_form();
        KPair s = z5.add(p, CMFieldData::conj(p));
        CHECK(s.b.u() == 0);
        CHECK(s.b.v() == 0);
    }
    // alpha2 lies in F, so conjugation fixes it
    QuarticElement a2 = elt(z5, 0, 1, 0, 0);
    CHECK(conjugate(a2).coords == a2.coords);
}

TEST_CASE("char poly of the worked example") {
    const auto& z5 = field_by_id("zeta5");
    QuarticElement pi = elt(z5, 115, -45, 17, -3);
    auto cp = char_poly(pi);
    CHECK(cp.p == 61);
    CHECK(cp.c0 == 3721);
    CHECK(cp.c1 == 61 * cp.c3);
    CHECK(cp.c3 == 29);
    CHECK(cp.c2 == 331);
    CHECK(group_order(pi) == 5851);
    // degenerate and invalid inputs
    CHECK_THROWS(char_poly(elt(z5, 1, 0, 0, 0)));    // lies in F
    CHECK_THROWS(char_poly(elt(z5, 0, 0, 1, 0)));    // p0 != 0
    QuarticElement frac = elt(z5, 1, 0, 0, 0);
    frac.coords[3] = Rat(1, 2);
    CHECK_THROWS(char_poly(frac));
}

TEST_CASE("char poly against a matrix oracle") {
    // multiplication-by-pi matrix on the integral basis; char poly by
    // Faddeev-LeVerrier over exact rationals
    for (const auto& f : registry()) {
        std::mt19937 rng(42);
        for (int trial = 0; trial < 8; ++trial) {
            QuarticElement pi = elt(f, rng() % 13 - 6, rng() % 13 - 6, rng() % 13 - 6,
                                    rng() % 13 - 6);
            KPair pp = pi.pair_form();
            if (pp.b.u() == 0 && pp.b.v() == 0) continue;
            if (f.rel_norm(pp).v() != 0) continue;  // need a Weil-type element
            // build M: column j = coords of pi * alpha_j
            std::array<std::array<Rat, 4>, 4> M;
            for (int j = 0; j < 4; ++j) {
                KPair prod = f.mul(pp, f.basis[j]);
                auto c = element_from_pair(f, prod);
                for (int i = 0; i < 4; ++i) M[i][j] = c.coords[i];
            }
            // Faddeev-LeVerrier: x^4 + c3 x^3 + c2 x^2 + c1 x + c0
            auto matmul = [](const auto& A, const auto& B) {
                std::array<std::array<Rat, 4>, 4> C{};
                for (int i = 0; i < 4; ++i)
                    for (int k = 0; k < 4; ++k)
                        for (int j = 0; j < 4; ++j) C[i][j] += A[i][k] * B[k][j];
                return C;
            };
            auto tr = [](const auto& A) { return A[0][0] + A[1][1] + A[2][2] + A[3][3]; };
            auto Mk = M;
            Rat c3 = -tr(Mk);
            auto addDiag = [](auto A, const Rat& c) {
                for (int i = 0; i < 4; ++i) A[i][i] += c;
                return A;
            };
            Mk = matmul(M, addDiag(Mk, c3));
            Rat c2 = -tr(Mk) / 2;
            Mk = matmul(M, addDiag(Mk, c2));
            Rat c1 = -tr(Mk) / 3;
            Mk = matmul(M, addDiag(Mk, c1));
            Rat c0 = -tr(Mk) / 4;
            auto cp = char_poly(pi);
            CHECK(Rat(cp.c3) == c3);
            CHECK(Rat(cp.c2) == c2);
            CHECK(Rat(cp.c1) == c1);
            CHECK(Rat(cp.c0) == c0);
        }
    }
}

TEST_CASE("disc_span dual-path agreement on random elements") {
    std::mt19937 rng(123);
    for (const auto& f : registry()) {
        for (int trial = 0; trial < 100; ++trial) {
            QuarticElement g = elt(f, rng() % 21 - 10, rng() % 21 - 10, rng() % 21 - 10,
                                   rng() % 21 - 10);
            // disc_span throws if the two routes disagree
            Int d = disc_span(g);
            auto sp = compute_search_polynomials(f);
            Rat f1v = sp.eval_f1_rat(g.coords), f2v = sp.eval_f2(g.coords[2], g.coords[3]);
            CHECK(Rat(d) == Rat(f.delta_k) * f1v * f1v * f1v * f1v * f2v * f2v);
        }
    }
}

TEST_CASE("worked-example disc identities") {
    const auto& z5 = field_by_id("zeta5");
    QuarticElement pi = elt(z5, 115, -45, 17, -3);
    CHECK(disc_span(pi) == 125);  // f1 = f2 = 1 there
    // an element with |f2| = 2 and |f1| = 1 has disc 4 * delta_k
    auto sp = compute_search_polynomials(z5);
    bool found = false;
    for (long a3 = -15; a3 <= 15 && !found; ++a3)
        for (long a4 = -15; a4 <= 15 && !found; ++a4) {
            if (abs(sp.eval_f2(Rat(a3), Rat(a4))) != 2) continue;
            for (long a2 = -30; a2 <= 30 && !found; ++a2) {
                std::array<Rat, 4> xs{Rat(0), Rat(a2), Rat(a3), Rat(a4)};
                if (abs(sp.eval_f1(xs)) != 1) continue;
                QuarticElement g = elt(z5, 0, a2, a3, a4);
                CHECK(disc_span(g) == 4 * z5.delta_k);
                found = true;
            }
        }
    CHECK(found);
}

TEST_CASE("numeric embedding cross-check at 128-bit precision") {
    // recompute the defining expressions of the four polynomials with float
    // embeddings and compare coefficient-by-coefficient: residual < 2^-64
    mpf_class tol(0, 192);
    mpf_class one(1, 192);
    mpf_div_2exp(tol.get_mpf_t(), one.get_mpf_t(), 64);
    for (const auto& f : registry()) {
        auto sp = compute_search_polynomials(f);
        mpf_class sqrt_df(0, 192), sqrt_dk(0, 192);
        mpf_class dfv(f.delta_f, 192);
        mpf_sqrt(sqrt_df.get_mpf_t(), dfv.get_mpf_t());
        mpf_class dkv(0, 192);
        mpf_set_z(dkv.get_mpf_t(), f.delta_k.get_mpz_t());
        mpf_sqrt(sqrt_dk.get_mpf_t(), dkv.get_mpf_t());
        // s_k = sqrt(|phi_k(beta)|)
        auto phiF = [&](const quad::RealQuadElement& r, int which) {
            mpf_class u(0, 192), v(0, 192);
            mpf_set_q(u.get_mpf_t(), Rat(r.u()).get_mpq_t());
            mpf_set_q(v.get_mpf_t(), Rat(r.v()).get_mpq_t());
            return which == 1 ? mpf_class(u + v * sqrt_df) : mpf_class(u - v * sqrt_df);
        };
        mpf_class s1(0, 192), s2(0, 192);
        mpf_class b1 = -phiF(f.beta, 1), b2 = -phiF(f.beta, 2);
        mpf_sqrt(s1.get_mpf_t(), b1.get_mpf_t());
        mpf_sqrt(s2.get_mpf_t(), b2.get_mpf_t());
        auto close = [&](const mpf_class& num, const Rat& exact) {
            mpf_class ex(0, 192);
            mpf_set_q(ex.get_mpf_t(), exact.get_mpq_t());
            mpf_class scale = abs(ex);
            if (scale < 1) scale = 1;
            CHECK(abs(num - ex) < tol * scale);
        };
        for (int i = 0; i < 4; ++i) {
            // f1 coefficient: (phi1 - phi2)(alpha_i + conj(alpha_i)) / sqrt(DF)
            mpf_class tr1 = 2 * phiF(f.basis[i].a, 1), tr2 = 2 * phiF(f.basis[i].a, 2);
            close((tr1 - tr2) / sqrt_df, Rat(sp.f1[i]));
        }
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                // products of complex embeddings of alpha_i * conj(alpha_j)
                auto prod_re = [&](int which) {
                    const mpf_class& s = (which == 1) ? s1 : s2;
                    mpf_class are = phiF(f.basis[i].a, which), bre = phiF(f.basis[i].b, which);
                    mpf_class cre = phiF(f.basis[j].a, which), dre = phiF(f.basis[j].b, which);
                    // (are + bre*s*I) * (cre - dre*s*I) real part
                    return mpf_class(are * cre + bre * dre * s * s);
                };
                auto prod_im = [&](int which) {
                    const mpf_class& s = (which == 1) ? s1 : s2;
                    mpf_class are = phiF(f.basis[i].a, which), bre = phiF(f.basis[i].b, which);
                    mpf_class cre = phiF(f.basis[j].a, which), dre = phiF(f.basis[j].b, which);
                    return mpf_class((bre * cre - are * dre) * s);
                };
                mpf_class sym_re = prod_re(1) + prod_re(2);
                // symmetrized over i<->j the imaginary parts cancel; the real
                // part doubles off the diagonal
                mpf_class phat_num = (i == j) ? mpf_class(sym_re / 2) : sym_re;
                close(phat_num, sp.phat[i][j]);
                // p0: (phi1 - phi2)/(2 sqrt DF), same symmetrization
                mpf_class diff_re = prod_re(1) - prod_re(2);
                mpf_class p0_num = (i == j) ? mpf_class(diff_re / (2 * sqrt_df))
                                            : mpf_class(diff_re / sqrt_df);
                close(p0_num, sp.p0[i][j]);
                // f2: (DF/sqrt(DK)) * [phi1(delta_i) phi2(delta_j) + sym]
                if (i >= 2 && j >= 2) {
                    auto delta = [&](int idx, int which) {
                        return mpf_class(2 * phiF(f.basis[idx].b, which));
                    };
                    // delta = 2 b eta: phi1(delta_i) phi2(delta_j) =
                    //   (2 phi1(b_i) s1 I)(2 phi2(b_j) s2 I) = -4 phi1(b_i) phi2(b_j) s1 s2
                    mpf_class v = -delta(i, 1) * delta(j, 2) * s1 * s2 / 4 * 4;
                    v = -mpf_class(delta(i, 1) / 2) * mpf_class(delta(j, 2) / 2) * s1 * s2 * 4;
                    if (i != j) {
                        v += -mpf_class(delta(j, 1) / 2) * mpf_class(delta(i, 2) / 2) * s1 * s2 * 4;
                    }
                    mpf_class coeff = v * mpf_class(f.delta_f, 192) / sqrt_dk;
                    Rat exact = (i == 2 && j == 2) ? Rat(sp.f2.a)
                                : (i == 3 && j == 3) ? Rat(sp.f2.c)
                                                     : Rat(sp.f2.b);
                    close(coeff, exact);
                }
            }
        }
    }
}

TEST_CASE("phat + p0*sqrt(DF) equals the embedding of pi*conj(pi)") {
    // random integral elements: phi1(pi conj(pi)) = phat(a) + p0(a) sqrt(DF)
    std::mt19937 rng(99);
    for (const auto& f : registry()) {
        auto sp = compute_search_polynomials(f);
        for (int trial = 0; trial < 20; ++trial) {
            QuarticElement g = elt(f, rng() % 15 - 7, rng() % 15 - 7, rng() % 15 - 7,
                                   rng() % 15 - 7);
            KPair p = g.pair_form();
            quad::RealQuadElement nr = f.rel_norm(p);
            CHECK(nr.u() == sp.eval_phat(g.coords));
            CHECK(nr.v() == sp.eval_p0(g.coords));
        }
    }
}

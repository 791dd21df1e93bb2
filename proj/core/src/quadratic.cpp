#include "siav/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace siav::quad {

namespace {

long mod4(long D) { return ((D % 4) + 4) % 4; }

void require_imag_disc(long D) {
    if (D >= 0 || (mod4(D) != 0 && mod4(D) != 1))
        throw std::invalid_argument("discriminant must be negative and 0 or 1 mod 4");
}

// squarefree part decomposition n = s^2 * m, m squarefree (n > 0)
std::pair<long, long> square_decompose(long n) {
    long s = 1, m = 1;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        for (int i = 0; i < e / 2; ++i) s *= p;
        if (e & 1) m *= p;
    }
    m *= n;
    return {s, m};
}

}  // namespace

long class_number_imaginary(long D) {
    require_imag_disc(D);
    long absD = -D;
    long count = 0;
    for (long b = (absD & 1); 3 * b * b <= absD; b += 2) {
        long m4 = b * b + absD;  // = 4ac
        if (m4 % 4) continue;
        long m = m4 / 4;
        for (long a = std::max<long>(b, 1); a * a <= m; ++a) {
            if (m % a) continue;
            long c = m / a;
            if (std::gcd(std::gcd(a, b), c) != 1) continue;
            count += (b == 0 || b == a || a == c) ? 1 : 2;
        }
    }
    return count;
}

long kronecker_class_number(long D) {
    require_imag_disc(D);
    // D = f^2 * D_K with D_K fundamental
    auto [s, m] = square_decompose(-D);
    long dk, f;
    if (mod4(-m) == 1) {  // -m = 1 mod 4
        dk = -m;
        f = s;
    } else {
        dk = -4 * m;
        if (s % 2) throw std::invalid_argument("invalid discriminant");
        f = s / 2;
    }
    long h = 0;
    for (long fp = 1; fp <= f; ++fp) {
        if (f % fp) continue;
        h += class_number_imaginary(fp * fp * dk);
    }
    return h;
}

RealQuadElement RealQuadElement::operator+(const RealQuadElement& o) const {
    return {disc_, u_ + o.u_, v_ + o.v_};
}
RealQuadElement RealQuadElement::operator-(const RealQuadElement& o) const {
    return {disc_, u_ - o.u_, v_ - o.v_};
}
RealQuadElement RealQuadElement::operator*(const RealQuadElement& o) const {
    if (disc_ != o.disc_) throw std::invalid_argument("field mismatch");
    return {disc_, u_ * o.u_ + v_ * o.v_ * disc_, u_ * o.v_ + v_ * o.u_};
}
RealQuadElement RealQuadElement::operator*(const Rat& s) const {
    return {disc_, u_ * s, v_ * s};
}
RealQuadElement RealQuadElement::operator-() const { return {disc_, -u_, -v_}; }

Rat RealQuadElement::norm() const { return u_ * u_ - v_ * v_ * disc_; }

RealQuadElement RealQuadElement::inverse() const {
    Rat n = norm();
    if (n == 0) throw std::invalid_argument("inverse of zero-norm element");
    return {disc_, u_ / n, -v_ / n};
}

RealQuadElement RealQuadElement::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    RealQuadElement r(disc_, 1, 0), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

bool RealQuadElement::is_integral() const {
    Rat tu = 2 * u_, tv = 2 * v_;
    if (tu.get_den() != 1 || tv.get_den() != 1) return false;
    Int diff = tu.get_num() - tv.get_num() * disc_;
    return mpz_even_p(diff.get_mpz_t());
}

int RealQuadElement::sign_phi(int which) const {
    Rat v = (which == 1) ? v_ : -v_;
    int su = sgn(u_), sv = sgn(v);
    if (su == 0 && sv == 0) return 0;
    if (su >= 0 && sv >= 0) return 1;
    if (su <= 0 && sv <= 0) return -1;
    Rat lhs = u_ * u_, rhs = v * v * disc_;
    int c = cmp(lhs, rhs);
    if (su > 0) return c > 0 ? 1 : (c < 0 ? -1 : 0);
    return c > 0 ? -1 : (c < 0 ? 1 : 0);
}

double RealQuadElement::phi(int which) const {
    double r = std::sqrt(static_cast<double>(disc_));
    return u_.get_d() + v_.get_d() * (which == 1 ? r : -r);
}

double RealQuadElement::log_abs_phi1() const {
    auto fr_log_abs = [](const Rat& q) {
        Int n = abs(q.get_num());
        if (n == 0) throw std::domain_error("log of zero");
        signed long exp_n, exp_d;
        double mn = mpz_get_d_2exp(&exp_n, n.get_mpz_t());
        double md = mpz_get_d_2exp(&exp_d, q.get_den().get_mpz_t());
        return std::log(mn) - std::log(md) + (exp_n - exp_d) * std::log(2.0);
    };
    if (v_ == 0) return fr_log_abs(u_);
    if (u_ == 0) return fr_log_abs(v_) + 0.5 * std::log(static_cast<double>(disc_));
    Rat ratio = abs(v_) / abs(u_);
    double t = ratio.get_d() * std::sqrt(static_cast<double>(disc_));
    double s = (sgn(u_) == sgn(v_)) ? 1.0 : -1.0;
    double val = 1.0 + s * t;
    if (val > 1e-9) return fr_log_abs(u_) + std::log(val);
    // cancellation: |phi1| = |norm| / |phi2|
    return fr_log_abs(norm()) - conjugate().log_abs_phi1();
}

int RealQuadElement::cmp_abs_max(const RealQuadElement& o) const {
    // max(|phi1 x|,|phi2 x|)^2 = u(x^2) + |v(x^2)| sqrt(disc)
    RealQuadElement x2 = (*this) * (*this), y2 = o * o;
    RealQuadElement t(disc_, x2.u() - y2.u(), abs(x2.v()) - abs(y2.v()));
    return t.sign_phi(1);
}

bool is_fundamental_discriminant(long D) {
    if (D <= 1) return false;
    auto [s, m] = square_decompose(D);
    if (mod4(D) == 1) return s == 1;
    if (D % 4 == 0) {
        long q = D / 4;
        auto [s2, m2] = square_decompose(q);
        return s2 == 1 && (mod4(q) == 2 || mod4(q) == 3);
    }
    return false;
}

RealQuadIdeal::RealQuadIdeal(long disc_, Int a_, Int b_)
    : disc(disc_), a(std::move(a_)), b(std::move(b_)) {
    if (a <= 0) throw std::invalid_argument("ideal: a must be positive");
    Int r = b * b - disc;
    if (r % (4 * a) != 0)
        throw std::invalid_argument("ideal: b^2 != disc mod 4a");
}

RealQuadElement fundamental_unit(long D) {
    if (!is_fundamental_discriminant(D))
        throw std::invalid_argument("fundamental_unit: disc not fundamental");
    // continued fraction of (D mod 2 + sqrt D)/2
    Int P = D % 2, Q = 2;
    Int s = isqrt(Int(D)).root;
    std::map<std::pair<Int, Int>, int> seen;
    std::vector<Int> part;
    int start = -1;
    while (true) {
        auto key = std::make_pair(P, Q);
        auto it = seen.find(key);
        if (it != seen.end()) { start = it->second; break; }
        seen[key] = static_cast<int>(part.size());
        Int a = (P + s) / Q;
        part.push_back(a);
        Int P1 = a * Q - P;
        Int Q1 = (D - P1 * P1) / Q;
        P = P1;
        Q = Q1;
    }
    // state at index `start`
    P = D % 2;
    Q = 2;
    for (int i = 0; i < start; ++i) {
        Int a = (P + s) / Q;
        P = a * Q - P;
        Q = (D - P * P) / Q;
    }
    // unit = C*x + Dd for x = (P + sqrt D)/Q, [[A,B],[C,Dd]] = prod [[a,1],[1,0]]
    Int A = 1, B = 0, C = 0, Dd = 1;
    for (size_t k = start; k < part.size(); ++k) {
        const Int& a = part[k];
        Int A2 = A * a + B, C2 = C * a + Dd;
        B = A;
        Dd = C;
        A = A2;
        C = C2;
    }
    RealQuadElement x(D, make_rat(P, Q), make_rat(Int(1), Q));
    RealQuadElement u = x * Rat(C) + RealQuadElement(D, Rat(Dd), 0);
    Rat n = u.norm();
    if (n != 1 && n != -1) throw std::logic_error("fundamental_unit: norm != +-1");
    if (!u.is_integral()) throw std::logic_error("fundamental_unit: not integral");
    if (u.sign_phi(1) < 0) u = -u;
    RealQuadElement um1 = u - RealQuadElement(D, 1, 0);
    if (um1.sign_phi(1) < 0) {
        u = u.inverse();
        if (u.sign_phi(1) < 0) u = -u;
    }
    return u;
}

namespace {

// |sqrt(D) - 2|A|| < B < sqrt(D), all exact
bool form_reduced(const Int& D, const Int& A, const Int& B) {
    if (B <= 0 || B * B >= D) return false;
    Int t = 2 * abs(A);
    Int lhs = D + t * t - B * B;
    if (lhs < 0) return true;
    return lhs * lhs < 4 * t * t * D;
}

struct FormWalk {
    Int A, B, C;
    Int m00 = 1, m01 = 0, m10 = 0, m11 = 1;  // transform so (A,B,C) = f0 o M

    void rho(const Int& D, const Int& s) {
        Int d = (B + s) / (2 * abs(C));
        if (C < 0) d = -d;
        Int A2 = C;
        Int B2 = -B + 2 * C * d;
        Int C2 = A - B * d + C * d * d;
        // step matrix [[0,-1],[1,d]]
        Int n00 = m01, n01 = -m00 + m01 * d;
        Int n10 = m11, n11 = -m10 + m11 * d;
        m00 = n00; m01 = n01; m10 = n10; m11 = n11;
        A = A2; B = B2; C = C2;
    }
};

}  // namespace

RealQuadElement ideal_generator(const RealQuadIdeal& I) {
    const long D = I.disc;
    Int s = isqrt(Int(D)).root;
    Int c4 = I.b * I.b - D;
    Int c = c4 / (4 * I.a);
    FormWalk w{I.a, I.b, c};
    // reduce
    int guard = 0;
    while (!form_reduced(Int(D), w.A, w.B)) {
        w.rho(Int(D), s);
        if (++guard > 1000000) throw std::runtime_error("ideal_generator: reduction stuck");
    }
    // walk the cycle until |A| == 1
    std::tuple<Int, Int, Int> first{w.A, w.B, w.C};
    bool found = (abs(w.A) == 1);
    guard = 0;
    while (!found) {
        w.rho(Int(D), s);
        if (abs(w.A) == 1) { found = true; break; }
        if (std::make_tuple(w.A, w.B, w.C) == first)
            throw std::runtime_error("ideal_generator: no generator found (class not principal?)");
        if (++guard > 10000000) throw std::runtime_error("ideal_generator: cycle walk stuck");
    }
    Int x = w.m00, y = w.m10;
    Int val = I.a * x * x + I.b * x * y + c * y * y;
    if (abs(val) != 1) throw std::logic_error("ideal_generator: transform inconsistent");
    RealQuadElement sigma(D, Rat(I.a * x) + make_rat(I.b, Int(2)) * Rat(y), make_rat(y, Int(2)));
    Rat nr = abs(sigma.norm());
    if (nr != Rat(I.a)) throw std::logic_error("ideal_generator: wrong norm");
    // unit-normalize: minimal max-embedding, phi1 > 0
    RealQuadElement eps = fundamental_unit(D);
    RealQuadElement epsi = eps.inverse();
    RealQuadElement g = sigma;
    while (true) {
        RealQuadElement gn = g * eps;
        if (gn.cmp_abs_max(g) < 0) g = gn; else break;
    }
    while (true) {
        RealQuadElement gn = g * epsi;
        if (gn.cmp_abs_max(g) < 0) g = gn; else break;
    }
    if (g.sign_phi(1) < 0) g = -g;
    return g;
}

}  // namespace siav::quad

#include "siav/ec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <memory>
#include <sstream>

namespace siav::ec {

namespace {

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Int mod_norm(Int v, const Int& p) {
    v %= p;
    if (v < 0) v += p;
    return v;
}

}  // namespace

Int CurveFamily::eval_p(const Int& x) const {
    return (p_poly[2] * x + p_poly[1]) * x + p_poly[0];
}
Int CurveFamily::eval_N(const Int& x) const {
    return (N_poly[2] * x + N_poly[1]) * x + N_poly[0];
}
Int CurveFamily::trace(const Int& x) const {
    return eval_p(x) + 1 - eval_N(x);
}

CurveFamily family_for(int d) {
    // p = x^2 + d/4, N = (x-1)^2 + d/4        when -d = 0 mod 4
    // p = x^2 + x + (d+1)/4, N = x^2 - x + (d+1)/4  when -d = 1 mod 4
    bool known = std::find(kAllFamilyDiscs.begin(), kAllFamilyDiscs.end(), d) !=
                 kAllFamilyDiscs.end();
    if (!known) throw std::invalid_argument("family_for: d not in the class-number-1 list");
    CurveFamily f;
    f.d = d;
    if (d % 4 == 0) {
        Int c(d / 4);
        f.p_poly = {c, Int(0), Int(1)};
        f.N_poly = {c + 1, Int(-2), Int(1)};
    } else {
        Int c((d + 1) / 4);
        f.p_poly = {c, Int(1), Int(1)};
        f.N_poly = {c, Int(-1), Int(1)};
    }
    return f;
}

Int family_content_gcd(int d) {
    CurveFamily f = family_for(d);
    Int g = 0;
    for (int a = 0; a <= 4; ++a) {  // deg(p*N) + 1 consecutive values
        Int v = f.eval_p(Int(a)) * f.eval_N(Int(a));
        g = gcd(g, v);
    }
    return g;
}

bool is_super_isolated_trace(const Int& p, const Int& t) {
    if (t % p == 0) throw std::invalid_argument("supersingular trace rejected");
    Int disc = t * t - 4 * p;
    if (disc >= 0) throw std::invalid_argument("trace outside the Hasse bound");
    for (int d : kAllFamilyDiscs)
        if (disc == -Int(d)) return true;
    return false;
}

bool on_curve(const WeierstrassCurve& c, const ECPoint& P) {
    if (P.infinity) return true;
    Int lhs = mod_norm(P.y * P.y, c.p);
    Int rhs = mod_norm(P.x * P.x * P.x + c.a4 * P.x + c.a6, c.p);
    return lhs == rhs;
}

ECPoint ec_add(const WeierstrassCurve& c, const ECPoint& P, const ECPoint& Q) {
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    const Int& p = c.p;
    if (P.x == Q.x) {
        if (mod_norm(P.y + Q.y, p) == 0) return ECPoint::at_infinity();
        // doubling
        Int num = mod_norm(3 * P.x * P.x + c.a4, p);
        Int den = mod_norm(2 * P.y, p);
        Int inv;
        if (!mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t()))
            throw std::logic_error("ec_add: non-invertible denominator");
        Int lam = mod_norm(num * inv, p);
        Int x3 = mod_norm(lam * lam - 2 * P.x, p);
        Int y3 = mod_norm(lam * (P.x - x3) - P.y, p);
        return ECPoint::affine(x3, y3);
    }
    Int num = mod_norm(Q.y - P.y, p);
    Int den = mod_norm(Q.x - P.x, p);
    Int inv;
    if (!mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t()))
        throw std::logic_error("ec_add: non-invertible denominator");
    Int lam = mod_norm(num * inv, p);
    Int x3 = mod_norm(lam * lam - P.x - Q.x, p);
    Int y3 = mod_norm(lam * (P.x - x3) - P.y, p);
    return ECPoint::affine(x3, y3);
}

ECPoint ec_scalar_mul(const WeierstrassCurve& c, const ECPoint& P, const Int& k) {
    if (!on_curve(c, P)) throw std::invalid_argument("ec_scalar_mul: point not on curve");
    if (k == 0 || P.infinity) return ECPoint::at_infinity();
    Int e = abs(k);
    ECPoint base = P;
    if (k < 0) base.y = mod_norm(-base.y, c.p);
    ECPoint acc = ECPoint::at_infinity();
    for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; --i) {
        acc = ec_add(c, acc, acc);
        if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = ec_add(c, acc, base);
    }
    return acc;
}

std::optional<Int> sqrt_mod(const Int& a, const Int& p) {
    Int an = mod_norm(a, p);
    if (an == 0) return Int(0);
    if (mpz_legendre(an.get_mpz_t(), p.get_mpz_t()) != 1) return std::nullopt;
    Int r;
    if (p % 4 == 3) {
        Int e = (p + 1) / 4;
        mpz_powm(r.get_mpz_t(), an.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        return r;
    }
    // Tonelli-Shanks
    Int q = p - 1;
    unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
    Int z = 2;
    while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
    Int m(static_cast<long>(s)), c, t;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), an.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    Int e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), an.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    while (t != 1) {
        Int tt = t;
        long i = 0;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
        }
        Int b = c;
        for (long j = 0; j < m.get_si() - i - 1; ++j) b = b * b % p;
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

PointSampler::PointSampler(const WeierstrassCurve& c, uint64_t seed)
    : curve_(c), state_(seed ^ 0x9e3779b97f4a7c15ULL) {}

ECPoint PointSampler::next() {
    const Int& p = curve_.p;
    for (int guard = 0; guard < 100000; ++guard) {
        Int x = 0;
        size_t bits = mpz_sizeinbase(p.get_mpz_t(), 2);
        for (size_t got = 0; got < bits; got += 64) {
            x <<= 64;
            x |= Int(static_cast<unsigned long>(splitmix64(state_)));
        }
        x = mod_norm(x, p);
        Int rhs = mod_norm(x * x * x + curve_.a4 * x + curve_.a6, p);
        auto y = sqrt_mod(rhs, p);
        if (!y) continue;
        if (splitmix64(state_) & 1) *y = mod_norm(-*y, p);
        return ECPoint::affine(x, *y);
    }
    throw std::logic_error("PointSampler: no point found");
}

bool verify_curve_order(const WeierstrassCurve& c, const Int& N, int trials, uint64_t seed) {
    if (trials < 1) trials = 1;
    PointSampler sampler(c, seed);
    for (int i = 0; i < trials; ++i) {
        ECPoint P = sampler.next();
        if (!ec_scalar_mul(c, P, N).infinity) return false;
    }
    return true;
}

Int hilbert_class_j(int d) {
    switch (d) {
        case 3: return Int(0);
        case 4: return Int(1728);
        case 7: return Int(-3375);
        case 8: return Int(8000);
        case 11: return Int(-32768);
        case 19: return Int(-884736);
        case 43: return Int(-884736000);
        case 67: return Int(-147197952000);
        case 163: return Int("-262537412640768000");
        default: throw std::invalid_argument("hilbert_class_j: unknown discriminant");
    }
}

WeierstrassCurve construct_curve(int d, const Int& p, const Int& N,
                                 const PrimalityPolicy& policy) {
    Int t = p + 1 - N;
    if (!is_super_isolated_trace(p, t) || t * t - 4 * p != -Int(d))
        throw std::invalid_argument("construct_curve: (p, N) not admissible for d");
    (void)policy;
    Int j = mod_norm(hilbert_class_j(d), p);
    auto curve_ok = [&](const WeierstrassCurve& c) {
        if (p < 1000) {
            // exhaustive count: annihilation cannot separate N from N^2 here
            long pp = static_cast<long>(p.get_si());
            long pts = 1;
            for (long x = 0; x < pp; ++x) {
                Int rhs = mod_norm(Int(x) * x * x + c.a4 * x + c.a6, p);
                if (rhs == 0) { pts += 1; continue; }
                pts += 1 + mpz_legendre(rhs.get_mpz_t(), p.get_mpz_t());
            }
            return Int(pts) == N;
        }
        // p >= 37: N is the unique multiple of itself in the Hasse interval,
        // so annihilation of sampled points certifies the order
        PointSampler s(c, 0xc0ffee);
        for (int i = 0; i < 8; ++i)
            if (!ec_scalar_mul(c, s.next(), N).infinity) return false;
        return verify_curve_order(c, N, 8, 0xabcdef);
    };
    if (j == 0) {
        for (Int b = 1; b < p; ++b) {
            WeierstrassCurve c{p, Int(0), b};
            if (curve_ok(c)) return c;
        }
    } else if (j == mod_norm(Int(1728), p)) {
        for (Int a = 1; a < p; ++a) {
            WeierstrassCurve c{p, a, Int(0)};
            if (curve_ok(c)) return c;
        }
    } else {
        // k = j/(1728 - j); base curve (3k, 2k); quadratic twists (c^2 3k, c^3 2k)
        Int den = mod_norm(Int(1728) - j, p), inv;
        if (!mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t()))
            throw std::logic_error("construct_curve: 1728 - j not invertible");
        Int k = mod_norm(j * inv, p);
        for (Int c = 1; c < p; ++c) {
            Int c2 = mod_norm(c * c, p), c3 = mod_norm(c2 * c, p);
            WeierstrassCurve cur{p, mod_norm(3 * k * c2, p), mod_norm(2 * k * c3, p)};
            if (curve_ok(cur)) return cur;
        }
    }
    throw std::logic_error("construct_curve: no twist verified");
}

std::vector<SuperIsolatedCurveRecord> search_curves(
    int d, const std::function<std::optional<Int>()>& x_source, long count,
    const PrimalityPolicy& policy) {
    bool searchable = std::find(kSearchableDiscs.begin(), kSearchableDiscs.end(), d) !=
                      kSearchableDiscs.end();
    if (!searchable)
        throw std::invalid_argument("search_curves: family has content gcd > 1");
    CurveFamily fam = family_for(d);
    std::vector<SuperIsolatedCurveRecord> out;
    while (count > 0) {
        auto x = x_source();
        if (!x) break;
        Int p = fam.eval_p(*x), N = fam.eval_N(*x);
        if (p < 5 || N < 2) continue;
        if (!is_prime(p, policy) || !is_prime(N, policy)) continue;
        SuperIsolatedCurveRecord rec;
        rec.d = d;
        rec.x = *x;
        rec.p = p;
        rec.N = N;
        rec.t = fam.trace(*x);
        rec.curve = construct_curve(d, p, N, policy);
        out.push_back(std::move(rec));
        --count;
    }
    return out;
}

std::function<std::optional<Int>()> seeded_x_stream(uint64_t seed, int bits) {
    auto state = std::make_shared<uint64_t>(seed ^ 0xa55a5aa5deadbeefULL);
    return [state, bits]() -> std::optional<Int> {
        Int x = 0;
        for (int got = 0; got < bits; got += 64) {
            x <<= 64;
            x |= Int(static_cast<unsigned long>(splitmix64(*state)));
        }
        // trim to exactly `bits` bits
        Int mask = (Int(1) << bits) - 1;
        x &= mask;
        return x;
    };
}

namespace {

std::vector<long> primes_to(long n) {
    std::vector<bool> sieve(n + 1, true);
    std::vector<long> ps;
    for (long i = 2; i <= n; ++i) {
        if (!sieve[i]) continue;
        ps.push_back(i);
        for (long j = i * i; j <= n; j += i) sieve[j] = false;
    }
    return ps;
}

// number of distinct roots of p_poly * N_poly mod q
long omega_roots(const CurveFamily& f, long q) {
    if (q < 1000) {
        long cnt = 0;
        for (long a = 0; a < q; ++a) {
            Int v = f.eval_p(Int(a)) * f.eval_N(Int(a));
            if (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(q))) ++cnt;
        }
        return cnt;
    }
    // monic quadratics: root counts via the Legendre symbol of the discriminant;
    // the two polynomials never share a root for q >= 1000 (common roots need
    // q | p(0) with p(0) <= 41).
    Int q_(q);
    auto roots_of = [&](const std::array<Int, 3>& poly) -> long {
        Int disc = poly[1] * poly[1] - 4 * poly[2] * poly[0];
        int leg = mpz_kronecker(disc.get_mpz_t(), q_.get_mpz_t());
        return 1 + leg;
    };
    return roots_of(f.p_poly) + roots_of(f.N_poly);
}

}  // namespace

double bateman_horn_constant(int d, long prime_bound) {
    CurveFamily f = family_for(d);
    double logC = 0.0;
    for (long q : primes_to(prime_bound)) {
        double w = static_cast<double>(omega_roots(f, q));
        double dq = static_cast<double>(q);
        logC += std::log1p(-w / dq) - 2.0 * std::log1p(-1.0 / dq);
    }
    return std::exp(logC);
}

double expected_curve_count(double M, long prime_bound) {
    if (M < 4) throw std::invalid_argument("expected_curve_count: M must be >= 4");
    double csum = 0.0;
    for (int d : kSearchableDiscs) csum += bateman_horn_constant(d, prime_bound);
    double root = std::sqrt(M);
    if (root < 2.0) return 0.0;
    return csum / 4.0 * log_integral2(root);
}

std::map<long, long> isogeny_class_census(long p) {
    if (p < 5 || p > 500) throw std::invalid_argument("census: p out of range [5, 500]");
    {
        Int pp(p);
        if (!is_prime(pp)) throw std::invalid_argument("census: p not prime");
    }
    // chi[x] = legendre(x | p)
    std::vector<int> chi(p, 0);
    for (long x = 1; x < p; ++x) chi[x * x % p] = 1;
    for (long x = 1; x < p; ++x) if (chi[x] == 0) chi[x] = -1;
    chi[0] = 0;
    long g4 = std::gcd(4LL, p - 1), g6 = std::gcd(6LL, p - 1);
    // class count per trace: sum over valid (a4, a6) of |stab| / (p-1)
    std::map<long, long> stab_sum;
    for (long a = 0; a < p; ++a) {
        long a3 = a * a % p * a % p;  // a^3
        for (long b = 0; b < p; ++b) {
            // singular iff 4a^3 + 27b^2 = 0
            long disc = (4 * a3 % p + 27 * b * b % p) % p;
            if (disc == 0) continue;
            long pts = 1;  // infinity
            for (long x = 0; x < p; ++x) {
                long rhs = ((x * x % p * x % p) + a * x % p + b) % p;
                pts += 1 + chi[rhs];
            }
            long t = p + 1 - pts;
            if (t % p == 0) continue;  // supersingular excluded
            long stab = (b == 0) ? g4 : (a == 0 ? g6 : 2);
            stab_sum[t] += stab;
        }
    }
    std::map<long, long> census;
    for (auto [t, s] : stab_sum) {
        if (s % (p - 1) != 0) throw std::logic_error("census: orbit count not integral");
        census[t] = s / (p - 1);
    }
    return census;
}

void write_record(std::ostream& os, const SuperIsolatedCurveRecord& rec) {
    os << "d=" << rec.d << " x=" << rec.x << " p=" << rec.p << " N=" << rec.N
       << " t=" << rec.t << " a4=" << rec.curve.a4 << " a6=" << rec.curve.a6 << "\n";
}

SuperIsolatedCurveRecord parse_curve_record(const std::string& line) {
    SuperIsolatedCurveRecord rec;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad record token: " + tok);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "d") rec.d = std::stoi(val);
        else if (key == "x") rec.x = Int(val);
        else if (key == "p") { rec.p = Int(val); rec.curve.p = rec.p; }
        else if (key == "N") rec.N = Int(val);
        else if (key == "t") rec.t = Int(val);
        else if (key == "a4") rec.curve.a4 = Int(val);
        else if (key == "a6") rec.curve.a6 = Int(val);
        else throw std::invalid_argument("unknown record key: " + key);
    }
    return rec;
}

}  // namespace siav::ec

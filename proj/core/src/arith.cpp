#include "siav/arith.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>

namespace siav {

namespace {

// Miller-Rabin strong-witness test for odd n > 2.
bool strong_witness_composite(const Int& n, const Int& a, const Int& d, unsigned long s) {
    Int x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    Int nm1 = n - 1;
    if (x == 1 || x == nm1) return false;
    for (unsigned long i = 1; i < s; ++i) {
        x = (x * x) % n;
        if (x == nm1) return false;
        if (x == 1) return true;
    }
    return true;
}

// splitmix64 for deterministic pseudo-random witnesses.
uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::array<unsigned, 12> kDeterministicWitnesses = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

constexpr std::array<unsigned, 25> kSmallPrimes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
    43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

}  // namespace

bool is_prime(const Int& n, const PrimalityPolicy& policy) {
    if (n < 0) throw std::invalid_argument("is_prime: n must be >= 0");
    if (n < 2) return false;
    for (unsigned p : kSmallPrimes) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    Int d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

    if (n < policy.deterministic_threshold) {
        for (unsigned a : kDeterministicWitnesses) {
            if (strong_witness_composite(n, Int(a), d, s)) return false;
        }
        return true;
    }
    uint64_t state = mpz_get_ui(n.get_mpz_t()) ^ 0xd1b54a32d192ed03ULL;
    Int nm3 = n - 3;
    for (int i = 0; i < policy.rounds; ++i) {
        // witness in [2, n-2]
        Int raw = Int(static_cast<unsigned long>(splitmix64(state)));
        raw <<= 64;
        raw |= Int(static_cast<unsigned long>(splitmix64(state)));
        Int a = raw % nm3 + 2;
        if (strong_witness_composite(n, a, d, s)) return false;
    }
    return true;
}

IsqrtResult isqrt(const Int& n) {
    if (n < 0) throw std::invalid_argument("isqrt: negative input");
    IsqrtResult r;
    Int rem;
    mpz_sqrtrem(r.root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
    r.exact = (rem == 0);
    return r;
}

int kronecker_symbol(const Int& a, const Int& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

std::optional<NearPrimeSplit> split_near_prime(const Int& N, const Int& c_max,
                                               const PrimalityPolicy& policy) {
    if (N < 2) throw std::invalid_argument("split_near_prime: N must be >= 2");
    if (c_max < 1) throw std::invalid_argument("split_near_prime: c_max must be >= 1");
    for (Int c = 1; c <= c_max; ++c) {
        if (!mpz_divisible_p(N.get_mpz_t(), c.get_mpz_t())) continue;
        Int r = N / c;
        if (is_prime(r, policy)) return NearPrimeSplit{c, r};
    }
    return std::nullopt;
}

double log_integral2(double M) {
    if (M < 2.0) throw std::invalid_argument("log_integral2: M must be >= 2");
    if (M == 2.0) return 0.0;
    // substitute t = e^u: integral of e^u/u^2 du over [log 2, log M]
    auto f = [](double u) { return std::exp(u) / (u * u); };
    double lo = std::log(2.0), hi = std::log(M);
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, lo, hi, 15, 1e-9, &err);
    return v;
}

}  // namespace siav

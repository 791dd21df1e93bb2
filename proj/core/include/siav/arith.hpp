#pragma once

// Exact big-integer primitives shared by the curve and surface searches:
// primality, integer roots, Kronecker symbols, near-prime splitting, and the
// logarithmic-integral quadrature behind the density heuristics.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace siav {

using Int = mpz_class;
using Rat = mpq_class;

// mpq_class(num, den) does not reduce; this does.
inline Rat make_rat(const Int& num, const Int& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

struct PrimalityPolicy {
    // Inputs below the threshold take a deterministic witness set; above it,
    // `rounds` pseudo-random strong witnesses.
    Int deterministic_threshold;
    int rounds;

    PrimalityPolicy(Int threshold, int r)
        : deterministic_threshold(std::move(threshold)), rounds(r) {
        Int min_thresh = Int(1) << 64;
        if (deterministic_threshold < min_thresh)
            throw std::invalid_argument("deterministic_threshold must be >= 2^64");
        if (rounds < 32)
            throw std::invalid_argument("rounds must be >= 32");
    }
    static PrimalityPolicy standard() { return PrimalityPolicy(Int(1) << 64, 40); }
};

// Strong-witness primality. Deterministic below policy.deterministic_threshold
// (witness set valid for all n < 3.3e24), Miller-Rabin with `rounds` witnesses
// derived from n above it.
bool is_prime(const Int& n, const PrimalityPolicy& policy = PrimalityPolicy::standard());

struct IsqrtResult {
    Int root;
    bool exact;
};

// floor(sqrt(n)) with exactness flag; n >= 0.
IsqrtResult isqrt(const Int& n);

// Kronecker symbol (a|n), full domain.
int kronecker_symbol(const Int& a, const Int& n);

struct NearPrimeSplit {
    Int cofactor;    // c
    Int prime_part;  // r, prime; c*r == N
};

// Smallest c <= c_max with c | N and N/c prime; nullopt if none.
std::optional<NearPrimeSplit> split_near_prime(const Int& N, const Int& c_max,
                                               const PrimalityPolicy& policy = PrimalityPolicy::standard());

// Integral of dt/log^2(t) from 2 to M, relative error <= 1e-6. M >= 2.
double log_integral2(double M);

}  // namespace siav

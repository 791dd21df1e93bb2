#pragma once

// Super-isolated elliptic curves of prime order: the trace test, the
// polynomial search families, CM construction with twist selection,
// Bateman-Horn density estimates, and a brute-force isogeny-class census.

#include "siav/arith.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace siav::ec {

// p(x) and N(x) for one CM discriminant family: quadratic polynomials with
// integer coefficients, stored low-to-high.
struct CurveFamily {
    int d;
    std::array<Int, 3> p_poly;
    std::array<Int, 3> N_poly;

    Int eval_p(const Int& x) const;
    Int eval_N(const Int& x) const;
    Int trace(const Int& x) const;  // t with N = p + 1 - t
};

inline constexpr std::array<int, 9> kAllFamilyDiscs = {3, 4, 7, 8, 11, 19, 43, 67, 163};
inline constexpr std::array<int, 5> kSearchableDiscs = {3, 19, 43, 67, 163};

CurveFamily family_for(int d);

// gcd over consecutive integer arguments a = 0..deg(pN) of p(a)N(a).
Int family_content_gcd(int d);

// Cor.-style trace test: true iff t^2 - 4p is one of the nine class-number-1
// discriminants. Requires t^2 < 4p and t != 0 mod p.
bool is_super_isolated_trace(const Int& p, const Int& t);

struct WeierstrassCurve {
    Int p;   // field characteristic, >= 5
    Int a4;
    Int a6;
};

struct ECPoint {
    bool infinity = true;
    Int x, y;
    static ECPoint at_infinity() { return ECPoint{}; }
    static ECPoint affine(Int x, Int y) { return ECPoint{false, std::move(x), std::move(y)}; }
};

bool on_curve(const WeierstrassCurve& c, const ECPoint& P);
ECPoint ec_add(const WeierstrassCurve& c, const ECPoint& P, const ECPoint& Q);
ECPoint ec_scalar_mul(const WeierstrassCurve& c, const ECPoint& P, const Int& k);

// Deterministic point sampling (seeded), used by order verification.
class PointSampler {
  public:
    PointSampler(const WeierstrassCurve& c, uint64_t seed);
    ECPoint next();  // a random affine point on the curve

  private:
    const WeierstrassCurve curve_;
    uint64_t state_;
};

// Modular square root (Tonelli-Shanks); nullopt when a is a non-residue.
std::optional<Int> sqrt_mod(const Int& a, const Int& p);

// True iff [N]P = infinity for `trials` sampled points (trials >= 1 enforced).
bool verify_curve_order(const WeierstrassCurve& c, const Int& N, int trials,
                        uint64_t seed = 0x5eed);

// CM construction: curve over F_p with exactly N points, from the family
// j-invariant and twist enumeration; smallest valid twist coefficient wins.
WeierstrassCurve construct_curve(int d, const Int& p, const Int& N,
                                 const PrimalityPolicy& policy = PrimalityPolicy::standard());

// j-invariants of the nine class-number-1 CM orders (validated at startup).
Int hilbert_class_j(int d);

struct SuperIsolatedCurveRecord {
    int d = 0;
    Int x, p, N, t;
    WeierstrassCurve curve;
};

// Pull x values from `source` (count of them); emit a record whenever p(x) and
// N(x) are both prime. Order of emission follows the source.
std::vector<SuperIsolatedCurveRecord> search_curves(
    int d, const std::function<std::optional<Int>()>& x_source, long count,
    const PrimalityPolicy& policy = PrimalityPolicy::standard());

// Deterministic seeded stream of uniform x in [0, 2^bits).
std::function<std::optional<Int>()> seeded_x_stream(uint64_t seed, int bits);

// Euler product over primes q <= prime_bound of (1 - w(q)/q)(1 - 1/q)^-2.
double bateman_horn_constant(int d, long prime_bound);

// 19.7-style heuristic: (sum_d C_d / 4) * li2(sqrt(M)).
double expected_curve_count(double M, long prime_bound = 10000000);

// Exhaustive isomorphism-class census over F_p (5 <= p <= 500): count of
// classes per ordinary trace t.
std::map<long, long> isogeny_class_census(long p);

// line-delimited curve record serialization (decimal, bit-exact round trip)
void write_record(std::ostream& os, const SuperIsolatedCurveRecord& rec);
SuperIsolatedCurveRecord parse_curve_record(const std::string& line);

}  // namespace siav::ec

#pragma once

// Unit-orbit enumeration of super-isolated Weil numbers in quartic CM fields,
// the termination-bound certificate, verification, the near-prime filter, and
// a brute-force oracle for small instances.

#include "siav/arith.hpp"
#include "siav/cm_field.hpp"
#include "siav/quadratic.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace siav::weil {

using cm::CMFieldData;
using cm::CharPoly;
using cm::SearchPolynomials;
using quad::RealQuadElement;

struct WeilSearchParams {
    const CMFieldData* field = nullptr;
    Int p_max;
    std::optional<int> i_max;     // explicit orbit bound; derived when absent
    unsigned sign_set = 0xF;      // mask over (sigma sign, f1 sign) branches
    PrimalityPolicy policy = PrimalityPolicy::standard();
};

struct SuperIsolatedWeilRecord {
    std::string field_id;
    std::array<Int, 4> coords;    // a1..a4
    Int p;
    CharPoly cp;
    Int order;                    // N = f(1)
    std::optional<NearPrimeSplit> split;
    int orbit_index = 0;          // exponent i with sigma = sign * eps^i * gamma
    int sigma_sign = 1;
    int f1_sign = 1;
};

struct BoundCertificate {
    Rat C0;            // |a3| <= C0 |a4|
    Rat bracket;       // kappa
    Rat C1;            // min-embedding(gamma) / kappa
    Rat C2;            // rational lower bound of max|phi(eps)| used in the bound
    double unit_max_embedding;  // actual max|phi(eps)|
    Rat P4_leading;    // rho: p_hat >= rho * a4^4 on every branch for |a4| >= X
    Rat primary_branch_leading;  // leading A-coefficient of the all-plus branch
    long X = 0;        // validity threshold for the P4 bound
    int i_rho = 0;
    int i_small = 0;   // covers 2 <= |a4| < X
    int i_max = 0;     // max(i_rho, i_small)
};

struct OrbitPoint {
    int i;             // unit exponent
    int sign;          // +1 / -1
    Rat a3, a4;        // sigma = a3*a + a4*(b+sqrt(DF))/2
};

// gamma and eps for the field's f2-ideal, as used by the orbit.
struct OrbitBasis {
    RealQuadElement gamma;
    RealQuadElement eps;
    Int form_a, form_b;  // signed f2 coefficients fixing the coordinate frame
};
OrbitBasis orbit_basis(const CMFieldData& fld);

// Coordinates of sigma = +-eps^i*gamma for |i| <= i_max, i ascending, + then -.
std::vector<OrbitPoint> enumerate_unit_orbit(const CMFieldData& fld, int i_max);
std::vector<OrbitPoint> enumerate_unit_orbit(const CMFieldData& fld, int i_max,
                                             const OrbitBasis& ob);

// a2 from f1 = sign_f1 and a1 from p0 = 0; absent when either is non-integral.
std::optional<std::pair<Int, Int>> complete_solution(const SearchPolynomials& sp,
                                                     const Rat& a3, const Rat& a4,
                                                     int sign_f1);

// Termination bound for p_hat <= p_max.
BoundCertificate compute_i_bound(const CMFieldData& fld, const Int& p_max);

// All super-isolated Weil records with p_hat <= p_max, deduplicated by
// characteristic polynomial and sorted by (p, char poly).
std::vector<SuperIsolatedWeilRecord> search(const WeilSearchParams& params);

enum class VerifyFailure {
    none,
    non_integral,
    p0_nonzero,
    p_not_prime,
    disc_not_maximal,
    class_number,
    order_mismatch,
    charpoly_mismatch,
};

// Independent re-derivation of the record's certificate via the trace-matrix
// disc route; returns the first failed check.
VerifyFailure verify_weil_record(const SuperIsolatedWeilRecord& rec, const CMFieldData& fld,
                                 const PrimalityPolicy& policy = PrimalityPolicy::standard());

// Exhaustive scan over integral (a3, a4) with |a3|, |a4| <= coeff_bound,
// applying the full certificate directly; records post-filtered to
// max_i |a_i| <= coeff_bound.  Test oracle; coeff_bound <= 200.
std::vector<SuperIsolatedWeilRecord> brute_force_weil_oracle(const CMFieldData& fld,
                                                             long coeff_bound);

struct FieldScan {
    std::string field_id;
    BoundCertificate cert;
    long n_records = 0;
};

struct ScanSummary {
    std::vector<FieldScan> fields;
    std::vector<SuperIsolatedWeilRecord> records;          // all, deduplicated
    std::vector<SuperIsolatedWeilRecord> filtered;         // near-prime window
    std::vector<Int> smallest_cofactors;                   // over the r-window
    long total_classes = 0;
};

// Scan every registry field to p_max; near-prime filter keeps records whose
// order splits as c*r with c <= cofactor_max and r_min <= r <= r_max (the
// filter is skipped when cofactor_max == 0).  The smallest-cofactor report
// always uses the r-window with an exploration cap of 10^6.
ScanSummary scan_all(const std::vector<CMFieldData>& registry, const Int& p_max,
                     const Int& cofactor_max, const Int& r_min, const Int& r_max,
                     int workers = 1);

// line-delimited record serialization (decimal, bit-exact round trip)
void write_record(std::ostream& os, const SuperIsolatedWeilRecord& rec);
SuperIsolatedWeilRecord parse_record(const std::string& line);

}  // namespace siav::weil

#pragma once

// Quartic CM fields in the pair representation K = F + F*eta, eta^2 = beta
// totally negative, and the four exact search polynomials derived from a
// distinguished integral basis.

#include "siav/arith.hpp"
#include "siav/quadratic.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace siav::cm {

using quad::RealQuadElement;

// a + b*eta with a, b in F
struct KPair {
    RealQuadElement a, b;
};

struct CMFieldData {
    std::string id;
    long delta_f = 0;
    Int delta_k;
    RealQuadElement beta;           // eta^2, totally negative
    std::array<KPair, 4> basis;     // alpha_1 = 1; {alpha_1, alpha_2} spans O_F
    int class_number = 1;
    std::vector<Int> eta_poly;      // monic min poly of eta over Q, low-to-high

    // pair arithmetic in K relative to this field's beta
    KPair mul(const KPair& x, const KPair& y) const;
    KPair add(const KPair& x, const KPair& y) const;
    KPair sub(const KPair& x, const KPair& y) const;
    KPair scale(const KPair& x, const Rat& s) const;
    static KPair conj(const KPair& x) { return {x.a, -x.b}; }
    KPair one() const;
    RealQuadElement rel_norm(const KPair& x) const;   // x * conj(x), in F
    Rat trace_Q(const KPair& x) const { return 2 * x.a.trace(); }
    bool is_integral(const KPair& x) const;
};

// Element written in coordinates over the field's integral basis.
struct QuarticElement {
    const CMFieldData* field = nullptr;
    std::array<Rat, 4> coords;

    bool is_integral() const;
    KPair pair_form() const;
};

QuarticElement conjugate(const QuarticElement& g);
QuarticElement element_from_pair(const CMFieldData& fld, const KPair& p);

// x^4 + c3 x^3 + c2 x^2 + c1 x + c0 with c1 = p*c3, c0 = p^2
struct CharPoly {
    Int c3, c2, c1, c0;
    Int p;  // pi * conj(pi)
    auto operator<=>(const CharPoly&) const = default;
};

// Characteristic polynomial of pi over Q. Requires pi integral, pi*conj(pi)
// rational (p0 = 0), and pi not in F.
CharPoly char_poly(const QuarticElement& pi);

// #A(F_p) = f(1) = Norm(pi - 1) > 0
Int group_order(const QuarticElement& pi);

// disc of span{1, pi, conj(pi), pi^2} computed by the trace-matrix route and
// the Delta_K * f1^4 * f2^2 identity; the two must agree.
Int disc_span(const QuarticElement& pi);
Int disc_span_trace_only(const QuarticElement& pi);  // independent route

struct SearchPolynomials {
    std::array<Int, 4> f1;            // coefficient of x_i (f1[0] == 0)
    quad::BinaryQF f2;                // in x3, x4; disc == delta_f
    std::array<std::array<Rat, 4>, 4> phat;  // upper-triangular monomial coeffs
    std::array<std::array<Rat, 4>, 4> p0;
    std::array<std::array<Rat, 4>, 4> g2;    // g = 2*p0 - f1*x1 (no x1 terms)

    Rat eval_phat(const std::array<Rat, 4>& x) const;
    Rat eval_p0(const std::array<Rat, 4>& x) const;
    Int eval_f1(const std::array<Rat, 4>& x) const;
    Rat eval_f1_rat(const std::array<Rat, 4>& x) const;
    Rat eval_f2(const Rat& x3, const Rat& x4) const;
    Rat eval_g(const Rat& x2, const Rat& x3, const Rat& x4) const;
};

// Exact coefficients of the four search polynomials; validates the
// integrality and discriminant invariants and aborts on violation.
SearchPolynomials compute_search_polynomials(const CMFieldData& fld);

// Registry -------------------------------------------------------------

struct RegistryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse and validate a field registry. Validation recomputes the basis
// discriminant against delta_k, checks alpha_1 = 1, checks {alpha_1, alpha_2}
// spans O_F, and checks beta totally negative; failures name the field id and
// the failed check.
std::vector<CMFieldData> load_field_registry(std::istream& in);
std::vector<CMFieldData> load_field_registry_file(const std::string& path);

// Registry search path: explicit argument, SIAV_FIELDS env var, or the
// build-time default.
std::string default_registry_path();

}  // namespace siav::cm

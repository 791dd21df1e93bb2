#pragma once

// Exact arithmetic in imaginary quadratic orders (class numbers) and real
// quadratic fields (elements, fundamental units, principal ideal generators).

#include "siav/arith.hpp"

#include <cstdint>
#include <vector>

namespace siav::quad {

struct BinaryQF {
    Int a, b, c;
    Int disc() const { return b * b - 4 * a * c; }
};

// Number of classes of primitive reduced positive-definite forms of
// discriminant D (D < 0, D = 0 or 1 mod 4), by exhaustive enumeration.
long class_number_imaginary(long D);

// Kronecker class number H(D) = sum of h(f'^2 D_K) over divisors f' of the
// conductor f, where D = f^2 D_K with D_K fundamental.
long kronecker_class_number(long D);

// Element u + v*sqrt(disc) of the real quadratic field of fundamental
// discriminant disc > 0.
class RealQuadElement {
  public:
    RealQuadElement() : disc_(0) {}
    RealQuadElement(long disc, Rat u, Rat v)
        : disc_(disc), u_(std::move(u)), v_(std::move(v)) {}

    long disc() const { return disc_; }
    const Rat& u() const { return u_; }
    const Rat& v() const { return v_; }

    RealQuadElement operator+(const RealQuadElement& o) const;
    RealQuadElement operator-(const RealQuadElement& o) const;
    RealQuadElement operator*(const RealQuadElement& o) const;
    RealQuadElement operator*(const Rat& s) const;
    RealQuadElement operator-() const;
    bool operator==(const RealQuadElement& o) const = default;

    RealQuadElement conjugate() const { return {disc_, u_, -v_}; }
    Rat norm() const;   // u^2 - v^2 * disc
    Rat trace() const { return 2 * u_; }
    RealQuadElement inverse() const;
    RealQuadElement pow(long e) const;

    // element of O_F: 2u, 2v integers with 2u = 2v*disc mod 2
    bool is_integral() const;

    // exact sign under the embedding sending sqrt(disc) to +sqrt(disc)
    // (which = 1) or -sqrt(disc) (which = 2)
    int sign_phi(int which) const;
    bool totally_negative() const { return sign_phi(1) < 0 && sign_phi(2) < 0; }
    bool totally_positive() const { return sign_phi(1) > 0 && sign_phi(2) > 0; }

    double phi(int which) const;      // float embedding
    double log_abs_phi1() const;      // log|phi1|, safe for huge coordinates

    // exact comparison of max(|phi1 x|, |phi2 x|) against another element's
    int cmp_abs_max(const RealQuadElement& o) const;

  private:
    long disc_;
    Rat u_, v_;
};

// Z-module a*Z + ((b+sqrt(disc))/2)*Z; requires b^2 = disc mod 4a.
struct RealQuadIdeal {
    long disc;
    Int a;  // > 0; the ideal norm
    Int b;
    RealQuadIdeal(long disc_, Int a_, Int b_);
};

// Fundamental unit of O_F, normalized with phi1(eps) > 1, via the continued
// fraction of (disc mod 2 + sqrt(disc))/2.  disc must be fundamental.
RealQuadElement fundamental_unit(long disc);

// Principal generator gamma of I with |Norm(gamma)| = Norm(I) = a;
// deterministic: minimal max-embedding absolute value, phi1(gamma) > 0.
// Throws if no generator exists within this class (class number violation).
RealQuadElement ideal_generator(const RealQuadIdeal& I);

bool is_fundamental_discriminant(long D);

}  // namespace siav::quad

#include "siav/cm_field.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace siav::cm {

using quad::RealQuadElement;

KPair CMFieldData::mul(const KPair& x, const KPair& y) const {
    return {x.a * y.a + x.b * y.b * beta, x.a * y.b + x.b * y.a};
}
KPair CMFieldData::add(const KPair& x, const KPair& y) const {
    return {x.a + y.a, x.b + y.b};
}
KPair CMFieldData::sub(const KPair& x, const KPair& y) const {
    return {x.a - y.a, x.b - y.b};
}
KPair CMFieldData::scale(const KPair& x, const Rat& s) const {
    return {x.a * s, x.b * s};
}
KPair CMFieldData::one() const {
    return {RealQuadElement(delta_f, 1, 0), RealQuadElement(delta_f, 0, 0)};
}
RealQuadElement CMFieldData::rel_norm(const KPair& x) const {
    return x.a * x.a - x.b * x.b * beta;
}
bool CMFieldData::is_integral(const KPair& x) const {
    RealQuadElement tr = x.a + x.a;
    return tr.is_integral() && rel_norm(x).is_integral();
}

bool QuarticElement::is_integral() const {
    for (const auto& c : coords)
        if (c.get_den() != 1) return false;
    return true;
}

KPair QuarticElement::pair_form() const {
    const auto& f = *field;
    KPair acc{RealQuadElement(f.delta_f, 0, 0), RealQuadElement(f.delta_f, 0, 0)};
    for (int i = 0; i < 4; ++i) {
        if (coords[i] == 0) continue;
        acc = f.add(acc, f.scale(f.basis[i], coords[i]));
    }
    return acc;
}

namespace {

// solve the 4x4 rational system M x = rhs (columns of M = pair-coords of basis)
std::array<Rat, 4> solve_coords(const CMFieldData& f, const KPair& p) {
    std::array<std::array<Rat, 5>, 4> M;
    for (int i = 0; i < 4; ++i) {
        const KPair& al = f.basis[i];
        M[0][i] = al.a.u();
        M[1][i] = al.a.v();
        M[2][i] = al.b.u();
        M[3][i] = al.b.v();
    }
    M[0][4] = p.a.u();
    M[1][4] = p.a.v();
    M[2][4] = p.b.u();
    M[3][4] = p.b.v();
    for (int col = 0; col < 4; ++col) {
        int piv = -1;
        for (int r = col; r < 4; ++r)
            if (M[r][col] != 0) { piv = r; break; }
        if (piv < 0) throw std::logic_error("basis matrix singular");
        std::swap(M[col], M[piv]);
        Rat inv = 1 / M[col][col];
        for (auto& v : M[col]) v *= inv;
        for (int r = 0; r < 4; ++r) {
            if (r == col || M[r][col] == 0) continue;
            Rat fmul = M[r][col];
            for (int c = 0; c < 5; ++c) M[r][c] -= fmul * M[col][c];
        }
    }
    return {M[0][4], M[1][4], M[2][4], M[3][4]};
}

Rat trace_F(const RealQuadElement& x) { return 2 * x.u(); }

Int det4(std::array<std::array<Rat, 4>, 4> A) {
    Rat det = 1;
    for (int c = 0; c < 4; ++c) {
        int piv = -1;
        for (int r = c; r < 4; ++r)
            if (A[r][c] != 0) { piv = r; break; }
        if (piv < 0) return Int(0);
        if (piv != c) { std::swap(A[c], A[piv]); det = -det; }
        det *= A[c][c];
        Rat inv = 1 / A[c][c];
        for (int r = c + 1; r < 4; ++r) {
            if (A[r][c] == 0) continue;
            Rat f = A[r][c] * inv;
            for (int cc = c; cc < 4; ++cc) A[r][cc] -= f * A[c][cc];
        }
    }
    if (det.get_den() != 1) throw std::logic_error("non-integral discriminant");
    return det.get_num();
}

Int disc_of_pairs(const CMFieldData& f, const std::array<KPair, 4>& els) {
    std::array<std::array<Rat, 4>, 4> M;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            M[i][j] = f.trace_Q(f.mul(els[i], els[j]));
    return det4(M);
}

}  // namespace

QuarticElement conjugate(const QuarticElement& g) {
    KPair p = g.pair_form();
    return element_from_pair(*g.field, CMFieldData::conj(p));
}

QuarticElement element_from_pair(const CMFieldData& fld, const KPair& p) {
    QuarticElement e;
    e.field = &fld;
    e.coords = solve_coords(fld, p);
    return e;
}

CharPoly char_poly(const QuarticElement& pi) {
    if (!pi.is_integral()) throw std::invalid_argument("char_poly: non-integral element");
    const auto& f = *pi.field;
    KPair p = pi.pair_form();
    if (p.b.u() == 0 && p.b.v() == 0)
        throw std::invalid_argument("char_poly: element lies in the real subfield");
    RealQuadElement nr = f.rel_norm(p);
    if (nr.v() != 0) throw std::invalid_argument("char_poly: pi*conj(pi) not rational (p0 != 0)");
    Rat pr = nr.u();
    if (pr.get_den() != 1) throw std::logic_error("char_poly: non-integral norm");
    Int pv = pr.get_num();
    RealQuadElement tr = p.a + p.a;  // pi + conj(pi), in F
    Rat A = trace_F(tr), N = tr.norm();
    if (A.get_den() != 1 || N.get_den() != 1) throw std::logic_error("char_poly: non-integral trace data");
    CharPoly cp;
    cp.c3 = -A.get_num();
    cp.c2 = N.get_num() + 2 * pv;
    cp.c1 = -pv * A.get_num();
    cp.c0 = pv * pv;
    cp.p = pv;
    return cp;
}

Int group_order(const QuarticElement& pi) {
    CharPoly f = char_poly(pi);
    Int n = 1 + f.c3 + f.c2 + f.c1 + f.c0;
    if (n <= 0) throw std::logic_error("group_order: non-positive f(1)");
    return n;
}

Int disc_span_trace_only(const QuarticElement& pi) {
    const auto& f = *pi.field;
    KPair p = pi.pair_form();
    std::array<KPair, 4> els{f.one(), p, CMFieldData::conj(p), f.mul(p, p)};
    return disc_of_pairs(f, els);
}

Int disc_span(const QuarticElement& pi) {
    Int via_trace = disc_span_trace_only(pi);
    SearchPolynomials sp = compute_search_polynomials(*pi.field);
    Rat f1v = sp.eval_f1_rat(pi.coords);
    Rat f2v = sp.eval_f2(pi.coords[2], pi.coords[3]);
    Rat prod = Rat(pi.field->delta_k) * f1v * f1v * f1v * f1v * f2v * f2v;
    if (prod.get_den() != 1 || prod.get_num() != via_trace)
        throw std::logic_error("disc_span: trace-matrix and f1/f2 routes disagree");
    return via_trace;
}

Rat SearchPolynomials::eval_phat(const std::array<Rat, 4>& x) const {
    Rat t = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            if (phat[i][j] != 0) t += phat[i][j] * x[i] * x[j];
    return t;
}
Rat SearchPolynomials::eval_p0(const std::array<Rat, 4>& x) const {
    Rat t = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            if (p0[i][j] != 0) t += p0[i][j] * x[i] * x[j];
    return t;
}
Rat SearchPolynomials::eval_f1_rat(const std::array<Rat, 4>& x) const {
    Rat t = 0;
    for (int i = 1; i < 4; ++i) t += Rat(f1[i]) * x[i];
    return t;
}
Int SearchPolynomials::eval_f1(const std::array<Rat, 4>& x) const {
    Rat t = eval_f1_rat(x);
    if (t.get_den() != 1) throw std::logic_error("f1 evaluated non-integral");
    return t.get_num();
}
Rat SearchPolynomials::eval_f2(const Rat& x3, const Rat& x4) const {
    return Rat(f2.a) * x3 * x3 + Rat(f2.b) * x3 * x4 + Rat(f2.c) * x4 * x4;
}
Rat SearchPolynomials::eval_g(const Rat& x2, const Rat& x3, const Rat& x4) const {
    std::array<Rat, 4> x{Rat(0), x2, x3, x4};
    Rat t = 0;
    for (int i = 1; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            if (g2[i][j] != 0) t += g2[i][j] * x[i] * x[j];
    return t;
}

SearchPolynomials compute_search_polynomials(const CMFieldData& fld) {
    SearchPolynomials sp{};
    const long DF = fld.delta_f;
    auto fail = [&](const std::string& what) {
        throw std::logic_error("search polynomials for " + fld.id + ": " + what);
    };
    // f1 coefficient of x_i = 4 * v(a_i)
    for (int i = 0; i < 4; ++i) {
        Rat c = 4 * fld.basis[i].a.v();
        if (c.get_den() != 1) fail("f1 coefficient not integral");
        sp.f1[i] = c.get_num();
    }
    if (sp.f1[0] != 0) fail("f1 has an x1 term");
    if (sp.f1[1] == 0) fail("f1 coefficient of x2 vanishes");
    // Qc = 4*DF*sqrt(N(beta))/sqrt(delta_k), a positive rational
    Rat nb = fld.beta.norm();
    Rat q2 = Rat(16 * DF) * Rat(DF) * nb / Rat(fld.delta_k);
    auto [rn, exn] = isqrt(q2.get_num());
    auto [rd, exd] = isqrt(q2.get_den());
    if (!exn || !exd) fail("Q^2 is not a rational square (corrupt beta/delta_k)");
    Rat Qc = make_rat(rn, rd);
    auto Nf = [](const RealQuadElement& x) -> Rat { return x.norm(); };
    auto Sf = [&](const RealQuadElement& x, const RealQuadElement& y) -> Rat {
        return 2 * (x.u() * y.u() - x.v() * y.v() * DF);
    };
    const RealQuadElement &b3 = fld.basis[2].b, &b4 = fld.basis[3].b;
    Rat f2a = -Qc * Nf(b3), f2b = -Qc * Sf(b3, b4), f2c = -Qc * Nf(b4);
    if (f2a.get_den() != 1 || f2b.get_den() != 1 || f2c.get_den() != 1)
        fail("f2 coefficient not integral");
    sp.f2 = quad::BinaryQF{f2a.get_num(), f2b.get_num(), f2c.get_num()};
    if (sp.f2.disc() != DF) fail("disc(f2) != delta_f");
    // phat / p0 via symmetrized products
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            RealQuadElement e = fld.basis[i].a * fld.basis[j].a -
                                fld.basis[i].b * fld.basis[j].b * fld.beta;
            if (i == j) {
                sp.phat[i][j] = e.u();
                sp.p0[i][j] = e.v();
            } else {
                sp.phat[i][j] = 2 * e.u();
                sp.p0[i][j] = 2 * e.v();
            }
            if (Rat(2 * sp.phat[i][j]).get_den() != 1 || Rat(2 * sp.p0[i][j]).get_den() != 1)
                fail("phat/p0 coefficient not half-integral");
        }
    }
    // g = 2*p0 - f1*x1 must be free of x1
    if (sp.p0[0][0] != 0) fail("2*p0 has an x1^2 term");
    for (int j = 1; j < 4; ++j) {
        if (2 * sp.p0[0][j] != Rat(sp.f1[j])) fail("2*p0 - f1*x1 not free of x1");
    }
    for (int i = 1; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            sp.g2[i][j] = 2 * sp.p0[i][j];
            if (sp.g2[i][j].get_den() != 1) fail("g coefficient not integral");
        }
    return sp;
}

// ---------------------------------------------------------------------------
// registry

namespace {

Rat parse_rat(const std::string& tok) {
    auto slash = tok.find('/');
    if (slash == std::string::npos) return Rat(Int(tok));
    Rat r(Int(tok.substr(0, slash)), Int(tok.substr(slash + 1)));
    r.canonicalize();
    return r;
}

RealQuadElement parse_elt(long disc, const std::string& ut, const std::string& vt) {
    return RealQuadElement(disc, parse_rat(ut), parse_rat(vt));
}

void validate_field(const CMFieldData& f) {
    auto fail = [&](const std::string& what) {
        throw RegistryError("field " + f.id + ": " + what);
    };
    if (!quad::is_fundamental_discriminant(f.delta_f))
        fail("delta_f is not a positive fundamental discriminant");
    if (f.class_number != 1) fail("class_number must be 1");
    if (!f.beta.is_integral()) fail("beta not integral");
    if (!f.beta.totally_negative()) fail("beta not totally negative");
    const KPair& a1 = f.basis[0];
    if (!(a1.a == RealQuadElement(f.delta_f, 1, 0)) || !(a1.b == RealQuadElement(f.delta_f, 0, 0)))
        fail("alpha_1 != 1");
    // {alpha_1, alpha_2} spans O_F: alpha_2 in O_F with |v| = 1/2
    const KPair& a2 = f.basis[1];
    if (!(a2.b == RealQuadElement(f.delta_f, 0, 0))) fail("alpha_2 not in the real subfield");
    if (!a2.a.is_integral()) fail("alpha_2 not integral");
    if (abs(a2.a.v()) != Rat(1, 2)) fail("{alpha_1, alpha_2} does not span O_F");
    for (int i = 0; i < 4; ++i)
        if (!f.is_integral(f.basis[i])) fail("basis element not integral");
    std::array<KPair, 4> els{f.basis[0], f.basis[1], f.basis[2], f.basis[3]};
    Int d = disc_of_pairs(f, els);
    if (d != f.delta_k) fail("basis discriminant mismatch: got " + d.get_str() +
                             ", recorded delta_k " + f.delta_k.get_str());
    // eta_poly consistency: monic, and beta satisfies the implied relation
    const auto& ep = f.eta_poly;
    if (ep.size() == 5) {
        if (ep[4] != 1 || ep[3] != 0 || ep[1] != 0) fail("eta_poly not of the form x^4+c2*x^2+c0");
        if (Rat(-ep[2]) != f.beta.trace() || Rat(ep[0]) != f.beta.norm())
            fail("eta_poly does not match beta");
    } else if (ep.size() == 3) {
        if (ep[2] != 1 || ep[1] != 0) fail("eta_poly not of the form x^2+c0");
        if (f.beta.v() != 0 || Rat(-ep[0]) != f.beta.u()) fail("eta_poly does not match beta");
    } else {
        fail("eta_poly must have degree 2 or 4");
    }
    compute_search_polynomials(f);  // asserts the Lemma-level invariants
}

}  // namespace

std::vector<CMFieldData> load_field_registry(std::istream& in) {
    std::vector<CMFieldData> out;
    std::string line;
    CMFieldData cur;
    bool open = false;
    int alpha_seen = 0;
    long lineno = 0;
    auto fail = [&](const std::string& what) {
        throw RegistryError("registry line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "field") {
            if (open) fail("nested field record");
            cur = CMFieldData{};
            ss >> cur.id;
            if (cur.id.empty()) fail("missing field id");
            open = true;
            alpha_seen = 0;
        } else if (!open) {
            fail("key '" + key + "' outside a field record");
        } else if (key == "eta_poly") {
            std::string tok;
            while (ss >> tok) cur.eta_poly.emplace_back(tok);
        } else if (key == "delta_k") {
            std::string tok;
            ss >> tok;
            cur.delta_k = Int(tok);
        } else if (key == "delta_f") {
            ss >> cur.delta_f;
        } else if (key == "beta") {
            std::string ut, vt;
            ss >> ut >> vt;
            cur.beta = parse_elt(cur.delta_f, ut, vt);
        } else if (key == "alpha1" || key == "alpha2" || key == "alpha3" || key == "alpha4") {
            int idx = key[5] - '1';
            std::string au, av, bu, bv;
            ss >> au >> av >> bu >> bv;
            cur.basis[idx] = KPair{parse_elt(cur.delta_f, au, av), parse_elt(cur.delta_f, bu, bv)};
            ++alpha_seen;
        } else if (key == "class_number") {
            ss >> cur.class_number;
        } else if (key == "end") {
            if (alpha_seen != 4) fail("field " + cur.id + ": expected 4 basis elements");
            validate_field(cur);
            out.push_back(cur);
            open = false;
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (open) throw RegistryError("unterminated field record " + cur.id);
    return out;
}

std::vector<CMFieldData> load_field_registry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RegistryError("cannot open registry file: " + path);
    return load_field_registry(in);
}

std::string default_registry_path() {
    if (const char* env = std::getenv("SIAV_FIELDS")) return env;
#ifdef SIAV_DEFAULT_REGISTRY
    return SIAV_DEFAULT_REGISTRY;
#else
    return "cm_fields.txt";
#endif
}

}  // namespace siav::cm

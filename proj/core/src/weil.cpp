#include "siav/weil.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace siav::weil {

using cm::KPair;
using cm::QuarticElement;
using quad::RealQuadIdeal;

namespace {

Rat sqrt_lower(const Rat& q) {
    // rational lower bound of sqrt(q), q >= 0, ~1e-6 accurate
    static const Int prec = 1000000;
    Int n = q.get_num() * q.get_den() * prec * prec;
    Int s = isqrt(n).root;
    return make_rat(s, q.get_den() * prec);
}

Rat sqrt_upper(const Rat& q) {
    static const Int prec = 1000000;
    Int n = q.get_num() * q.get_den() * prec * prec;
    Int s = isqrt(n).root;
    Rat r = make_rat(s, q.get_den() * prec);
    if (r * r < q) r = make_rat(s + 1, q.get_den() * prec);
    return r;
}

Int ceil_sqrt(const Int& n) {
    auto [r, exact] = isqrt(n);
    return exact ? r : r + 1;
}

// Laurent polynomials sum_k (A_k + B_k s) x^k with s^2 = DF + 4*a*s2/x^2.
struct Lp {
    std::map<int, std::pair<Rat, Rat>> t;

    void add_term(int k, const Rat& A, const Rat& B) {
        auto& e = t[k];
        e.first += A;
        e.second += B;
        if (e.first == 0 && e.second == 0) t.erase(k);
    }
};

Lp lp_add(const Lp& p, const Lp& q) {
    Lp r = p;
    for (const auto& [k, ab] : q.t) r.add_term(k, ab.first, ab.second);
    return r;
}

Lp lp_scale(const Lp& p, const Rat& c) {
    Lp r;
    if (c == 0) return r;
    for (const auto& [k, ab] : p.t) r.add_term(k, ab.first * c, ab.second * c);
    return r;
}

Lp lp_mul(const Lp& p, const Lp& q, const Rat& s2_const, const Rat& s2_xm2) {
    // s^2 = s2_const + s2_xm2 * x^-2
    Lp r;
    for (const auto& [k1, ab1] : p.t) {
        for (const auto& [k2, ab2] : q.t) {
            int k = k1 + k2;
            const auto& [A1, B1] = ab1;
            const auto& [A2, B2] = ab2;
            r.add_term(k, A1 * A2, A1 * B2 + A2 * B1);
            Rat bb = B1 * B2;
            if (bb != 0) {
                r.add_term(k, bb * s2_const, Rat(0));
                r.add_term(k - 2, bb * s2_xm2, Rat(0));
            }
        }
    }
    return r;
}

// p_hat along one sign branch as a Laurent polynomial in x (x4 = +-x).
Lp branch_laurent(const SearchPolynomials& sp, long DF, int s2, int s1, int rprime,
                  bool xneg) {
    const Int &a = sp.f2.a, &b = sp.f2.b;
    Rat s2c(DF), s2x(4 * a * s2);
    Lp X4;
    X4.add_term(1, Rat(xneg ? -1 : 1), Rat(0));
    Lp X3base;
    X3base.add_term(0, make_rat(-b, 2 * a), make_rat(Int(rprime), 2 * a));
    Lp X3 = lp_mul(X3base, X4, s2c, s2x);
    Lp X2 = lp_add(lp_scale(X3, make_rat(-sp.f1[2], sp.f1[1])),
                   lp_scale(X4, make_rat(-sp.f1[3], sp.f1[1])));
    X2.add_term(0, make_rat(Int(s1), sp.f1[1]), Rat(0));
    // x1 = -s1 * g(x2, x3, x4)
    std::array<const Lp*, 4> Xs{nullptr, &X2, &X3, &X4};
    Lp G;
    for (int i = 1; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            if (sp.g2[i][j] != 0)
                G = lp_add(G, lp_scale(lp_mul(*Xs[i], *Xs[j], s2c, s2x), sp.g2[i][j]));
    Lp X1 = lp_scale(G, Rat(-s1));
    Xs[0] = &X1;
    Lp P4;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            if (sp.phat[i][j] != 0)
                P4 = lp_add(P4, lp_scale(lp_mul(*Xs[i], *Xs[j], s2c, s2x), sp.phat[i][j]));
    return P4;
}

// Sound rho with p_hat >= rho*x^4 on the branch for x >= X; nullopt when the
// branch carries no real points beyond X.
std::optional<Rat> branch_rho(const SearchPolynomials& sp, long DF, int s2, int s1,
                              int rprime, bool xneg, long X) {
    Lp P4 = branch_laurent(sp, DF, s2, s1, rprime, xneg);
    Rat t = make_rat(4 * sp.f2.a * s2, Int(X) * X);
    Rat lo_sq(DF), hi_sq(DF);
    if (t >= 0) hi_sq += t; else lo_sq += t;
    if (hi_sq <= 0) return std::nullopt;
    if (lo_sq < 0) lo_sq = 0;
    Rat s_lo = sqrt_lower(lo_sq), s_hi = sqrt_upper(hi_sq);
    Rat rho = 0;
    for (const auto& [k, ab] : P4.t) {
        if (k > 4) throw std::logic_error("P4 degree > 4");
        const auto& [A, B] = ab;
        Rat m = A + B * (B >= 0 ? s_lo : s_hi);
        if (k == 4) {
            rho += m;
        } else if (m < 0) {
            Rat xw(1);
            for (int i = 0; i < 4 - k; ++i) xw /= X;
            rho += m * xw;
        }
    }
    return rho;
}

int smallest_exponent(Rat base_value, const Rat& ratio, const Int& threshold) {
    // smallest i >= 0 with base_value * ratio^i > threshold
    int i = 0;
    Rat thr(threshold);
    while (base_value <= thr) {
        base_value *= ratio;
        ++i;
        if (i > 100000) throw std::logic_error("exponent search runaway");
    }
    return i;
}

}  // namespace

OrbitBasis orbit_basis(const CMFieldData& fld) {
    SearchPolynomials sp = cm::compute_search_polynomials(fld);
    OrbitBasis ob;
    ob.form_a = sp.f2.a;
    ob.form_b = sp.f2.b;
    ob.gamma = quad::ideal_generator(RealQuadIdeal(fld.delta_f, abs(sp.f2.a), sp.f2.b));
    ob.eps = quad::fundamental_unit(fld.delta_f);
    return ob;
}

std::vector<OrbitPoint> enumerate_unit_orbit(const CMFieldData& fld, int i_max) {
    return enumerate_unit_orbit(fld, i_max, orbit_basis(fld));
}

std::vector<OrbitPoint> enumerate_unit_orbit(const CMFieldData& fld, int i_max,
                                             const OrbitBasis& ob) {
    std::vector<OrbitPoint> out;
    out.reserve(2 * (2 * i_max + 1));
    RealQuadElement sigma = ob.gamma * ob.eps.pow(-i_max);
    for (int i = -i_max; i <= i_max; ++i) {
        for (int sign : {1, -1}) {
            RealQuadElement s = (sign == 1) ? sigma : -sigma;
            Rat a4 = 2 * s.v();
            Rat a3 = (s.u() - s.v() * Rat(ob.form_b)) / Rat(ob.form_a);
            out.push_back(OrbitPoint{i, sign, a3, a4});
        }
        if (i < i_max) sigma = sigma * ob.eps;
    }
    return out;
}

std::optional<std::pair<Int, Int>> complete_solution(const SearchPolynomials& sp,
                                                     const Rat& a3, const Rat& a4,
                                                     int sign_f1) {
    Rat a2 = (Rat(Int(sign_f1)) - Rat(sp.f1[2]) * a3 - Rat(sp.f1[3]) * a4) / Rat(sp.f1[1]);
    Rat g = sp.eval_g(a2, a3, a4);
    Rat a1 = -Rat(Int(sign_f1)) * g;
    if (a1.get_den() != 1 || a2.get_den() != 1) return std::nullopt;
    return std::make_pair(Int(a1.get_num()), Int(a2.get_num()));
}

BoundCertificate compute_i_bound(const CMFieldData& fld, const Int& p_max) {
    if (p_max < 2) throw std::invalid_argument("compute_i_bound: p_max must be >= 2");
    SearchPolynomials sp = cm::compute_search_polynomials(fld);
    const long DF = fld.delta_f;
    BoundCertificate bc;
    Int aa = abs(sp.f2.a), ab = abs(sp.f2.b);
    bc.C0 = make_rat(ab + ceil_sqrt(Int(DF) + 4 * aa), 2 * aa);
    bc.bracket = bc.C0 * Rat(aa) + make_rat(ab + ceil_sqrt(Int(DF)), Int(2));
    OrbitBasis ob = orbit_basis(fld);
    // min-embedding lower bound = |N(gamma)| / (|u| + |v| ceil sqrt DF)
    Rat ub = abs(ob.gamma.u()) + abs(ob.gamma.v()) * Rat(ceil_sqrt(Int(DF)));
    bc.C1 = abs(ob.gamma.norm()) / ub / bc.bracket;
    bc.C2 = Rat(3, 2);  // valid: the golden ratio is the least fundamental unit
    bc.unit_max_embedding = std::exp(ob.eps.log_abs_phi1());
    // primary branch constant (all-plus branch, nonnegative-B terms dropped)
    {
        Lp P4 = branch_laurent(sp, DF, 1, 1, 1, false);
        auto it = P4.t.find(4);
        bc.primary_branch_leading = (it == P4.t.end()) ? Rat(0) : it->second.first;
    }
    // rho over all branches, adaptive X
    bool done = false;
    for (long X : {16L, 64L, 256L, 1024L, 4096L}) {
        std::optional<Rat> best;
        for (int s2 : {1, -1})
            for (int s1 : {1, -1})
                for (int rp : {1, -1})
                    for (bool xneg : {false, true}) {
                        auto rho = branch_rho(sp, DF, s2, s1, rp, xneg, X);
                        if (!rho) continue;
                        if (!best || *rho < *best) best = rho;
                    }
        if (best && *best > 0) {
            bc.P4_leading = *best;
            bc.X = X;
            done = true;
            break;
        }
    }
    if (!done) throw std::logic_error("compute_i_bound: no positive P4 bound for " + fld.id);
    Rat ratio = bc.C2 * bc.C2 * bc.C2 * bc.C2;
    Rat c14 = bc.C1 * bc.C1 * bc.C1 * bc.C1;
    bc.i_rho = smallest_exponent(bc.P4_leading * c14, ratio, p_max);
    // i_small: C1 * C2^i > X - 1
    bc.i_small = smallest_exponent(bc.C1, bc.C2, Int(bc.X - 1));
    bc.i_max = std::max(bc.i_rho, bc.i_small);
    return bc;
}

namespace {

struct Collector {
    const CMFieldData& fld;
    const SearchPolynomials& sp;
    const Int* p_max;  // null = unbounded
    const PrimalityPolicy& policy;
    unsigned sign_set;
    std::map<std::tuple<Int, Int, Int, Int>, SuperIsolatedWeilRecord> found;

    void try_pair(const Rat& a3, const Rat& a4, int orbit_i, int sigma_sign) {
        if (a3.get_den() != 1 || a4.get_den() != 1) return;
        Rat f2v = sp.eval_f2(a3, a4);
        if (f2v != 1 && f2v != -1) return;
        for (int sf1 : {1, -1}) {
            unsigned branch = (sigma_sign < 0 ? 1u : 0u) | (sf1 < 0 ? 2u : 0u);
            if (!(sign_set & (1u << branch))) continue;
            auto comp = complete_solution(sp, a3, a4, sf1);
            if (!comp) continue;
            QuarticElement pi;
            pi.field = &fld;
            pi.coords = {Rat(comp->first), Rat(comp->second), a3, a4};
            Rat ph = sp.eval_phat(pi.coords);
            if (ph.get_den() != 1) continue;
            Int p = ph.get_num();
            if (p < 2) continue;
            if (p_max && p > *p_max) continue;
            if (!is_prime(p, policy)) continue;
            CharPoly cp = cm::char_poly(pi);
            auto key = std::make_tuple(cp.c3, cp.c2, cp.c1, cp.c0);
            if (found.count(key)) continue;
            // full certificate: disc identity (both routes must agree)
            Int d = cm::disc_span(pi);
            if (d != fld.delta_k) continue;
            SuperIsolatedWeilRecord rec;
            rec.field_id = fld.id;
            rec.coords = {comp->first, comp->second, Int(a3.get_num()), Int(a4.get_num())};
            rec.p = p;
            rec.cp = cp;
            rec.order = cm::group_order(pi);
            rec.orbit_index = orbit_i;
            rec.sigma_sign = sigma_sign;
            rec.f1_sign = sf1;
            found.emplace(key, std::move(rec));
        }
    }
};

std::vector<SuperIsolatedWeilRecord> sorted_records(
    std::map<std::tuple<Int, Int, Int, Int>, SuperIsolatedWeilRecord>&& m) {
    std::vector<SuperIsolatedWeilRecord> out;
    out.reserve(m.size());
    for (auto& [k, v] : m) out.push_back(std::move(v));
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return std::tie(x.p, x.cp.c3, x.cp.c2) < std::tie(y.p, y.cp.c3, y.cp.c2);
    });
    return out;
}

// integral roots of A t^2 + B t + C = 0
std::vector<Int> int_quadratic_roots(const Int& A, const Int& B, const Int& C) {
    std::vector<Int> out;
    if (A == 0) {
        if (B != 0 && C % B == 0) out.push_back(-C / B);
        return out;
    }
    Int disc = B * B - 4 * A * C;
    if (disc < 0) return out;
    auto [sd, exact] = isqrt(disc);
    if (!exact) return out;
    for (const Int& num : {Int(-B + sd), Int(-B - sd)}) {
        if (num % (2 * A) == 0) {
            Int r = num / (2 * A);
            if (out.empty() || out[0] != r) out.push_back(r);
        }
    }
    return out;
}

}  // namespace

std::vector<SuperIsolatedWeilRecord> search(const WeilSearchParams& params) {
    const CMFieldData& fld = *params.field;
    SearchPolynomials sp = cm::compute_search_polynomials(fld);
    int i_max = params.i_max ? *params.i_max : compute_i_bound(fld, params.p_max).i_max;
    Collector col{fld, sp, &params.p_max, params.policy, params.sign_set, {}};
    // degenerate |a4| <= 1 solved directly (outside the bound's validity range)
    for (int a4 : {0, 1, -1}) {
        for (int rhs : {1, -1}) {
            for (const Int& a3 : int_quadratic_roots(sp.f2.a, sp.f2.b * a4,
                                                     sp.f2.c * a4 * a4 - rhs)) {
                col.try_pair(Rat(a3), Rat(a4), 0, rhs);
            }
        }
    }
    OrbitBasis ob = orbit_basis(fld);
    for (const OrbitPoint& pt : enumerate_unit_orbit(fld, i_max, ob)) {
        col.try_pair(pt.a3, pt.a4, pt.i, pt.sign);
    }
    return sorted_records(std::move(col.found));
}

VerifyFailure verify_weil_record(const SuperIsolatedWeilRecord& rec, const CMFieldData& fld,
                                 const PrimalityPolicy& policy) {
    if (fld.class_number != 1) return VerifyFailure::class_number;
    QuarticElement pi;
    pi.field = &fld;
    for (int i = 0; i < 4; ++i) pi.coords[i] = Rat(rec.coords[i]);
    if (!pi.is_integral()) return VerifyFailure::non_integral;
    SearchPolynomials sp = cm::compute_search_polynomials(fld);
    if (sp.eval_p0(pi.coords) != 0) return VerifyFailure::p0_nonzero;
    Rat ph = sp.eval_phat(pi.coords);
    if (ph.get_den() != 1 || ph.get_num() != rec.p) return VerifyFailure::p_not_prime;
    if (!is_prime(rec.p, policy)) return VerifyFailure::p_not_prime;
    if (cm::disc_span_trace_only(pi) != fld.delta_k) return VerifyFailure::disc_not_maximal;
    CharPoly cp = cm::char_poly(pi);
    if (!(cp == rec.cp) || cp.p != rec.p) return VerifyFailure::charpoly_mismatch;
    if (cm::group_order(pi) != rec.order) return VerifyFailure::order_mismatch;
    return VerifyFailure::none;
}

std::vector<SuperIsolatedWeilRecord> brute_force_weil_oracle(const CMFieldData& fld,
                                                             long coeff_bound) {
    if (coeff_bound > 200) throw std::invalid_argument("oracle bound capped at 200");
    SearchPolynomials sp = cm::compute_search_polynomials(fld);
    PrimalityPolicy policy = PrimalityPolicy::standard();
    Collector col{fld, sp, nullptr, policy, 0xF, {}};
    for (long a3 = -coeff_bound; a3 <= coeff_bound; ++a3)
        for (long a4 = -coeff_bound; a4 <= coeff_bound; ++a4)
            col.try_pair(Rat(Int(a3)), Rat(Int(a4)), 0, 1);
    auto recs = sorted_records(std::move(col.found));
    std::erase_if(recs, [&](const SuperIsolatedWeilRecord& r) {
        for (const Int& c : r.coords)
            if (abs(c) > coeff_bound) return true;
        return false;
    });
    return recs;
}

ScanSummary scan_all(const std::vector<CMFieldData>& registry, const Int& p_max,
                     const Int& cofactor_max, const Int& r_min, const Int& r_max,
                     int workers) {
    ScanSummary sum;
    sum.fields.resize(registry.size());
    std::vector<std::vector<SuperIsolatedWeilRecord>> results(registry.size());
    std::mutex mu;
    size_t next = 0;
    auto work = [&]() {
        while (true) {
            size_t idx;
            {
                std::lock_guard<std::mutex> lk(mu);
                if (next >= registry.size()) return;
                idx = next++;
            }
            const CMFieldData& fld = registry[idx];
            WeilSearchParams p;
            p.field = &fld;
            p.p_max = p_max;
            BoundCertificate cert = compute_i_bound(fld, p_max);
            p.i_max = cert.i_max;
            auto recs = search(p);
            sum.fields[idx] = FieldScan{fld.id, cert, static_cast<long>(recs.size())};
            results[idx] = std::move(recs);
        }
    };
    int n_threads = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::set<std::tuple<Int, Int, Int, Int>> seen;
    for (auto& rv : results) {
        for (auto& r : rv) {
            auto key = std::make_tuple(r.cp.c3, r.cp.c2, r.cp.c1, r.cp.c0);
            if (seen.insert(key).second) sum.records.push_back(std::move(r));
        }
    }
    sum.total_classes = static_cast<long>(sum.records.size());
    const Int explore_cap = std::max(Int(1000000), cofactor_max);
    for (auto& r : sum.records) {
        auto split = split_near_prime(r.order, explore_cap);
        if (split && split->prime_part >= r_min && split->prime_part <= r_max) {
            r.split = split;
            sum.smallest_cofactors.push_back(split->cofactor);
            if (cofactor_max > 0 && split->cofactor <= cofactor_max)
                sum.filtered.push_back(r);
        }
    }
    std::sort(sum.smallest_cofactors.begin(), sum.smallest_cofactors.end());
    return sum;
}

void write_record(std::ostream& os, const SuperIsolatedWeilRecord& rec) {
    os << "field=" << rec.field_id;
    os << " a1=" << rec.coords[0] << " a2=" << rec.coords[1] << " a3=" << rec.coords[2]
       << " a4=" << rec.coords[3];
    os << " p=" << rec.p;
    os << " c3=" << rec.cp.c3 << " c2=" << rec.cp.c2 << " c1=" << rec.cp.c1
       << " c0=" << rec.cp.c0;
    os << " N=" << rec.order;
    if (rec.split) os << " cofactor=" << rec.split->cofactor << " r=" << rec.split->prime_part;
    os << " i=" << rec.orbit_index << " s_sigma=" << rec.sigma_sign << " s_f1=" << rec.f1_sign;
    os << "\n";
}

SuperIsolatedWeilRecord parse_record(const std::string& line) {
    SuperIsolatedWeilRecord rec;
    std::istringstream ss(line);
    std::string tok;
    Int cof, rr;
    bool has_cof = false, has_r = false;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad record token: " + tok);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "field") rec.field_id = val;
        else if (key == "a1") rec.coords[0] = Int(val);
        else if (key == "a2") rec.coords[1] = Int(val);
        else if (key == "a3") rec.coords[2] = Int(val);
        else if (key == "a4") rec.coords[3] = Int(val);
        else if (key == "p") { rec.p = Int(val); rec.cp.p = rec.p; }
        else if (key == "c3") rec.cp.c3 = Int(val);
        else if (key == "c2") rec.cp.c2 = Int(val);
        else if (key == "c1") rec.cp.c1 = Int(val);
        else if (key == "c0") rec.cp.c0 = Int(val);
        else if (key == "N") rec.order = Int(val);
        else if (key == "cofactor") { cof = Int(val); has_cof = true; }
        else if (key == "r") { rr = Int(val); has_r = true; }
        else if (key == "i") rec.orbit_index = std::stoi(val);
        else if (key == "s_sigma") rec.sigma_sign = std::stoi(val);
        else if (key == "s_f1") rec.f1_sign = std::stoi(val);
        else throw std::invalid_argument("unknown record key: " + key);
    }
    if (has_cof != has_r) throw std::invalid_argument("incomplete cofactor data");
    if (has_cof) rec.split = NearPrimeSplit{cof, rr};
    return rec;
}

}  // namespace siav::weil

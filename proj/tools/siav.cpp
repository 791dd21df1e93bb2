// Command-line front end: curve search/verify/estimate/census, surface
// search/scan-all/verify/bound, and registry inspection.
//
// Exit codes: 0 success, 1 usage error, 2 validation/verification failure.

#include "siav/arith.hpp"
#include "siav/cm_field.hpp"
#include "siav/ec.hpp"
#include "siav/quadratic.hpp"
#include "siav/weil.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

using namespace siav;

namespace {

int fail_usage(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 1;
}

int fail_check(const std::string& msg) {
    std::cerr << "check failed: " << msg << "\n";
    return 2;
}

std::ostream& out_stream(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw CLI::ValidationError("--out", "cannot open " + path);
    return file;
}

std::vector<cm::CMFieldData> load_registry(const std::string& path) {
    return cm::load_field_registry_file(path.empty() ? cm::default_registry_path() : path);
}

const cm::CMFieldData* find_field(const std::vector<cm::CMFieldData>& reg,
                                  const std::string& id) {
    for (const auto& f : reg)
        if (f.id == id) return &f;
    return nullptr;
}

Int pow2(int bits) { return Int(1) << bits; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"super-isolated abelian varieties over prime fields"};
    app.require_subcommand(1);
    std::string registry_path;
    app.add_option("--fields", registry_path, "registry file (default: SIAV_FIELDS or built-in)");

    // ---------------- ec ----------------
    auto* ec_cmd = app.add_subcommand("ec", "super-isolated elliptic curves");
    ec_cmd->require_subcommand(1);

    auto* ec_search = ec_cmd->add_subcommand("search", "search a (p(x), N(x)) family");
    int es_d = 3, es_bits = 128;
    long es_count = 1;
    uint64_t es_seed = 0;
    bool es_seed_set = false;
    std::string es_out;
    ec_search->add_option("--d", es_d, "CM discriminant (3, 19, 43, 67, 163)");
    ec_search->add_option("--bits", es_bits, "bit size of sampled x");
    ec_search->add_option("--count", es_count, "number of records");
    ec_search->add_option("--seed", es_seed, "PRNG seed (required)")->each([&](const std::string&) {
        es_seed_set = true;
    });
    ec_search->add_option("--out", es_out, "output path (default stdout)");

    auto* ec_verify = ec_cmd->add_subcommand("verify", "re-check a curve record file");
    std::string ev_file;
    ec_verify->add_option("file", ev_file, "record file")->required();

    auto* ec_estimate = ec_cmd->add_subcommand("estimate", "Bateman-Horn constants and counts");
    std::string ee_d = "all";
    long ee_bound = 10000000;
    double ee_M = 0;
    ec_estimate->add_option("--d", ee_d, "discriminant or 'all'");
    ec_estimate->add_option("--prime-bound", ee_bound, "Euler product cutoff");
    ec_estimate->add_option("--max-p", ee_M, "also print expected curve count to this bound");

    auto* ec_census = ec_cmd->add_subcommand("census", "isogeny class census for small p");
    long ecs_p = 7;
    ec_census->add_option("--p", ecs_p, "prime, 5 <= p <= 500")->required();

    // ---------------- surface ----------------
    auto* sf = app.add_subcommand("surface", "super-isolated abelian surfaces");
    sf->require_subcommand(1);

    auto* sf_search = sf->add_subcommand("search", "enumerate Weil numbers in one field");
    std::string ss_field;
    std::string ss_pmax;
    int ss_pmax_bits = 0;
    std::string ss_out;
    sf_search->add_option("--field", ss_field, "field id")->required();
    sf_search->add_option("--p-max", ss_pmax, "bound on p");
    sf_search->add_option("--p-max-bits", ss_pmax_bits, "bound on p as 2^bits");
    sf_search->add_option("--out", ss_out, "output path");

    auto* sf_scan = sf->add_subcommand("scan-all", "scan the whole registry");
    int sc_pmax_bits = 261;
    std::string sc_pmax;
    long sc_cof = 0;
    int sc_rmin_bits = 0, sc_rmax_bits = 0, sc_workers = 1;
    std::string sc_out;
    sf_scan->add_option("--p-max-bits", sc_pmax_bits, "bound on p as 2^bits");
    sf_scan->add_option("--p-max", sc_pmax, "bound on p");
    sf_scan->add_option("--cofactor-max", sc_cof, "near-prime filter cofactor bound");
    sf_scan->add_option("--r-min-bits", sc_rmin_bits, "prime part lower bound, bits");
    sf_scan->add_option("--r-max-bits", sc_rmax_bits, "prime part upper bound, bits");
    sf_scan->add_option("--workers", sc_workers, "worker threads");
    sf_scan->add_option("--out", sc_out, "output path");

    auto* sf_verify = sf->add_subcommand("verify", "re-check a Weil record file");
    std::string sv_file;
    sf_verify->add_option("file", sv_file, "record file")->required();

    auto* sf_bound = sf->add_subcommand("bound", "print the termination certificate");
    std::string sb_field;
    int sb_bits = 261;
    std::string sb_pmax;
    sf_bound->add_option("--field", sb_field, "field id")->required();
    sf_bound->add_option("--p-max-bits", sb_bits, "bound on p as 2^bits");
    sf_bound->add_option("--p-max", sb_pmax, "bound on p");

    // ---------------- fields ----------------
    auto* fc = app.add_subcommand("fields", "registry inspection");
    fc->require_subcommand(1);
    auto* f_validate = fc->add_subcommand("validate", "validate every registry record");
    auto* f_list = fc->add_subcommand("list", "list registry fields");
    std::string fl_format = "lines";
    f_list->add_option("--format", fl_format, "lines (default)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ec_search->parsed()) {
            if (!es_seed_set) return fail_usage("ec search requires --seed for reproducibility");
            auto stream = ec::seeded_x_stream(es_seed, es_bits);
            auto recs = ec::search_curves(es_d, stream, es_count);
            std::ofstream f;
            auto& os = out_stream(f, es_out);
            for (const auto& r : recs) ec::write_record(os, r);
            return 0;
        }
        if (ec_verify->parsed()) {
            std::ifstream in(ev_file);
            if (!in) return fail_usage("cannot open " + ev_file);
            std::string line;
            long n = 0;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto rec = ec::parse_curve_record(line);
                auto fam = ec::family_for(rec.d);
                if (fam.eval_p(rec.x) != rec.p || fam.eval_N(rec.x) != rec.N ||
                    fam.trace(rec.x) != rec.t)
                    return fail_check("record " + std::to_string(n) + ": family mismatch");
                if (!is_prime(rec.p) || !is_prime(rec.N))
                    return fail_check("record " + std::to_string(n) + ": p or N not prime");
                if (!ec::is_super_isolated_trace(rec.p, rec.t))
                    return fail_check("record " + std::to_string(n) + ": trace test failed");
                if (!ec::verify_curve_order(rec.curve, rec.N, 20))
                    return fail_check("record " + std::to_string(n) + ": curve order failed");
                ++n;
            }
            std::cout << "verified " << n << " curve records\n";
            return 0;
        }
        if (ec_estimate->parsed()) {
            std::vector<int> ds;
            if (ee_d == "all")
                ds.assign(ec::kSearchableDiscs.begin(), ec::kSearchableDiscs.end());
            else
                ds.push_back(std::stoi(ee_d));
            double sum = 0;
            std::cout << std::fixed << std::setprecision(3);
            for (int d : ds) {
                double C = ec::bateman_horn_constant(d, ee_bound);
                sum += C;
                std::cout << "d=" << d << " C=" << C << "\n";
            }
            if (ds.size() > 1) std::cout << "sum/4=" << sum / 4 << "\n";
            if (ee_M >= 4)
                std::cout << "expected-curves(p<=" << ee_M
                          << ")=" << ec::expected_curve_count(ee_M, ee_bound) << "\n";
            return 0;
        }
        if (ec_census->parsed()) {
            auto census = ec::isogeny_class_census(ecs_p);
            for (auto [t, n] : census) {
                long disc = t * t - 4 * ecs_p;
                std::cout << "t=" << t << " classes=" << n
                          << " H(" << disc << ")=" << quad::kronecker_class_number(disc) << "\n";
            }
            return 0;
        }

        if (sf_search->parsed() || sf_scan->parsed() || sf_bound->parsed() ||
            f_validate->parsed() || f_list->parsed()) {
            std::vector<cm::CMFieldData> reg;
            try {
                reg = load_registry(registry_path);
            } catch (const cm::RegistryError& e) {
                std::cerr << "registry: " << e.what() << "\n";
                return 2;
            }
            if (f_validate->parsed()) {
                std::cout << reg.size() << " fields, 0 failures\n";
                return 0;
            }
            if (f_list->parsed()) {
                for (const auto& f : reg)
                    std::cout << f.id << " delta_k=" << f.delta_k
                              << " delta_f=" << f.delta_f << "\n";
                return 0;
            }
            if (sf_bound->parsed()) {
                const auto* fld = find_field(reg, sb_field);
                if (!fld) return fail_usage("unknown field " + sb_field);
                Int pm = sb_pmax.empty() ? pow2(sb_bits) : Int(sb_pmax);
                auto cert = weil::compute_i_bound(*fld, pm);
                std::cout << "field=" << fld->id << " C0=" << cert.C0
                          << " bracket=" << cert.bracket << " C1=" << cert.C1
                          << " C2=" << cert.C2 << " unit_max_embedding="
                          << cert.unit_max_embedding
                          << " P4_leading=" << cert.P4_leading
                          << " primary_branch_leading=" << cert.primary_branch_leading
                          << " X=" << cert.X << " i_rho=" << cert.i_rho
                          << " i_small=" << cert.i_small << " i_max=" << cert.i_max << "\n";
                return 0;
            }
            if (sf_search->parsed()) {
                const auto* fld = find_field(reg, ss_field);
                if (!fld) return fail_usage("unknown field " + ss_field);
                weil::WeilSearchParams p;
                p.field = fld;
                p.p_max = !ss_pmax.empty() ? Int(ss_pmax)
                                           : pow2(ss_pmax_bits ? ss_pmax_bits : 64);
                auto recs = weil::search(p);
                std::ofstream f;
                auto& os = out_stream(f, ss_out);
                for (const auto& r : recs) weil::write_record(os, r);
                return 0;
            }
            if (sf_scan->parsed()) {
                Int pm = sc_pmax.empty() ? pow2(sc_pmax_bits) : Int(sc_pmax);
                Int rmin = sc_rmin_bits ? pow2(sc_rmin_bits) : Int(0);
                Int rmax = sc_rmax_bits ? pow2(sc_rmax_bits) : pm * pm * 16;
                auto sum = weil::scan_all(reg, pm, Int(sc_cof), rmin, rmax, sc_workers);
                std::ofstream f;
                auto& os = out_stream(f, sc_out);
                for (const auto& fs : sum.fields)
                    os << "# field=" << fs.field_id << " i_max=" << fs.cert.i_max
                       << " records=" << fs.n_records << "\n";
                os << "# total_conjugacy_classes=" << sum.total_classes << "\n";
                if (!sum.smallest_cofactors.empty()) {
                    os << "# smallest_cofactors=";
                    for (size_t i = 0; i < std::min<size_t>(3, sum.smallest_cofactors.size()); ++i)
                        os << (i ? "," : "") << sum.smallest_cofactors[i];
                    os << "\n";
                }
                const auto& emit = (sc_cof > 0) ? sum.filtered : sum.records;
                for (const auto& r : emit) weil::write_record(os, r);
                return 0;
            }
        }
        if (sf_verify->parsed()) {
            auto reg = load_registry(registry_path);
            std::ifstream in(sv_file);
            if (!in) return fail_usage("cannot open " + sv_file);
            std::string line;
            long n = 0;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                auto rec = weil::parse_record(line);
                const auto* fld = find_field(reg, rec.field_id);
                if (!fld) return fail_check("record " + std::to_string(n) + ": unknown field");
                auto res = weil::verify_weil_record(rec, *fld);
                if (res != weil::VerifyFailure::none)
                    return fail_check("record " + std::to_string(n) + ": code " +
                                      std::to_string(static_cast<int>(res)));
                ++n;
            }
            std::cout << "verified " << n << " weil records\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return fail_usage("no subcommand executed");
}

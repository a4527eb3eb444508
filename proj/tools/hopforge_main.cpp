// hopforge: construct, verify and dualize Hopf orders in K[C_p^n] over
// K = F_p(t), run the polynomial identity suite, and survey parameter grids.
//
// Exit codes: 0 success, 1 verification failure, 2 input error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "hopforge/identitylab.hpp"
#include "hopforge/jsonio.hpp"

using namespace hopforge;

namespace {

struct CommonOpts {
    std::string format = "table";
    int degree_cap_flag = 0;
    bool deep = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"json", "table"}));
    cmd->add_option("--degree-cap", c.degree_cap_flag,
                    "abort threshold for polynomial degrees (default 4096)");
    cmd->add_flag("--deep", c.deep, "enable p >= 3, n = 3 full verification");
}

void apply_degree_cap(const CommonOpts& c) {
    if (c.degree_cap_flag != 0) set_degree_cap(c.degree_cap_flag);
    if (const char* env = std::getenv("HOPFORGE_DEGREE_CAP")) {
        int cap = std::atoi(env);
        if (cap <= 0) throw std::invalid_argument("HOPFORGE_DEGREE_CAP must be a positive integer");
        set_degree_cap(cap);
    }
}

void warn_slow_prime(uint32_t p) {
    if (p == 7) std::cerr << "note: p = 7 is supported but the dense kernels are slow\n";
}

void gate_deep(uint32_t p, int n, bool deep) {
    if (p != 2 && n >= 3 && !deep)
        throw std::invalid_argument(
            "full verification at p >= 3, n = 3 is expensive; pass --deep to run it");
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file \"" + path + "\"");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("malformed JSON in \"" + path + "\": " + e.what());
    }
}

void emit(const Json& doc, const std::string& format,
          const std::function<void(std::ostream&)>& table_printer) {
    if (format == "json")
        std::cout << doc.dump(2) << "\n";
    else
        table_printer(std::cout);
}

std::string flag(bool b) { return b ? "ok" : "FAIL"; }

void print_conditions_table(std::ostream& os, const ConditionReport& r) {
    os << "conditions (n = " << r.n << ")\n";
    os << "  i's nonnegative              " << flag(r.nonneg_exponents) << "\n";
    if (r.n >= 2)
        os << "  nu(wp(mu)) >= i2 - p*i1      " << flag(r.wp_mu) << "  [nu = "
           << to_string(r.wp_mu_val) << "]\n";
    if (r.n >= 3) {
        os << "  nu(wp(a)+wp(mu)b) >= i3-p*i1 " << flag(r.wp_alpha_beta) << "  [nu = "
           << to_string(r.wp_alpha_beta_val) << "]\n";
        os << "  nu(wp(beta)) >= i3 - p*i2    " << flag(r.wp_beta) << "  [nu = "
           << to_string(r.wp_beta_val) << "]\n";
        os << "  nu(mu) >= i3 - i1 (mild)     " << flag(r.mild_mu) << "\n";
        os << "  i2 >= i3 (mild)              " << flag(r.mild_degrees) << "\n";
    }
    os << "  main: " << (r.main() ? "pass" : "fail") << "   all: "
       << (r.all() ? "pass" : "fail") << "\n";
}

void print_report_table(std::ostream& os, const VerificationReport& r) {
    os << "verification\n";
    os << "  generically full   " << flag(r.generically_full) << "\n";
    os << "  algebra closed     " << flag(r.algebra_closed) << "\n";
    os << "  comult closed      " << flag(r.comult_closed) << "\n";
    os << "  counit integral    " << flag(r.counit_integral) << "\n";
    os << "  antipode closed    " << flag(r.antipode_closed) << "\n";
    os << "  verdict: " << (r.all_pass() ? "HOPF ORDER" : "NOT CLOSED") << "\n";
    std::size_t shown = 0;
    for (const Witness& w : r.witnesses) {
        if (shown++ == 8) {
            os << "  ... " << r.witnesses.size() - 8 << " more witnesses\n";
            break;
        }
        os << "  witness: " << w.check << " monomials=[";
        for (std::size_t k = 0; k < w.monomials.size(); ++k)
            os << (k ? "," : "") << w.monomials[k];
        os << "] coordinate=" << w.coordinate << " valuation=" << to_string(w.valuation)
           << "\n";
    }
}

// --------------------------------------------------------------------------
// construct

struct ConstructOpts {
    uint32_t p = 2;
    int n = 0;
    std::string family;
    std::string params;
    std::string theta;
    std::string out;
    CommonOpts common;
};

Json parse_params_flag(const std::string& text) {
    Json j = Json::object();
    if (text.empty()) return j;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--params entries must look like key=value");
        std::string key = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        if (key == "i1" || key == "i2" || key == "i3")
            j[key] = std::stoi(value);
        else
            j[key] = value;
    }
    return j;
}

Json parse_theta_flag(const std::string& text, int n) {
    Json rows = Json::array();
    if (text == "identity") {
        if (n == 0) throw std::invalid_argument("--theta identity needs --n");
        for (int r = 0; r < n; ++r) {
            Json row = Json::array();
            for (int c = 0; c < r; ++c) row.push_back("0");
            row.push_back("1");
            rows.push_back(std::move(row));
        }
        return rows;
    }
    std::stringstream ss(text);
    std::string rowtext;
    while (std::getline(ss, rowtext, ';')) {
        Json row = Json::array();
        std::stringstream rs(rowtext);
        std::string entry;
        while (std::getline(rs, entry, ',')) row.push_back(entry);
        rows.push_back(std::move(row));
    }
    return rows;
}

int run_construct(const ConstructOpts& o) {
    apply_degree_cap(o.common);
    warn_slow_prime(o.p);
    if (o.family.empty()) throw std::invalid_argument("construct needs --family");

    Json request;
    request["p"] = o.p;
    if (o.n != 0 && o.family != "koch") request["n"] = o.n;
    request["family"] = o.family;
    if (o.family == "koch") {
        request["theta"] = parse_theta_flag(o.theta, o.n);
    } else {
        if (!o.theta.empty())
            throw std::invalid_argument("--theta only applies to the koch family");
        request["params"] = parse_params_flag(o.params);
    }
    OrderFile file = order_file_from_json(request);

    // koch refusal (non-integral A) surfaces here as an input error
    OrderPresentation pres = realize_order(file);
    (void)pres;

    Json order_json = order_file_to_json(file);
    Json doc;
    if (!o.out.empty()) {
        std::ofstream out(o.out);
        if (!out) throw parse_error("cannot write \"" + o.out + "\"");
        out << order_json.dump(2) << "\n";
        doc["out"] = o.out;
    } else {
        doc["order"] = order_json;
    }

    if (file.params) {
        ConditionReport rep = check_conditions(file.cfg, file.n, *file.params);
        doc["conditions"] = conditions_to_json(rep);
        emit(doc, o.common.format, [&](std::ostream& os) {
            print_conditions_table(os, rep);
            if (o.out.empty()) os << order_json.dump(2) << "\n";
        });
    } else {
        doc["koch_integral"] = true;
        emit(doc, o.common.format, [&](std::ostream& os) {
            os << "A = Theta^{-1}Theta^(p) is integral; order constructed\n";
            if (o.out.empty()) os << order_json.dump(2) << "\n";
        });
    }
    return 0;
}

// --------------------------------------------------------------------------
// verify

struct VerifyOpts {
    std::string file;
    CommonOpts common;
};

int run_verify(const VerifyOpts& o) {
    apply_degree_cap(o.common);
    OrderFile f = order_file_from_json(load_json_file(o.file));
    warn_slow_prime(f.cfg.p());
    gate_deep(f.cfg.p(), f.n, o.common.deep);
    VerificationReport rep = verify_hopf_order(realize_order(f));
    emit(report_to_json(rep), o.common.format,
         [&](std::ostream& os) { print_report_table(os, rep); });
    return rep.all_pass() ? 0 : 1;
}

// --------------------------------------------------------------------------
// dualize-pair

struct DualizePairOpts {
    std::string dual_file;
    std::string primal_file;
    CommonOpts common;
};

int run_dualize_pair(const DualizePairOpts& o) {
    apply_degree_cap(o.common);
    OrderFile df = order_file_from_json(load_json_file(o.dual_file));
    OrderFile pf = order_file_from_json(load_json_file(o.primal_file));
    if (df.ambient != Ambient::dual)
        throw std::invalid_argument("first file must describe a dual-ambient order");
    if (pf.ambient != Ambient::group)
        throw std::invalid_argument("second file must describe a group-ambient order");
    if (df.cfg.p() != pf.cfg.p() || df.n != pf.n)
        throw std::invalid_argument("the two orders live in incompatible ambients");
    warn_slow_prime(df.cfg.p());
    gate_deep(df.cfg.p(), df.n, o.common.deep);

    OrderPresentation dual_order = realize_order(df);
    OrderPresentation primal_order = realize_order(pf);
    OrderPresentation primal_dual = dualize(primal_order);

    bool containment = true;
    for (const AnyElement& m : dual_order.monomial_basis())
        if (!contains(primal_dual, m).contained) {
            containment = false;
            break;
        }
    Valuation disc_dual = discriminant_valuation(dual_order);
    Valuation disc_pd = discriminant_valuation(primal_dual);
    PairingMatrixResult pm = pairing_matrix(dual_order, primal_order);
    bool confirmed = containment && disc_dual == disc_pd && pm.unimodular;

    Json doc;
    doc["containment"] = containment;
    doc["disc_dual"] = to_string(disc_dual);
    doc["disc_primal_dual"] = to_string(disc_pd);
    doc["unimodular"] = pm.unimodular;
    doc["confirmed"] = confirmed;
    emit(doc, o.common.format, [&](std::ostream& os) {
        os << "dual order inside (primal)^*:   " << flag(containment) << "\n";
        os << "disc valuation (dual):          " << to_string(disc_dual) << "\n";
        os << "disc valuation ((primal)^*):    " << to_string(disc_pd) << "\n";
        os << "pairing unimodular:             " << flag(pm.unimodular) << "\n";
        os << "duality " << (confirmed ? "CONFIRMED" : "REFUTED") << "\n";
    });
    return confirmed ? 0 : 1;
}

// --------------------------------------------------------------------------
// enumerate

struct EnumerateOpts {
    uint32_t p = 2;
    int n = 3;
    int bound = 1;
    std::string pool = "0";
    CommonOpts common;
};

int run_enumerate(const EnumerateOpts& o) {
    apply_degree_cap(o.common);
    PrimeConfig cfg(o.p);
    warn_slow_prime(o.p);
    if (o.n < 1 || o.n > 3) throw std::invalid_argument("enumerate supports n in {1,2,3}");
    if (o.bound < 0) throw std::invalid_argument("--grid-bound must be >= 0");
    gate_deep(o.p, o.n, o.common.deep);

    std::vector<std::string> pool_lit;
    std::vector<LocalScalar> pool;
    {
        std::stringstream ss(o.pool);
        std::string item;
        while (std::getline(ss, item, ',')) {
            pool.push_back(scalar_parse(item, cfg));
            pool_lit.push_back(item);
        }
    }
    if (pool.empty()) throw std::invalid_argument("--pool must contain at least one literal");

    struct Row {
        DualFamilyParams pr;
        std::string mu_lit, alpha_lit, beta_lit;
        ConditionReport cond;
        bool dual_pass = false;
        bool primal_ran = false, primal_pass = false;
        Valuation disc = Valuation::infinity();
        std::size_t class_id = 0;
        explicit Row(PrimeConfig c) : pr(c) {}
    };
    std::vector<Row> rows;

    const std::size_t npool = pool.size();
    const std::size_t scalar_axes = o.n == 3 ? 3 : (o.n == 2 ? 1 : 0);
    std::size_t scalar_combos = 1;
    for (std::size_t a = 0; a < scalar_axes; ++a) scalar_combos *= npool;

    for (int i1 = 0; i1 <= o.bound; ++i1)
        for (int i2 = 0; i2 <= (o.n >= 2 ? o.bound : 0); ++i2)
            for (int i3 = 0; i3 <= (o.n >= 3 ? o.bound : 0); ++i3)
                for (std::size_t combo = 0; combo < scalar_combos; ++combo) {
                    Row row(cfg);
                    row.pr.i1 = i1;
                    if (o.n >= 2) row.pr.i2 = i2;
                    if (o.n >= 3) row.pr.i3 = i3;
                    std::size_t rest = combo;
                    if (o.n >= 2) {
                        row.pr.mu = pool[rest % npool];
                        row.mu_lit = pool_lit[rest % npool];
                        rest /= npool;
                    }
                    if (o.n >= 3) {
                        row.pr.alpha = pool[rest % npool];
                        row.alpha_lit = pool_lit[rest % npool];
                        rest /= npool;
                        row.pr.beta = pool[rest % npool];
                        row.beta_lit = pool_lit[rest % npool];
                    }
                    row.cond = check_conditions(cfg, o.n, row.pr);

                    OrderPresentation dual = build_dual_order(cfg, o.n, row.pr);
                    row.dual_pass = verify_hopf_order(dual).all_pass();
                    row.disc = discriminant_valuation(dual);
                    if (row.cond.all()) {
                        row.primal_ran = true;
                        row.primal_pass =
                            verify_hopf_order(build_primal_order(cfg, o.n, row.pr)).all_pass();
                    }
                    rows.push_back(std::move(row));
                }

    // equivalence classes within each cell sharing the non-class parameters
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r].class_id = r;
        for (std::size_t q = 0; q < r; ++q) {
            const Row& a = rows[r];
            const Row& b = rows[q];
            if (a.pr.i1 != b.pr.i1 || a.pr.i2 != b.pr.i2 || a.pr.i3 != b.pr.i3) continue;
            if (o.n == 3) {
                if (!(a.pr.mu == b.pr.mu)) continue;
                if (params_equivalent({a.pr.alpha, a.pr.beta}, {b.pr.alpha, b.pr.beta},
                                      a.pr.mu, a.pr.i1, a.pr.i2, a.pr.i3)) {
                    rows[r].class_id = rows[q].class_id;
                    break;
                }
            } else if (o.n == 2) {
                if (mu_equivalent(a.pr.mu, b.pr.mu, a.pr.i1, a.pr.i2)) {
                    rows[r].class_id = rows[q].class_id;
                    break;
                }
            } else {
                rows[r].class_id = rows[q].class_id; // same i1: same order
                break;
            }
        }
    }

    auto bitmask = [&](const ConditionReport& c) {
        std::string s;
        s += c.nonneg_exponents ? '1' : '0';
        if (o.n >= 2) s += c.wp_mu ? '1' : '0';
        if (o.n >= 3) {
            s += c.wp_alpha_beta ? '1' : '0';
            s += c.wp_beta ? '1' : '0';
            s += c.mild_mu ? '1' : '0';
            s += c.mild_degrees ? '1' : '0';
        }
        return s;
    };

    Json out;
    out["p"] = o.p;
    out["n"] = o.n;
    out["grid_bound"] = o.bound;
    out["pool"] = pool_lit;
    Json jrows = Json::array();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Row& row = rows[r];
        Json jr;
        jr["row"] = r;
        jr["i1"] = row.pr.i1;
        if (o.n >= 2) jr["i2"] = row.pr.i2;
        if (o.n >= 3) jr["i3"] = row.pr.i3;
        if (o.n >= 2) jr["mu"] = row.mu_lit;
        if (o.n >= 3) {
            jr["alpha"] = row.alpha_lit;
            jr["beta"] = row.beta_lit;
        }
        jr["conditions"] = bitmask(row.cond);
        jr["dual_verify"] = row.dual_pass ? "pass" : "fail";
        jr["primal_verify"] = row.primal_ran ? (row.primal_pass ? "pass" : "fail") : "skip";
        jr["disc"] = to_string(row.disc);
        jr["class"] = row.class_id;
        jrows.push_back(std::move(jr));
    }
    out["rows"] = std::move(jrows);

    emit(out, o.common.format, [&](std::ostream& os) {
        os << "row  i's        mu / alpha / beta        cond    dual    primal  disc  class\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const Row& row = rows[r];
            std::ostringstream is;
            is << "(" << row.pr.i1;
            if (o.n >= 2) is << "," << row.pr.i2;
            if (o.n >= 3) is << "," << row.pr.i3;
            is << ")";
            std::ostringstream ps;
            if (o.n >= 2) ps << row.mu_lit;
            if (o.n >= 3) ps << " / " << row.alpha_lit << " / " << row.beta_lit;
            char buf[160];
            std::snprintf(buf, sizeof buf, "%-4zu %-10s %-24s %-7s %-7s %-7s %-5s %zu", r,
                          is.str().c_str(), ps.str().c_str(), bitmask(row.cond).c_str(),
                          row.dual_pass ? "pass" : "fail",
                          row.primal_ran ? (row.primal_pass ? "pass" : "fail") : "skip",
                          to_string(row.disc).c_str(), row.class_id);
            os << buf << "\n";
        }
    });
    return 0;
}

// --------------------------------------------------------------------------
// identities

struct IdentitiesOpts {
    uint32_t p = 2;
    CommonOpts common;
};

int run_identities(const IdentitiesOpts& o) {
    apply_degree_cap(o.common);
    PrimeConfig cfg(o.p);
    warn_slow_prime(o.p);
    bool basic = verify_identity_basic(cfg);
    bool iterated = verify_identity_iterated(cfg);
    bool qsq = verify_q_square(cfg);
    bool all = basic && iterated && qsq;
    Json doc;
    doc["p"] = o.p;
    doc["basic_product_identity"] = basic;
    doc["iterated_product_identity"] = iterated;
    doc["q_square_in_ideal"] = qsq;
    doc["all"] = all;
    emit(doc, o.common.format, [&](std::ostream& os) {
        os << "identity suite, p = " << o.p << "\n";
        os << "  (1+x+y+xy)^[z] product form          " << (basic ? "pass" : "FAIL") << "\n";
        os << "  iterated ^[z]^[a] form               " << (iterated ? "pass" : "FAIL") << "\n";
        os << "  Q(x,y)^2 in (x^p, y^p)               " << (qsq ? "pass" : "FAIL") << "\n";
        os << "  " << (all ? "3/3 pass" : "FAILURES PRESENT") << "\n";
    });
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hopforge: exact Hopf orders in K[C_p^n] over F_p(t)"};
    app.require_subcommand(1);

    ConstructOpts co;
    CLI::App* construct = app.add_subcommand("construct", "build an order file from a family");
    construct->add_option("--p", co.p, "prime (2, 3, 5, 7)")->required();
    construct->add_option("--n", co.n, "rank (needed for --theta identity)");
    construct->add_option("--family", co.family,
                          "tate | e2 | e3 | dual1 | dual2 | dual3 | koch");
    construct->add_option("--params", co.params, "comma-separated key=value parameters");
    construct->add_option("--theta", co.theta,
                          "koch matrix: 'identity' or rows 'a;b,c;d,e,f' (lower triangle)");
    construct->add_option("--out", co.out, "path for the order file (default: stdout)");
    add_common(construct, co.common);

    VerifyOpts vo;
    CLI::App* verify = app.add_subcommand("verify", "check the Hopf order axioms");
    verify->add_option("file", vo.file, "order file")->required();
    add_common(verify, vo.common);

    DualizePairOpts dpo;
    CLI::App* dpair = app.add_subcommand(
        "dualize-pair", "confirm that two orders are linear duals of each other");
    dpair->add_option("dual_file", dpo.dual_file, "dual-ambient order file")->required();
    dpair->add_option("primal_file", dpo.primal_file, "group-ambient order file")->required();
    add_common(dpair, dpo.common);

    EnumerateOpts eo;
    CLI::App* enumerate = app.add_subcommand("enumerate", "survey a parameter grid");
    enumerate->add_option("--p", eo.p, "prime")->required();
    enumerate->add_option("--n", eo.n, "rank (1, 2 or 3)");
    enumerate->add_option("--grid-bound", eo.bound, "exponents range over 0..B");
    enumerate->add_option("--pool", eo.pool, "comma-separated scalar literals");
    add_common(enumerate, eo.common);

    IdentitiesOpts io;
    CLI::App* identities = app.add_subcommand("identities", "run the identity verifiers");
    identities->add_option("--p", io.p, "prime")->required();
    add_common(identities, io.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (construct->parsed()) return run_construct(co);
        if (verify->parsed()) return run_verify(vo);
        if (dpair->parsed()) return run_dualize_pair(dpo);
        if (enumerate->parsed()) return run_enumerate(eo);
        if (identities->parsed()) return run_identities(io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

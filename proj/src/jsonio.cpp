#include "hopforge/jsonio.hpp"

#include <sstream>

namespace hopforge {

namespace {

const Json& require(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw parse_error(std::string("missing key \"") + key + "\"");
    return *it;
}

uint32_t read_p(const Json& j) {
    const Json& v = require(j, "p");
    if (!v.is_number_unsigned()) throw parse_error("\"p\" must be an unsigned integer");
    uint32_t p = v.get<uint32_t>();
    if (p != 2 && p != 3 && p != 5 && p != 7)
        throw parse_error("unsupported prime p = " + std::to_string(p));
    return p;
}

int read_n(const Json& j) {
    const Json& v = require(j, "n");
    if (!v.is_number_integer()) throw parse_error("\"n\" must be an integer");
    int n = v.get<int>();
    if (n < 1 || n > 4) throw parse_error("rank n must satisfy 1 <= n <= 4");
    return n;
}

Ambient read_ambient(const Json& j) {
    const Json& v = require(j, "ambient");
    if (v == "group") return Ambient::group;
    if (v == "dual") return Ambient::dual;
    throw parse_error("\"ambient\" must be \"group\" or \"dual\"");
}

std::string ambient_name(Ambient a) { return a == Ambient::group ? "group" : "dual"; }

std::string exponent_key(const GroupExponent& g) {
    std::string s;
    for (int k = 0; k < g.rank(); ++k) {
        if (k) s += ',';
        s += std::to_string(static_cast<int>(g[k]));
    }
    return s;
}

GroupExponent exponent_from_key(PrimeConfig cfg, int n, const std::string& key) {
    std::vector<uint8_t> digits;
    std::size_t pos = 0;
    while (pos <= key.size()) {
        std::size_t comma = key.find(',', pos);
        std::string piece = key.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (piece.empty() || piece.size() > 1 || piece[0] < '0' || piece[0] > '9')
            throw parse_error("bad exponent tuple \"" + key + "\"");
        digits.push_back(static_cast<uint8_t>(piece[0] - '0'));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (digits.size() != static_cast<std::size_t>(n))
        throw parse_error("exponent tuple \"" + key + "\" has wrong arity");
    for (uint8_t d : digits)
        if (d >= cfg.p()) throw parse_error("exponent digit out of range in \"" + key + "\"");
    return GroupExponent(cfg, std::move(digits));
}

} // namespace

Json element_to_json(const AnyElement& e) {
    return std::visit(
        [&](const auto& x) {
            using E = std::decay_t<decltype(x)>;
            constexpr bool is_group = std::is_same_v<E, GroupAlgebraElement>;
            Json j;
            j["ambient"] = is_group ? "group" : "dual";
            j["p"] = x.cfg().p();
            j["n"] = x.rank();
            Json coeffs = Json::array();
            std::vector<GroupExponent> box = exponent_box(x.cfg(), x.rank());
            for (std::size_t i = 0; i < box.size(); ++i) {
                const LocalScalar& c = x.raw()[i];
                if (c.is_zero()) continue;
                coeffs.push_back(Json::array({exponent_key(box[i]), to_string(c)}));
            }
            j["coeffs"] = std::move(coeffs);
            return j;
        },
        e);
}

AnyElement element_from_json(const Json& j) {
    if (!j.is_object()) throw parse_error("element literal must be an object");
    PrimeConfig cfg(read_p(j));
    int n = read_n(j);
    Ambient ambient = read_ambient(j);
    const Json& coeffs = require(j, "coeffs");
    if (!coeffs.is_array()) throw parse_error("\"coeffs\" must be an array");

    std::size_t dim = 1;
    for (int k = 0; k < n; ++k) dim *= cfg.p();
    std::vector<LocalScalar> raw(dim, LocalScalar::zero(cfg));
    auto ctx_box = exponent_box(cfg, n);
    for (const Json& entry : coeffs) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
            !entry[1].is_string())
            throw parse_error("each coeffs entry must be [\"a1,...,an\", \"scalar\"]");
        GroupExponent g = exponent_from_key(cfg, n, entry[0].get<std::string>());
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) idx = idx * cfg.p() + g[k];
        raw[idx] = scalar_parse(entry[1].get<std::string>(), cfg);
    }
    if (ambient == Ambient::group)
        return GroupAlgebraElement::from_raw(cfg, n, std::move(raw));
    return DualElement::from_raw(cfg, n, std::move(raw));
}

// ---------------------------------------------------------------------------
// order files

namespace {

struct FamilyInfo {
    Ambient ambient;
    int n;
};

std::optional<FamilyInfo> family_info(const std::string& family) {
    if (family == "tate") return FamilyInfo{Ambient::group, 1};
    if (family == "e2") return FamilyInfo{Ambient::group, 2};
    if (family == "e3") return FamilyInfo{Ambient::group, 3};
    if (family == "dual1") return FamilyInfo{Ambient::dual, 1};
    if (family == "dual2") return FamilyInfo{Ambient::dual, 2};
    if (family == "dual3") return FamilyInfo{Ambient::dual, 3};
    return std::nullopt;
}

DualFamilyParams params_from_json(PrimeConfig cfg, int n, const Json& j) {
    if (!j.is_object()) throw parse_error("\"params\" must be an object");
    DualFamilyParams pr(cfg);
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "i1" || key == "i2" || key == "i3") {
            if (!it.value().is_number_integer())
                throw parse_error("\"" + key + "\" must be an integer");
            int v = it.value().get<int>();
            if (key == "i1") pr.i1 = v;
            if (key == "i2") pr.i2 = v;
            if (key == "i3") pr.i3 = v;
            if ((key == "i2" && n < 2) || (key == "i3" && n < 3))
                throw parse_error("\"" + key + "\" is not a rank-" + std::to_string(n) +
                                  " parameter");
        } else if (key == "mu" || key == "alpha" || key == "beta") {
            if (!it.value().is_string())
                throw parse_error("\"" + key + "\" must be a scalar literal string");
            LocalScalar v = scalar_parse(it.value().get<std::string>(), cfg);
            if (key == "mu") pr.mu = v;
            if (key == "alpha") pr.alpha = v;
            if (key == "beta") pr.beta = v;
            if ((key == "mu" && n < 2) || (key != "mu" && n < 3))
                throw parse_error("\"" + key + "\" is not a rank-" + std::to_string(n) +
                                  " parameter");
        } else {
            throw parse_error("unknown parameter \"" + key + "\"");
        }
    }
    return pr;
}

Json params_to_json(int n, const DualFamilyParams& pr) {
    Json j;
    j["i1"] = pr.i1;
    if (n >= 2) j["i2"] = pr.i2;
    if (n >= 3) j["i3"] = pr.i3;
    if (n >= 2) j["mu"] = to_string(pr.mu);
    if (n >= 3) {
        j["alpha"] = to_string(pr.alpha);
        j["beta"] = to_string(pr.beta);
    }
    return j;
}

Mat theta_from_json(PrimeConfig cfg, const Json& j) {
    if (!j.is_array() || j.empty() || j.size() > 4)
        throw parse_error("\"theta\" must be an array of 1..4 rows");
    const std::size_t n = j.size();
    Mat m = Mat::zeros(cfg, n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || row.size() != r + 1)
            throw parse_error("\"theta\" row " + std::to_string(r + 1) + " must have " +
                              std::to_string(r + 1) + " entries (lower triangle)");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!row[c].is_string()) throw parse_error("theta entries must be scalar strings");
            m.at(r, c) = scalar_parse(row[c].get<std::string>(), cfg);
        }
    }
    return m;
}

Json theta_to_json(const Mat& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c <= r; ++c) row.push_back(to_string(m.at(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

OrderFile order_file_from_json(const Json& j) {
    if (!j.is_object()) throw parse_error("order file must be a JSON object");
    PrimeConfig cfg(read_p(j));
    OrderFile f(cfg);

    std::string family = j.contains("family") ? require(j, "family").get<std::string>() : "";
    f.family = family;

    if (family == "koch") {
        f.theta = theta_from_json(cfg, require(j, "theta"));
        f.n = static_cast<int>(f.theta->rows);
        f.ambient = Ambient::dual;
        if (j.contains("n") && read_n(j) != f.n) throw parse_error("\"n\" contradicts theta");
        if (j.contains("ambient") && read_ambient(j) != Ambient::dual)
            throw parse_error("the koch construction lives in the dual ambient");
        return f;
    }

    if (!family.empty()) {
        auto info = family_info(family);
        if (!info) throw parse_error("unknown family \"" + family + "\"");
        f.ambient = info->ambient;
        f.n = info->n;
        if (j.contains("n") && read_n(j) != f.n) throw parse_error("\"n\" contradicts family");
        if (j.contains("ambient") && read_ambient(j) != f.ambient)
            throw parse_error("\"ambient\" contradicts family");
        f.params = params_from_json(cfg, f.n, j.contains("params") ? require(j, "params")
                                                                   : Json::object());
        return f;
    }

    f.n = read_n(j);
    f.ambient = read_ambient(j);
    bool has_gens = j.contains("generators");
    bool has_basis = j.contains("basis");
    if (has_gens == has_basis)
        throw parse_error(
            "an order file needs exactly one of \"family\", \"generators\" or \"basis\"");
    const Json& list = has_gens ? require(j, "generators") : require(j, "basis");
    if (!list.is_array()) throw parse_error("element list must be an array");
    std::vector<AnyElement> elems;
    for (const Json& ej : list) {
        AnyElement e = element_from_json(ej);
        std::visit(
            [&](const auto& x) {
                if (x.cfg().p() != cfg.p() || x.rank() != f.n)
                    throw parse_error("element rank/prime disagrees with the order file");
            },
            e);
        elems.push_back(std::move(e));
    }
    if (has_gens)
        f.generators = std::move(elems);
    else
        f.basis = std::move(elems);
    return f;
}

Json order_file_to_json(const OrderFile& f) {
    Json j;
    j["p"] = f.cfg.p();
    j["n"] = f.n;
    j["ambient"] = ambient_name(f.ambient);
    if (!f.family.empty()) j["family"] = f.family;
    if (f.theta) j["theta"] = theta_to_json(*f.theta);
    if (f.params) j["params"] = params_to_json(f.n, *f.params);
    if (!f.generators.empty()) {
        Json arr = Json::array();
        for (const AnyElement& e : f.generators) arr.push_back(element_to_json(e));
        j["generators"] = std::move(arr);
    }
    if (!f.basis.empty()) {
        Json arr = Json::array();
        for (const AnyElement& e : f.basis) arr.push_back(element_to_json(e));
        j["basis"] = std::move(arr);
    }
    return j;
}

OrderPresentation realize_order(const OrderFile& f) {
    if (f.family == "koch") return koch_order(ThetaMatrix(f.cfg, *f.theta));
    if (!f.family.empty()) {
        if (f.ambient == Ambient::group) return build_primal_order(f.cfg, f.n, *f.params);
        return build_dual_order(f.cfg, f.n, *f.params);
    }
    if (!f.generators.empty())
        return OrderPresentation::from_generators(f.ambient, f.cfg, f.n, f.generators);
    return OrderPresentation::from_basis(f.ambient, f.cfg, f.n, f.basis);
}

// ---------------------------------------------------------------------------
// reports

Json conditions_to_json(const ConditionReport& r) {
    Json j;
    j["n"] = r.n;
    j["nonneg_exponents"] = r.nonneg_exponents;
    if (r.n >= 2) {
        j["wp_mu"] = r.wp_mu;
        j["wp_mu_valuation"] = to_string(r.wp_mu_val);
    }
    if (r.n >= 3) {
        j["wp_alpha_beta"] = r.wp_alpha_beta;
        j["wp_alpha_beta_valuation"] = to_string(r.wp_alpha_beta_val);
        j["wp_beta"] = r.wp_beta;
        j["wp_beta_valuation"] = to_string(r.wp_beta_val);
        j["mild_mu"] = r.mild_mu;
        j["mild_i2_ge_i3"] = r.mild_degrees;
    }
    j["main"] = r.main();
    j["all"] = r.all();
    return j;
}

Json report_to_json(const VerificationReport& r) {
    Json j;
    j["all_pass"] = r.all_pass();
    j["algebra_closed"] = r.algebra_closed;
    j["comult_closed"] = r.comult_closed;
    j["counit_integral"] = r.counit_integral;
    j["antipode_closed"] = r.antipode_closed;
    j["generically_full"] = r.generically_full;
    Json ws = Json::array();
    for (const Witness& w : r.witnesses) {
        Json wj;
        wj["check"] = w.check;
        wj["monomials"] = w.monomials;
        wj["coordinate"] = w.coordinate;
        wj["valuation"] = to_string(w.valuation);
        ws.push_back(std::move(wj));
    }
    j["witnesses"] = std::move(ws);
    return j;
}

} // namespace hopforge

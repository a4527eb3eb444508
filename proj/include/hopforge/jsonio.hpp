#ifndef HOPFORGE_JSONIO_HPP
#define HOPFORGE_JSONIO_HPP

// JSON wire formats: element literals, order files, condition and
// verification reports.  Serialization is deterministic (insertion-ordered
// keys, canonical scalar printing) so identical runs emit identical bytes.

#include <json.hpp>
#include <optional>
#include <string>

#include "hopforge/orders.hpp"

namespace hopforge {

using Json = nlohmann::ordered_json;

// {"ambient":"group","p":2,"n":3,"coeffs":[["a1,a2,a3","scalar"],...]}
Json element_to_json(const AnyElement& e);
AnyElement element_from_json(const Json& j);

/// A parsed order file: either a named family with parameters, a triangular
/// matrix for the dual-side construction, or explicit generators / basis.
struct OrderFile {
    PrimeConfig cfg;
    int n = 1;
    Ambient ambient = Ambient::dual;
    std::string family; // tate | e2 | e3 | dual1 | dual2 | dual3 | koch | ""
    std::optional<DualFamilyParams> params;
    std::optional<Mat> theta;
    std::vector<AnyElement> generators;
    std::vector<AnyElement> basis;

    explicit OrderFile(PrimeConfig cfg) : cfg(cfg) {}
};

OrderFile order_file_from_json(const Json& j);
Json order_file_to_json(const OrderFile& f);
/// build the presentation an order file describes
OrderPresentation realize_order(const OrderFile& f);

Json conditions_to_json(const ConditionReport& r);
Json report_to_json(const VerificationReport& r);

} // namespace hopforge

#endif

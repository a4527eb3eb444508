#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "hopforge/jsonio.hpp"
#include "test_util.hpp"

using namespace hopforge;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// JSON round trips (library level)

TEST_CASE("element JSON round trip") {
    for (uint32_t p : {2u, 3u}) {
        PrimeConfig cfg(p);
        std::mt19937_64 rng(500 + p);
        for (int n : {1, 2, 3}) {
            std::size_t dim = 1;
            for (int k = 0; k < n; ++k) dim *= p;
            std::vector<LocalScalar> raw;
            for (std::size_t i = 0; i < dim; ++i)
                raw.push_back(hftest::random_laurent(rng, cfg, 2, 2));
            AnyElement g = GroupAlgebraElement::from_raw(cfg, n, raw);
            AnyElement d = DualElement::from_raw(cfg, n, raw);
            CHECK(std::get<GroupAlgebraElement>(element_from_json(element_to_json(g))) ==
                  std::get<GroupAlgebraElement>(g));
            CHECK(std::get<DualElement>(element_from_json(element_to_json(d))) ==
                  std::get<DualElement>(d));
        }
    }
}

TEST_CASE("element JSON rejects malformed input") {
    CHECK_THROWS_AS(element_from_json(Json::parse(R"({"p":2,"n":2,"coeffs":[]})")),
                    parse_error);
    CHECK_THROWS_AS(
        element_from_json(Json::parse(
            R"({"ambient":"group","p":2,"n":2,"coeffs":[["0,5","1"]]})")),
        parse_error);
    CHECK_THROWS_AS(
        element_from_json(Json::parse(
            R"({"ambient":"group","p":2,"n":2,"coeffs":[["0,1,0","1"]]})")),
        parse_error);
    CHECK_THROWS_AS(
        element_from_json(Json::parse(
            R"({"ambient":"group","p":2,"n":2,"coeffs":[["0,1","t+"]]})")),
        parse_error);
}

TEST_CASE("order file round trip and realize") {
    PrimeConfig p2(2);
    Json file = Json::parse(R"({
        "p": 2, "n": 3, "ambient": "dual", "family": "dual3",
        "params": {"i1": 2, "i2": 1, "i3": 1, "mu": "1/t", "alpha": "1/t", "beta": "1"}
    })");
    OrderFile f = order_file_from_json(file);
    CHECK(f.family == "dual3");
    CHECK(f.n == 3);
    CHECK(f.ambient == Ambient::dual);
    CHECK(order_file_from_json(order_file_to_json(f)).params->mu == scalar_parse("1/t", p2));

    OrderPresentation direct = realize_order(f);
    DualFamilyParams pr(p2);
    pr.i1 = 2;
    pr.i2 = 1;
    pr.i3 = 1;
    pr.mu = scalar_parse("1/t", p2);
    pr.alpha = scalar_parse("1/t", p2);
    pr.beta = scalar_parse("1", p2);
    CHECK(orders_equal(direct, build_dual_order(p2, 3, pr)));

    // explicit generators round trip through the same presentation
    OrderFile g(p2);
    g.n = 3;
    g.ambient = Ambient::dual;
    for (const AnyElement& e : direct.generators()) g.generators.push_back(e);
    OrderFile g2 = order_file_from_json(order_file_to_json(g));
    CHECK(orders_equal(realize_order(g2), direct));

    // contradictions are rejected
    Json wrong = file;
    wrong["ambient"] = "group";
    CHECK_THROWS_AS(order_file_from_json(wrong), parse_error);
    Json unknown = file;
    unknown["family"] = "dual9";
    CHECK_THROWS_AS(order_file_from_json(unknown), parse_error);
    Json badparam = file;
    badparam["params"]["gamma"] = "1";
    CHECK_THROWS_AS(order_file_from_json(badparam), parse_error);
}

// ---------------------------------------------------------------------------
// CLI behavior through the installed binary

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("HOPFORGE_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "HOPFORGE_BIN must point at the CLI binary");
    std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, k);
    int status = pclose(f);
    r.exit_code = WEXITSTATUS(status);
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hopforge-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const char* name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("cli: construct/verify exit contract") {
    TempDir tmp;
    std::string e3 = tmp.file("e3.json");

    RunResult c = run_cli("construct --family e3 --p 2 "
                          "--params i1=2,i2=1,i3=1,mu=1/t,alpha=1/t,beta=1 --format json --out " +
                          e3);
    CHECK(c.exit_code == 0);
    Json doc = Json::parse(c.out);
    CHECK(doc["conditions"]["all"] == true);

    CHECK(run_cli("verify " + e3).exit_code == 0);

    // violating dual-2 tuple: exit 1 and a negative algebra witness
    std::string bad = tmp.file("bad.json");
    CHECK(run_cli("construct --family dual2 --p 2 --params i1=1,i2=3,mu=1/t --out " + bad)
              .exit_code == 0);
    RunResult v = run_cli("verify " + bad + " --format json");
    CHECK(v.exit_code == 1);
    Json rep = Json::parse(v.out);
    CHECK(rep["all_pass"] == false);
    CHECK(rep["algebra_closed"] == false);
    bool saw_negative = false;
    for (const auto& w : rep["witnesses"])
        if (w["check"] == "algebra" && w["valuation"].get<std::string>().starts_with("-"))
            saw_negative = true;
    CHECK(saw_negative);

    // input errors: exit 2
    CHECK(run_cli("verify " + tmp.file("missing.json")).exit_code == 2);
    std::ofstream(tmp.file("mal.json")) << "{\"p\": 2";
    CHECK(run_cli("verify " + tmp.file("mal.json")).exit_code == 2);
    CHECK(run_cli("construct --family bogus --p 2").exit_code == 2);
    CHECK(run_cli("construct --family dual2 --p 2 --params i1=1,mu=t+").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("construct --family koch --p 2 --theta 1/t").exit_code == 2);
}

TEST_CASE("cli: conditions report does not block construction") {
    TempDir tmp;
    RunResult c = run_cli("construct --family dual2 --p 3 --params i1=0,i2=5,mu=1/t "
                          "--format json --out " +
                          tmp.file("o.json"));
    CHECK(c.exit_code == 0);
    Json doc = Json::parse(c.out);
    CHECK(doc["conditions"]["wp_mu"] == false);
    CHECK(doc["conditions"]["main"] == false);
}

TEST_CASE("cli: dualize-pair") {
    TempDir tmp;
    std::string d = tmp.file("d.json"), e = tmp.file("e.json"), d2 = tmp.file("d2.json");
    REQUIRE(run_cli("construct --family dual3 --p 2 --params i1=1,i2=1,i3=1 --out " + d)
                .exit_code == 0);
    REQUIRE(run_cli("construct --family e3 --p 2 --params i1=1,i2=1,i3=1 --out " + e)
                .exit_code == 0);
    RunResult ok = run_cli("dualize-pair " + d + " " + e + " --format json");
    CHECK(ok.exit_code == 0);
    Json doc = Json::parse(ok.out);
    CHECK(doc["confirmed"] == true);
    CHECK(doc["disc_dual"] == "24");
    CHECK(doc["disc_primal_dual"] == "24");
    CHECK(doc["unimodular"] == true);

    // mismatched pair: discriminants 32 vs 24, exit 1
    REQUIRE(run_cli("construct --family dual3 --p 2 "
                    "--params i1=2,i2=1,i3=1,mu=1/t,alpha=1/t,beta=1 --out " +
                    d2)
                .exit_code == 0);
    RunResult refuted = run_cli("dualize-pair " + d2 + " " + e + " --format json");
    CHECK(refuted.exit_code == 1);
    Json rdoc = Json::parse(refuted.out);
    CHECK(rdoc["confirmed"] == false);
    CHECK(rdoc["disc_dual"] == "32");
    CHECK(rdoc["disc_primal_dual"] == "24");
}

TEST_CASE("cli: identities") {
    CHECK(run_cli("identities --p 2").exit_code == 0);
    CHECK(run_cli("identities --p 5 --format json").exit_code == 0);
}

TEST_CASE("cli: enumerate semantics and the deep gate") {
    RunResult r = run_cli("enumerate --p 2 --n 3 --grid-bound 1 --pool 0,1,1/t --format json");
    CHECK(r.exit_code == 0);
    Json doc = Json::parse(r.out);
    bool saw_all_zero = false;
    for (const auto& row : doc["rows"]) {
        // conditions all true ==> both verifications pass
        if (row["conditions"] == "111111") {
            CHECK(row["dual_verify"] == "pass");
            CHECK(row["primal_verify"] == "pass");
        }
        if (row["i1"] == 0 && row["i2"] == 0 && row["i3"] == 0 && row["mu"] == "0" &&
            row["alpha"] == "0" && row["beta"] == "0") {
            saw_all_zero = true;
            CHECK(row["disc"] == "0");
            CHECK(row["class"] == 0);
        }
    }
    CHECK(saw_all_zero);

    // (m mu, -m) shares its class with (0, 0)
    std::size_t class_of_zero = 0, class_of_pair = 1;
    for (const auto& row : doc["rows"]) {
        if (row["i1"] != 1 || row["i2"] != 1 || row["i3"] != 1 || row["mu"] != "1/t") continue;
        if (row["alpha"] == "0" && row["beta"] == "0")
            class_of_zero = row["class"].get<std::size_t>();
        if (row["alpha"] == "1/t" && row["beta"] == "1")
            class_of_pair = row["class"].get<std::size_t>();
    }
    CHECK(class_of_zero == class_of_pair);

    CHECK(run_cli("enumerate --p 3 --n 3 --grid-bound 0 --pool 0").exit_code == 2);
    CHECK(run_cli("enumerate --p 2 --n 3 --grid-bound 0 --pool \"\"").exit_code == 2);

    // verify is gated the same way, and --deep opens it
    TempDir tmp;
    std::string d3 = tmp.file("d3.json");
    REQUIRE(run_cli("construct --family dual3 --p 3 --params i1=0,i2=0,i3=0 --out " + d3)
                .exit_code == 0);
    CHECK(run_cli("verify " + d3).exit_code == 2);
    CHECK(run_cli("verify " + d3 + " --deep").exit_code == 0);
}

TEST_CASE("cli: byte-identical reruns") {
    TempDir tmp;
    std::string args = "construct --family dual3 --p 2 "
                       "--params i1=2,i2=1,i3=1,mu=1/t,alpha=1/t,beta=1 --format json --out " +
                       tmp.file("a.json");
    RunResult r1 = run_cli(args);
    RunResult r2 = run_cli(args);
    CHECK(r1.exit_code == 0);
    CHECK(r1.out == r2.out);

    RunResult e1 = run_cli("enumerate --p 2 --n 2 --grid-bound 1 --pool 0,1/t --format json");
    RunResult e2 = run_cli("enumerate --p 2 --n 2 --grid-bound 1 --pool 0,1/t --format json");
    CHECK(e1.exit_code == 0);
    CHECK(e1.out == e2.out);
}

TEST_CASE("cli: golden output format") {
    RunResult r = run_cli("construct --family dual2 --p 2 --params i1=1,i2=1,mu=1/t "
                          "--format json");
    CHECK(r.exit_code == 0);
    const char* golden = R"({
  "order": {
    "p": 2,
    "n": 2,
    "ambient": "dual",
    "family": "dual2",
    "params": {
      "i1": 1,
      "i2": 1,
      "mu": "1/t"
    }
  },
  "conditions": {
    "n": 2,
    "nonneg_exponents": true,
    "wp_mu": false,
    "wp_mu_valuation": "-2",
    "main": false,
    "all": false
  }
}
)";
    CHECK(r.out == golden);
}

TEST_CASE("cli: degree cap from the environment wins") {
    const char* bin = std::getenv("HOPFORGE_BIN");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string("HOPFORGE_DEGREE_CAP=3 ") + bin +
                      " construct --family dual2 --p 2 --params i1=0,i2=0,mu=t^9 2>/dev/null";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
}

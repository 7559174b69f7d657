#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "harmrep/cli.hpp"
#include "harmrep/config.hpp"
#include "harmrep/errors.hpp"
#include "support.hpp"

using namespace harmrep;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "harmrep");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return dispatch(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("harmrep-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

const char* kConic = R"({
  "curve": {"coefficients": [
    {"exponent": [0, 2, 0], "coefficient": 1},
    {"exponent": [0, 0, 2], "coefficient": 1},
    {"exponent": [2, 0, 0], "coefficient": -1}]},
  "domain": {"radius": 2}
})";

}  // namespace

TEST_CASE("config defaults and fingerprint") {
    const RunConfig c = parse_config(kConic);
    CHECK(c.n_theta == 256);
    CHECK(c.epsilons == std::vector<double>{0.04, 0.02, 0.01});
    CHECK(c.grid.n_phi == 32);
    CHECK(c.psi == PsiMode::exact);
    CHECK(c.hmode == HMode::automatic);
    CHECK(c.extrapolation_power == 2);
    CHECK(config_curve(c).degree() == 2);
    // whitespace and key order do not change the fingerprint; a value does
    const RunConfig d = parse_config(R"({"domain":{"radius":2.0},"curve":{"coefficients":[
        {"coefficient":-1,"exponent":[2,0,0]},{"exponent":[0,0,2],"coefficient":[1,0]},
        {"exponent":[0,2,0],"coefficient":1}]}})");
    CHECK(c.fingerprint == d.fingerprint);
    CHECK(c.canonical == d.canonical);
    nlohmann::json j = nlohmann::json::parse(kConic);
    j["quad"]["epsilons"] = {0.04, 0.02};
    CHECK(parse_config(j.dump()).fingerprint != c.fingerprint);
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
}

TEST_CASE("config errors name the field") {
    nlohmann::json j = nlohmann::json::parse(kConic);
    j["domain"]["radius"] = -1.0;
    CHECK(error_of(j.dump()).find("domain.radius") != std::string::npos);

    j = nlohmann::json::parse(kConic);
    j["curve"]["coefficients"].push_back({{"exponent", {0, 2, 0}}, {"coefficient", 3}});
    const std::string dup = error_of(j.dump());
    CHECK(dup.find("duplicate exponent (0,2,0)") != std::string::npos);
    CHECK(dup.find("[0]") != std::string::npos);
    CHECK(dup.find("[3]") != std::string::npos);

    j = nlohmann::json::parse(kConic);
    j["quad"]["gird"] = "8x8x8";
    CHECK(error_of(j.dump()).find("quad.gird: unknown key") != std::string::npos);

    j = nlohmann::json::parse(kConic);
    j["quad"]["epsilons"] = {0.01, 0.02};
    CHECK(error_of(j.dump()).find("quad.epsilons") != std::string::npos);

    const std::string syntax = error_of("{\n  \"domain\": {\"radius\": 2,}\n}");
    CHECK(syntax.find("line 2") != std::string::npos);
    CHECK(syntax.find("column") != std::string::npos);

    CHECK(error_of(R"({"domain": {"radius": 2}})").find("curve") != std::string::npos);
}

TEST_CASE("hefer subcommand and usage errors") {
    const fs::path dir = scratch("hefer");
    std::ofstream(dir / "conic.json") << kConic;
    CHECK(run({"hefer", "--config", (dir / "conic.json").string(), "--pairs", "200"}) == 0);
    CHECK(run({}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"reconstruct"}) == 2);
    CHECK(run({"hefer", "--config", (dir / "missing.json").string()}) == 2);
    CHECK(run({"scenario", "run", "no-such"}) == 2);
}

TEST_CASE("reports are byte-identical across worker counts") {
    // io.out is part of the fingerprinted config, so both runs share one output directory
    const fs::path dir = scratch("workers");
    const fs::path run_dir = dir / "line-rational";
    auto with = [&](const std::string& workers) {
        REQUIRE(run({"--workers", workers, "scenario", "--out-dir", dir.string(), "run", "line-rational"}) == 0);
        return std::pair{slurp(run_dir / "report.json"), slurp(run_dir / "convergence.csv")};
    };
    const auto one = with("1");
    const auto three = with("3");
    CHECK_FALSE(one.first.empty());
    CHECK(one.first == three.first);
    CHECK(one.second == three.second);
}

TEST_CASE("exported boundary data reproduces the scenario run") {
    const fs::path dir = scratch("export");
    REQUIRE(run({"scenario", "--out-dir", dir.string(), "export", "conic-log"}) == 0);
    REQUIRE(run({"scenario", "--out-dir", dir.string(), "run", "conic-log"}) == 0);
    const auto ref = nlohmann::json::parse(slurp(dir / "conic-log" / "report.json"));
    const fs::path cfg = dir / "conic-log" / "data" / "config.json";
    const fs::path out = dir / "from-data.json";
    REQUIRE(run({"reconstruct", "--config", cfg.string(), "--point", "0.3,0.2,0", "--out", out.string()}) == 0);
    const auto rep = nlohmann::json::parse(slurp(out));
    REQUIRE(rep["points"].size() >= 1);
    CHECK(rep["points"][0]["u_rec"].get<double>() ==
          doctest::Approx(ref["points"][0]["u_rec"].get<double>()).epsilon(1e-9));
    CHECK_FALSE(rep["points"][0].contains("u_oracle"));
}

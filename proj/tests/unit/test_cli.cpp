#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <sys/wait.h>

#include "simquant/config.hpp"
#include "simquant/errors.hpp"
#include "simquant/verify.hpp"

using namespace simquant;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const char* exe = std::getenv("SIMQUANT_CLI");
    REQUIRE_MESSAGE(exe != nullptr, "SIMQUANT_CLI is not set");
    const std::string cmd = std::string(exe) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::BadRange;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
    const RunConfig c = parse_config_text("");
    CHECK(c.weight == "cs");
    CHECK(c.alpha == 3.0);
    CHECK(c.grid_n_r == 256);
    CHECK(c.grid_n_theta == 64);
    CHECK(c.suite == "all");
}

TEST_CASE("config pairs, comments and tolerance prefixes") {
    const RunConfig c = parse_config_text("weight=inversion observable=p2  # comment\n\ntolerance.acs=1e-3\n"
                                          "tolerance.acs.gradient=1e-6 seed=7\n");
    CHECK(c.weight == "inversion");
    CHECK(c.observable == "p2");
    CHECK(c.seed == 7u);
    CHECK(c.tolerance("acs.gradient", 1.0) == 1e-6);
    CHECK(c.tolerance("acs.laplacian", 1.0) == 1e-3);
    CHECK(c.tolerance("group.haar", 0.5) == 0.5);
}

TEST_CASE("config errors name the line or the violated bound") {
    CHECK(kind_of([] { parse_config_text("alpha=1.5"); }) == ErrorKind::ValidationError);
    try {
        parse_config_text("alpha=1.5");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("alpha > 2") != std::string::npos);
    }
    try {
        parse_config_text("seed=1\nbogus=3\n");
        FAIL("unknown key accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK(kind_of([] { parse_config_text("alpha=abc"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_config_text("tolerance.acs=-1"); }) == ErrorKind::ValidationError);
    CHECK(parse_config_text("weight=inversion alpha=1.5").alpha == 1.5);
}

TEST_CASE("suite selection") {
    RunConfig c;
    CHECK(selected_suites(c).size() == suite_names().size());
    c.suite = "acs,twosheet";
    CHECK(selected_suites(c) == std::vector<std::string>{"acs", "twosheet"});
    c.suite = "acs,nope";
    CHECK(kind_of([&] { selected_suites(c); }) == ErrorKind::ParseError);
    c.suite = "acs";
    const Report r = run_verify(c);
    for (const auto& chk : r.checks) {
        CHECK(chk.suite == "acs");
        CHECK(!chk.ref.empty());
    }
}

TEST_CASE("verify report, exit codes and determinism") {
    const RunResult a = run_cli("verify --suite weights --seed 3");
    CHECK(a.code == 0);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["pass"] == true);
    CHECK(j["seed"] == 3);
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("name"));
        CHECK(c.contains("ref"));
        CHECK(c.contains("tolerance"));
    }
    CHECK(run_cli("verify --suite weights --seed 3").out == a.out);

    const RunResult tight = run_cli("verify --suite weights --set tolerance.weights=1e-15");
    CHECK(tight.code == 1);
    CHECK(nlohmann::json::parse(tight.out)["pass"] == false);

    CHECK(run_cli("verify --alpha 1.5").code == 2);
    CHECK(run_cli("verify --suite nope").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("subcommands write their files") {
    const fs::path dir = fs::temp_directory_path() / "simquant_cli_test";
    fs::remove_all(dir);
    const std::string out = " --out " + dir.string();
    CHECK(run_cli("acs" + out).code == 0);
    CHECK(nlohmann::json::parse(std::ifstream(dir / "acs.json"))["K"].get<double>() > 0.0);
    CHECK(run_cli("quantize --weight inversion --observable qdotp" + out).code == 0);
    CHECK(fs::exists(dir / "coeffs.json"));
    CHECK(run_cli("quantize --observable p --emit matrix.csv --n-max 1 --m-max 1" + out).code == 0);
    std::ifstream m(dir / "matrix.csv");
    std::string header;
    std::getline(m, header);
    CHECK(header == "n,m,n',m',Re,Im");
    CHECK(run_cli("basis --n-max 1 --m-max 0" + out).code == 0);
    CHECK(fs::exists(dir / "basis.csv"));
    CHECK(run_cli("portrait --weight inversion" + out).code == 2);
    fs::remove_all(dir);
}

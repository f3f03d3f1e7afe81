#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hartree/cli.hpp"
#include "hartree/errors.hpp"

using namespace hartree;
namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* p = std::getenv("HARTREE_CLI");
    REQUIRE_MESSAGE(p != nullptr, "HARTREE_CLI must point at the hartree executable");
    return p;
}

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + cli() + " " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("hartree_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string source_dir() {
    fs::path here = fs::path(__FILE__).parent_path().parent_path();
    return here.string();
}

}  // namespace

TEST_CASE("csv formatting") {
    Table t{"x", {"a", "b"}, {{1.0, 0.1}, {-2.5, 1e-300}}};
    CHECK(to_csv(t) == "a,b\n1,0.1\n-2.5,1e-300\n");
}

TEST_CASE("nondegeneracy command") {
    const CommandResult r = cmd_nondegeneracy(9, 8.0, 20);
    CHECK(r.exit_code == exit_pass);
    CHECK(r.report["schema_version"] == kSchemaVersion);
    CHECK(r.report["status"] == "pass");
    CHECK(r.report.contains("timing"));
    REQUIRE(r.tables.size() == 1);
    CHECK(r.tables[0].rows.size() == 21);
    CHECK(std::abs(r.tables[0].rows[1][3] - 1.0) < 1e-10);
    CHECK_THROWS_AS(cmd_nondegeneracy(8, 4.0, 20), DomainError);
    CHECK_THROWS_AS(cmd_nondegeneracy(9, 9.0, 20), DomainError);
}

TEST_CASE("report body is deterministic") {
    const json a = strip_timing(cmd_stability(9, 8.0, 2, {1e-1, 1e-2}, false).report);
    const json b = strip_timing(cmd_stability(9, 8.0, 2, {1e-1, 1e-2}, false).report);
    CHECK(a.dump() == b.dump());
    CHECK_FALSE(a.contains("timing"));
}

TEST_CASE("report directory resolution") {
    CHECK(resolve_report_dir(std::string("x")) == "x");
    ::setenv("HARTREE_REPORT_DIR", "from_env", 1);
    CHECK(resolve_report_dir(std::nullopt) == "from_env");
    CHECK(resolve_report_dir(std::string("flag")) == "flag");
    ::unsetenv("HARTREE_REPORT_DIR");
    CHECK(resolve_report_dir(std::nullopt) == "reports");
}

TEST_CASE("outputs are written atomically") {
    const fs::path dir = scratch("atomic");
    const CommandResult r = cmd_nondegeneracy(10, 4.0, 10);
    const auto files = write_outputs(r, dir.string(), "nd");
    CHECK(files.size() == 2);
    int n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        CHECK(e.path().string().find(".tmp.") == std::string::npos);
        ++n;
    }
    CHECK(n == 2);
    CHECK(json::parse(slurp(dir / "nd.json"))["command"] == "nondegeneracy");
    CHECK(slurp(dir / "nd_spectrum.csv").rfind("k,lambda_k_N4,", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("executable: exit codes") {
    const fs::path dir = scratch("exit");
    const std::string out = " --out-dir " + dir.string();
    CHECK(run("nondegeneracy --N 9 --alpha 8 --kmax 20" + out) == 0);
    CHECK(run("nondegeneracy --N 8" + out) == 2);
    CHECK(run("nondegeneracy --alpha 9 --N 9" + out) == 2);
    CHECK(run("nondegeneracy --bogus" + out) == 2);
    CHECK(run("") == 2);
    CHECK(run("--help") == 0);
    CHECK(run("stability --alpha 4" + out) == 2);
    CHECK(run("stability --alpha 4 --approximate --eps-list 0.1,0.01,0.001" + out) == 0);
    CHECK(run("stability --eps-list 0.01,0.1" + out) == 2);
    fs::remove_all(dir);
}

TEST_CASE("executable: environment override of the report directory") {
    const fs::path env_dir = scratch("env");
    const fs::path flag_dir = scratch("flag");
    CHECK(run("nondegeneracy", "HARTREE_REPORT_DIR=" + env_dir.string()) == 0);
    CHECK(fs::exists(env_dir / "nondegeneracy.json"));
    CHECK(run("nondegeneracy --out-dir " + flag_dir.string(), "HARTREE_REPORT_DIR=" + env_dir.string()) == 0);
    CHECK(fs::exists(flag_dir / "nondegeneracy.json"));
    fs::remove_all(env_dir);
    fs::remove_all(flag_dir);
}

TEST_CASE("executable: identical runs give identical reports") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const std::string args = "stability --eps-list 0.1,0.01,0.001 --out-dir ";
    REQUIRE(run(args + a.string()) == 0);
    REQUIRE(run(args + b.string()) == 0);
    const json ja = json::parse(slurp(a / "stability.json"));
    const json jb = json::parse(slurp(b / "stability.json"));
    CHECK(strip_timing(ja).dump() == strip_timing(jb).dump());
    CHECK(slurp(a / "stability_deficit.csv") == slurp(b / "stability_deficit.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("executable: multibubble") {
    const fs::path dir = scratch("mb");
    const std::string pot = source_dir() + "/data/potentials/";
    CHECK(run("multibubble --potential " + pot + "engineered.json --m 100 --init 2.4 --out-dir " + dir.string()) == 0);
    const json j = json::parse(slurp(dir / "multibubble.json"));
    CHECK(j["data"]["solution"]["converged"] == true);
    CHECK(std::abs(j["data"]["solution"]["r_bar"].get<double>() - 2.0) < 1e-8);
    CHECK(fs::exists(dir / "multibubble_beta_sweep.csv"));
    CHECK(run("multibubble --potential " + pot + "constant.json --out-dir " + dir.string()) == 1);
    CHECK(run("multibubble --potential /nonexistent.json --out-dir " + dir.string()) == 2);
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"expression": "r +", "box": {"r": [1, 3], "xpp_center": [0,0,0,0,0,0,0],
        "xpp_radius": 1}, "constants": {"L0": 0.001, "L1": 10}})";
    CHECK(run("multibubble --potential " + bad.string() + " --out-dir " + dir.string()) == 2);
    fs::remove_all(dir);
}

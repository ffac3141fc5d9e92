#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#ifndef FRECHET_CLI_PATH
#error "FRECHET_CLI_PATH must point at the CLI binary"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("frechet_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args, const std::string& stdin_payload = "",
                  const std::string& env = "") {
    fs::path out = work_dir() / "stdout.txt";
    fs::path err = work_dir() / "stderr.txt";
    std::string cmd = "cd " + work_dir().string() + " && " + env + " " +
                      std::string(FRECHET_CLI_PATH) + " " + args + " > " + out.string() +
                      " 2> " + err.string();
    if (!stdin_payload.empty()) {
        fs::path in = work_dir() / "stdin.txt";
        std::ofstream(in) << stdin_payload;
        cmd += " < " + in.string();
    }
    int rc = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    return res;
}

void write_spec(const std::string& name, const std::string& content) {
    std::ofstream(work_dir() / name) << content;
}

const char* kExpSpec = R"({"family":"exponential","params":{"lambda":1}})";
const char* kLnSpec = R"({"family":"lognormal","params":{"mu":0,"sigma2":1}})";

// a hair-thin asymmetric perturbation of the standard normal: dominance
// evidence exists but stays below the strictness threshold
std::string near_symmetric_spec() {
    std::string x = "[", f = "[";
    int n = 2000;
    for (int i = 0; i <= n; ++i) {
        double xi = -6.0 + 12.0 * i / n;
        double fi = std::exp(-0.5 * xi * xi) / std::sqrt(2.0 * M_PI) *
                    (1.0 + 1e-6 * std::tanh(xi));
        char bx[40], bf[40];
        std::snprintf(bx, sizeof(bx), "%.17g", xi);
        std::snprintf(bf, sizeof(bf), "%.17g", fi);
        x += bx;
        f += bf;
        if (i < n) {
            x += ",";
            f += ",";
        }
    }
    x += "]";
    f += "]";
    return std::string(R"({"family":"custom","grid":{"x":)") + x + R"(,"f":)" + f + "}}";
}

} // namespace

TEST_CASE("pmean prints the p-mean and honors --output") {
    write_spec("exp1.json", kExpSpec);
    auto r = run_cli("pmean --dist exp1.json --p 1 --output pm.csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("0.69314718") != std::string::npos);
    auto csv = slurp(work_dir() / "pm.csv");
    CHECK(csv.rfind("p,nu_p,H_p,dnu_dp,method,residual\n", 0) == 0);
}

TEST_CASE("pmean reads the spec from stdin with --dist -") {
    auto r = run_cli("pmean --dist - --p 2", kExpSpec);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("nu_p = 1") != std::string::npos);
}

TEST_CASE("triangle custom density round-trips through the schema") {
    auto r = run_cli("pmean --dist - --p 2", R"({"family":"custom","grid":{"x":[0,1],"f":[2,0]}})");
    CHECK(r.exit_code == 0);
    // mean of f(x) = 2(1-x) on [0,1] is 1/3
    CHECK(r.out.find("nu_p = 0.333333333") != std::string::npos);
}

TEST_CASE("curve emits the declared CSV layout") {
    write_spec("exp1.json", kExpSpec);
    auto r = run_cli("curve --dist exp1.json --grid linear:1..4:4 --output cv.csv");
    REQUIRE(r.exit_code == 0);
    auto csv = slurp(work_dir() / "cv.csv");
    std::stringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "p,nu_p,H_p,dnu_dp,method,residual");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
    CHECK(csv.find("0.693147180") != std::string::npos); // nu_1 = ln 2
}

TEST_CASE("classify produces the report contract") {
    write_spec("ln.json", kLnSpec);
    auto r = run_cli(
        "classify --dist ln.json --grid geometric:0.25..6:12 --full-domain --output sk.json");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "truly_mode_positive (full domain)\n");
    auto j = json::parse(slurp(work_dir() / "sk.json"));
    REQUIRE(j.contains("pearson"));
    REQUIRE(j.contains("classification"));
    REQUIRE(j.contains("ell"));
    REQUIRE(j.contains("van_zwet"));
    REQUIRE(j.contains("curve_csv_path"));
    CHECK(j["classification"] == "truly_mode_positive_full_domain");
    CHECK(j["van_zwet"] == true);
    CHECK(std::fabs(j["ell"].get<double>() - 0.5) < 1e-3);
    CHECK(fs::exists(work_dir() / j["curve_csv_path"].get<std::string>()));
}

TEST_CASE("dominance report fields and verdict") {
    write_spec("exp1.json", kExpSpec);
    auto r = run_cli("dominance --dist exp1.json --p 1 --output dom.json");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "right_dominates_strictly\n");
    auto j = json::parse(slurp(work_dir() / "dom.json"));
    CHECK(j["p"] == 1.0);
    CHECK(j["verdict"] == "right_dominates_strictly");
    REQUIRE(j.contains("criteria"));
    CHECK(j["criteria"].contains("cdf_gap"));
    CHECK(j["criteria"].contains("single_crossing"));
    CHECK(j["criteria"]["decreasing_pdf"] == true);
    CHECK(j["criteria"]["log_concave"] == true);
    CHECK(j.contains("c"));
    CHECK(j["min_cdf_gap"].get<double>() >= -1e-9);
}

TEST_CASE("exit code 1 for invalid input, with JSON on stderr") {
    SECTION("unknown spec field") {
        auto r = run_cli("pmean --dist - --p 2",
                         R"({"family":"exponential","params":{"lambda":1},"oops":1})");
        CHECK(r.exit_code == 1);
        auto j = json::parse(r.err);
        CHECK(j["error"]["message"].get<std::string>().find("oops") != std::string::npos);
    }
    SECTION("bad parameters") {
        auto r = run_cli("pmean --dist - --p 2",
                         R"({"family":"gamma","params":{"alpha":-1,"lambda":1}})");
        CHECK(r.exit_code == 1);
        CHECK(json::parse(r.err)["error"].contains("kind"));
    }
    SECTION("missing file") {
        auto r = run_cli("pmean --dist nope.json --p 2");
        CHECK(r.exit_code == 1);
        CHECK_NOTHROW(json::parse(r.err));
    }
    SECTION("bad grid syntax") {
        write_spec("exp1.json", kExpSpec);
        auto r = run_cli("curve --dist exp1.json --grid shuffled:1..4:4");
        CHECK(r.exit_code == 1);
        CHECK_NOTHROW(json::parse(r.err));
    }
    SECTION("negative custom density") {
        auto r = run_cli("pmean --dist - --p 2",
                         R"({"family":"custom","grid":{"x":[0,1,2],"f":[1,-1,1]}})");
        CHECK(r.exit_code == 1);
    }
    SECTION("missing required flag") {
        auto r = run_cli("pmean --p 2");
        CHECK(r.exit_code == 1);
        CHECK_NOTHROW(json::parse(r.err));
    }
}

TEST_CASE("exit code 2 for numerical failure") {
    auto r = run_cli("pmean --dist - --p 3", R"({"family":"pareto","params":{"alpha":0.5}})");
    CHECK(r.exit_code == 2);
    auto j = json::parse(r.err);
    CHECK(j["error"]["kind"] == "DivergentIntegral");
}

TEST_CASE("exit code 3 for inconclusive dominance under --strict") {
    write_spec("nearsym.json", near_symmetric_spec());
    auto strict = run_cli("dominance --dist nearsym.json --p 2 --strict --output ns.json");
    CHECK(strict.exit_code == 3);
    CHECK(strict.out == "inconclusive\n");
    auto lax = run_cli("dominance --dist nearsym.json --p 2 --output ns.json");
    CHECK(lax.exit_code == 0);
}

TEST_CASE("tailbone consumes sample CSV and appends the zeta comment") {
    std::ofstream s(work_dir() / "pts.csv");
    std::mt19937_64 eng(3);
    for (int i = 0; i < 4000; ++i) {
        double u = (eng() >> 11) * 0x1.0p-53;
        s << -std::log(1.0 - u) << "\n";
    }
    s.close();
    auto r = run_cli("tailbone --samples pts.csv --grid linear:1..4:4 --output tb.csv");
    REQUIRE(r.exit_code == 0);
    auto csv = slurp(work_dir() / "tb.csv");
    CHECK(csv.rfind("p,nu_1,objective,iterations,converged\n", 0) == 0);
    CHECK(csv.find("# zeta:") != std::string::npos);
    CHECK(r.out.rfind("zeta:", 0) == 0);
}

TEST_CASE("determinism: identical invocations produce byte-identical artifacts") {
    write_spec("ln.json", kLnSpec);
    SECTION("curve, including across thread counts") {
        auto r1 = run_cli("curve --dist ln.json --grid geometric:1..6:12 --output c1.csv",
                          "", "FRECHET_SKEW_THREADS=1");
        auto r2 = run_cli("curve --dist ln.json --grid geometric:1..6:12 --output c2.csv",
                          "", "FRECHET_SKEW_THREADS=4");
        REQUIRE(r1.exit_code == 0);
        REQUIRE(r2.exit_code == 0);
        CHECK(slurp(work_dir() / "c1.csv") == slurp(work_dir() / "c2.csv"));
    }
    SECTION("seeded tailbone") {
        write_spec("exp1.json", kExpSpec);
        std::string args = "tailbone --dist exp1.json --n 3000 --seed 99 "
                           "--grid linear:1..4:4 --output ";
        auto r1 = run_cli(args + "t1.csv");
        auto r2 = run_cli(args + "t2.csv");
        REQUIRE(r1.exit_code == 0);
        REQUIRE(r2.exit_code == 0);
        auto t1 = slurp(work_dir() / "t1.csv");
        CHECK_FALSE(t1.empty());
        CHECK(t1 == slurp(work_dir() / "t2.csv"));
    }
    SECTION("oracle-check") {
        auto r1 = run_cli("oracle-check --output o1.json");
        auto r2 = run_cli("oracle-check --output o2.json");
        CHECK(r1.exit_code == 0);
        CHECK(r2.exit_code == 0);
        CHECK(r1.out == r2.out);
        auto o1 = slurp(work_dir() / "o1.json");
        CHECK_FALSE(o1.empty());
        CHECK(o1 == slurp(work_dir() / "o2.json"));
        CHECK(json::parse(o1)["all_passed"] == true);
    }
}

TEST_CASE("oracle-check reports each probe on stdout") {
    auto r = run_cli("oracle-check --output oc.json");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("ok   lognormal(0,1) nu_2") != std::string::npos);
    CHECK(r.out.find("ok   exponential nu_4") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

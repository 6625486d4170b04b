#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quniq/cli.hpp"
#include "quniq/quasianalytic.hpp"
#include "quniq/weights.hpp"

using namespace quniq;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(QUNIQ_TEST_DATA) + "/" + name; }

fs::path scratch(const char* name) {
    const auto dir = fs::temp_directory_path() / "quniq_test_cli";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

TEST_CASE("weight-report") {
    const auto r = run({"weight-report", "--weight", "band:2", "--nmax", "4"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["family"] == "band");
    REQUIRE(j["log_M"].size() == 5);
    for (int n = 0; n <= 4; ++n) CHECK(j["log_M"][n].get<double>() == doctest::Approx(n * std::log(2.0)).epsilon(1e-14));
    CHECK(j["pls_classification"] == "PLS_HOLDS");
    CHECK(j.contains("sandwich"));
    CHECK(j["log_integral"].contains("cauchy"));

    CHECK(json::parse(run({"weight-report", "--weight", "endpoint:1,1"}).out)["pls_classification"] == "PLS_HOLDS");
    CHECK(json::parse(run({"weight-report", "--weight", "powerexp:1,0.5"}).out)["pls_classification"] ==
          "PLS_FAILS");

    const auto bad = run({"weight-report", "--weight", "gaussian:1"});
    CHECK(bad.code == kExitInvalid);
    CHECK(bad.out.empty());
    CHECK(bad.err.find("gaussian") != std::string::npos);

    // polynomial growth: moments diverge
    const auto div = run({"weight-report", "--weight", "tabulated:0/0;1/1@1", "--nmax", "3"});
    CHECK(div.code == kExitWeight);
    CHECK(div.out.empty());

    CHECK(run({"weight-report"}).code == kExitInvalid);
    CHECK(run({"weight-report", "--weight", "band:2", "--weight-file", data("exp_quarter.weight")}).code ==
          kExitInvalid);
    CHECK(run({"frobnicate"}).code == kExitInvalid);
    CHECK(run({"weight-report", "--weight", "band:2", "--format", "xml"}).code == kExitInvalid);
}

TEST_CASE("pls-constant") {
    const std::string e = "2.718281828459045";
    const auto r = run({"pls-constant", "--weight", "band:" + e, "--A", e, "--nmax", "100"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    const auto direct = pls_constant(Weight::band_limit(std::numbers::e), 1, 1.0, 0.5, std::numbers::e, 100);
    CHECK(j["log_C"].get<double>() == direct.log_c.value);
    CHECK(j["log_C"].get<double>() ==
          doctest::Approx(0.5 * std::log(8.0) + 46.0 * (4.0 + 2.0 * std::log(4.0))).epsilon(1e-12));
    CHECK(j["A"].get<double>() == std::numbers::e);
    REQUIRE(j["levels"].size() == 1);
    CHECK(j["levels"][0]["bang_degree"] == 23);

    double prev = 0.0;
    for (const char* gamma : {"0.5", "0.25", "0.125"}) {
        const auto g = run({"pls-constant", "--weight", "band:" + e, "--gamma", gamma, "--nmax", "400"});
        REQUIRE(g.code == kExitOk);
        const double v = json::parse(g.out)["log_C"].get<double>();
        CHECK(v >= prev);
        prev = v;
    }

    const auto small = run({"pls-constant", "--weight", "band:" + e, "--nmax", "10"});
    CHECK(small.code == kExitNmax);
    CHECK(small.out.empty());
    CHECK(small.err.find("failing recursion level: 1") != std::string::npos);

    CHECK(run({"pls-constant", "--weight", "powerexp:1,0.5"}).code == kExitWeight);
}

TEST_CASE("fup-experiment") {
    const auto r = run({"fup-experiment", "--k-min", "3", "--k-max", "6", "--gamma", "0.5", "--seed", "11"});
    REQUIRE(r.code == kExitOk);
    const auto lines = csv_lines(r.out);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "N,Q_size,E_size,sigma_min,recovery_constant,method,seed,wall_time_ms");
    std::int64_t N = 9;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        REQUIRE(cells.size() == 8);
        N *= 3;
        CHECK(std::stoll(cells[0]) == N);
        CHECK(std::stoll(cells[1]) == (1LL << (i + 2)));
        CHECK(std::stod(cells[3]) > 0.0);
        CHECK(cells[5] == "FULL_SVD");
        CHECK(cells[6] == "11");
        CHECK(cells[7].empty());
    }

    // byte-identical reruns, independent of the worker count
    CHECK(run({"fup-experiment", "--k-min", "3", "--k-max", "6", "--gamma", "0.5", "--seed", "11"}).out == r.out);
    CHECK(run({"fup-experiment", "--k-min", "3", "--k-max", "6", "--gamma", "0.5", "--seed", "11", "--jobs", "4"})
              .out == r.out);

    // a single Cantor digit leaves one frequency
    const auto one = run({"fup-experiment", "--k-min", "3", "--k-max", "3", "--digits", "0", "--format", "json"});
    REQUIRE(one.code == kExitOk);
    const auto row = json::parse(one.out)[0];
    CHECK(row["Q_size"] == 1);
    CHECK(row["sigma_min"].get<double>() ==
          doctest::Approx(std::sqrt(row["E_size"].get<double>() / 27.0)).epsilon(1e-12));
    CHECK(row["wall_time_ms"].is_null());

    const auto iter = run({"fup-experiment", "--k-min", "3", "--k-max", "4", "--method", "iterative"});
    CHECK(iter.code == kExitOk);
    CHECK(iter.out.find("ITERATIVE") != std::string::npos);

    // all 27 frequencies against 14 points
    const std::vector<std::string> full = {"fup-experiment", "--k-min", "3", "--k-max", "3", "--digits", "0,1,2"};
    CHECK(run(full).code == kExitOk);
    auto strict = full;
    strict.push_back("--require-positive");
    const auto s = run(strict);
    CHECK(s.code == kExitSingular);
    CHECK(s.out.find(",0,inf,") != std::string::npos);

    CHECK(run({"fup-experiment", "--digits", "0,x"}).code == kExitInvalid);
    CHECK(run({"fup-experiment", "--placement", "middle"}).code == kExitInvalid);
    CHECK(run({"fup-experiment", "--k-min", "4", "--k-max", "3"}).code == kExitInvalid);
}

TEST_CASE("cover") {
    const auto r = run({"cover", "--weight-file", data("exp_quarter.weight"), "--intervals", data("q34.txt")});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["weight"] == "powerexp:0.25,1");
    CHECK(j["cover"]["norm"].get<double>() == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(j["regularized"]["card_within_7x"] == true);
    CHECK(j["regularized"]["halves_disjoint"] == true);
    CHECK(j["sparsity"]["status"] == "LOWER_BOUND");

    const auto empty = run({"cover", "--weight", "powerexp:0.25,1", "--intervals", data("empty.txt")});
    REQUIRE(empty.code == kExitOk);
    CHECK(json::parse(empty.out)["cover"]["norm"] == 0.0);

    const auto csv = run({"cover", "--weight", "powerexp:0.25,1", "--intervals", data("q34.txt"), "--format", "csv"});
    REQUIRE(csv.code == kExitOk);
    const auto lines = csv_lines(csv.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "t,n,omega,card,regularized_card,norm_contribution");
    CHECK(split(lines[2])[1] == "total");
    CHECK(std::stod(split(lines[2])[5]) == doctest::Approx(0.125).epsilon(1e-12));

    const auto bad_file = scratch("bad_intervals.txt");
    std::ofstream(bad_file) << "0 1\n2\n";
    const auto bad = run({"cover", "--weight", "band:2", "--intervals", bad_file.string()});
    CHECK(bad.code == kExitInvalid);
    CHECK(bad.err.find("line 2") != std::string::npos);
    CHECK(run({"cover", "--weight", "band:2", "--intervals", data("missing.txt")}).code == kExitInvalid);
    CHECK(run({"cover", "--weight", "band:2"}).code == kExitInvalid);
}

TEST_CASE("sparsity") {
    const auto r = run({"sparsity", "--weight", "powerexp:0.25,1", "--intervals", data("q34.txt"), "--grid-lo", "-1",
                        "--grid-hi", "1", "--grid-count", "5"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["samples"].get<int>() >= 5);  // grid plus breakpoints
    CHECK(j["status"] == "LOWER_BOUND");
    CHECK(j["value"].get<double>() >= 0.125 - 1e-12);
    CHECK(run({"sparsity", "--weight", "band:2", "--intervals", data("q34.txt"), "--grid-count", "0"}).code ==
          kExitInvalid);
}

TEST_CASE("paley-wiener") {
    const auto r = run({"paley-wiener", "--N", "4096"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["weight"] == "powerexp:1,0.5");
    CHECK(j["tail_sum"].get<double>() < 0.1);
    CHECK(j["energy_fraction_outside"].get<double>() < 1e-6);
    CHECK(j["recovery_ratio_outside"].get<double>() < 1e-3);
    CHECK(run({"paley-wiener", "--N", "7"}).code == kExitInvalid);
    CHECK(run({"paley-wiener", "--epsilon", "0.02", "--n0", "10"}).code != kExitOk);
}

TEST_CASE("config file, precedence and --out") {
    const auto cfg = scratch("run.cfg");
    std::ofstream(cfg) << "# sweep settings\nweight=band:2\nnmax=3\n";
    const auto from_cfg = json::parse(run({"weight-report", "--config", cfg.string()}).out);
    CHECK(from_cfg["n_max"] == 3);
    CHECK(from_cfg["weight"] == "band:2");
    const auto flag_wins = json::parse(run({"weight-report", "--config", cfg.string(), "--nmax", "5"}).out);
    CHECK(flag_wins["n_max"] == 5);
    CHECK(json::parse(run({"weight-report", "--weight", "band:2"}).out)["n_max"] == 20);

    const auto target = scratch("report.json");
    fs::remove(target);
    const auto ok = run({"weight-report", "--weight", "band:2", "--out", target.string()});
    REQUIRE(ok.code == kExitOk);
    CHECK(ok.out.empty());
    std::ifstream in(target);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(json::parse(text.str())["family"] == "band");

    const auto failed = scratch("failed.json");
    fs::remove(failed);
    CHECK(run({"weight-report", "--weight", "nope:1", "--out", failed.string()}).code == kExitInvalid);
    CHECK(!fs::exists(failed));
}

TEST_CASE("help") {
    const auto h = run({"--help"});
    CHECK(h.code == kExitOk);
    CHECK(h.out.find("fup-experiment") != std::string::npos);
}

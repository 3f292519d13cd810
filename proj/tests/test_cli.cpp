#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffr/run_config.hpp"

namespace {

const std::string kCli = FFR_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args;
    const int status = std::system(cmd.c_str());
    if (status < 0) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("no such column: " + name);
    }
    double num(std::size_t row, const std::string& name) const {
        return std::stod(cells[row][col(name)]);
    }
    std::size_t size() const { return cells.size(); }
};

Csv parse_csv(const std::string& text) {
    Csv out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        if (first) {
            out.header = row;
            first = false;
        } else {
            out.cells.push_back(row);
        }
    }
    return out;
}

std::string tmp_path(const std::string& name) { return "cli_test_" + name; }

} // namespace

TEST_CASE("run configuration round-trips through JSON", "[cli]") {
    ffr::RunConfig rc;
    rc.command = "rate";
    rc.alpha = 3.5;
    rc.target_db = 1.25;
    rc.alphas = {2.0, 4.0};
    rc.seed = 987654321;
    rc.channel = "pedA";
    const nlohmann::json j1 = rc;
    const ffr::RunConfig back = j1.get<ffr::RunConfig>();
    const nlohmann::json j2 = back;
    CHECK(j1 == j2);
    CHECK(back.alpha == rc.alpha);
    CHECK(back.seed == rc.seed);
}

TEST_CASE("coverage command emits the documented schema", "[cli]") {
    const auto out = tmp_path("coverage.csv");
    REQUIRE(run("coverage --alpha 3 --target-db 0 --threshold-db 0 --mode independent --R 577 "
                "--r-steps 50 --out " + out) == 0);
    const auto csv = parse_csv(slurp(out));
    REQUIRE(csv.header == std::vector<std::string>{"r_m", "cp_fr1", "cp_fr3", "cp_ffr_centre",
                                                   "cp_ffr_edge", "cp_ffr"});
    REQUIRE(csv.size() == 50);
    for (std::size_t i = 0; i < csv.size(); ++i)
        CHECK(csv.num(i, "cp_ffr") >= csv.num(i, "cp_fr3"));
    std::remove(out.c_str());
}

TEST_CASE("suboptimal thresholds lower the hybrid coverage pointwise", "[cli]") {
    const auto out_a = tmp_path("cov_at_t.csv"), out_b = tmp_path("cov_below_t.csv");
    REQUIRE(run("coverage --alpha 3 --target-db 0 --threshold-db 0 --r-steps 20 --out " + out_a) == 0);
    REQUIRE(run("coverage --alpha 3 --target-db 0 --threshold-db -5 --r-steps 20 --out " + out_b) == 0);
    const auto at_t = parse_csv(slurp(out_a));
    const auto below = parse_csv(slurp(out_b));
    for (std::size_t i = 0; i < at_t.size(); ++i)
        CHECK(below.num(i, "cp_ffr") <= at_t.num(i, "cp_ffr") + 1e-12);
    std::remove(out_a.c_str());
    std::remove(out_b.c_str());
}

TEST_CASE("correlated mode above the target collapses onto reuse-3", "[cli]") {
    const auto out = tmp_path("cov_corr.csv");
    REQUIRE(run("coverage --mode correlated --threshold-db 3 --target-db 0 --alpha 3 --r-steps 20 "
                "--out " + out) == 0);
    const auto csv = parse_csv(slurp(out));
    for (std::size_t i = 0; i < csv.size(); ++i)
        CHECK(std::abs(csv.num(i, "cp_ffr") - csv.num(i, "cp_fr3")) < 1e-6);
    std::remove(out.c_str());
}

TEST_CASE("rate sweep flags the maximizer and keeps baselines constant", "[cli]") {
    const auto out = tmp_path("rate.csv");
    REQUIRE(run("rate --alpha 3 --target-db 0 --mode independent --sth-start -3 --sth-stop 4 "
                "--sth-step 0.25 --out " + out) == 0);
    const auto csv = parse_csv(slurp(out));
    int flagged = 0;
    double max_at = 0.0;
    for (std::size_t i = 0; i < csv.size(); ++i) {
        CHECK(csv.num(i, "rate_fr1") == csv.num(0, "rate_fr1"));
        if (csv.num(i, "is_max") == 1.0) {
            ++flagged;
            max_at = csv.num(i, "s_th_db");
        }
    }
    CHECK(flagged == 1);
    CHECK_THAT(max_at, Catch::Matchers::WithinAbs(1.0, 0.26));
    std::remove(out.c_str());
}

TEST_CASE("optimize emits a machine-readable report", "[cli]") {
    const auto out = tmp_path("optimize.json");
    REQUIRE(run("optimize --alphas 3 --out " + out) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["results"].size() == 1);
    const auto& row = j["results"][0];
    CHECK(row["alpha"].get<double>() == 3.0);
    CHECK_THAT(row["t_prime_db"].get<double>(), Catch::Matchers::WithinAbs(1.0, 0.3));
    CHECK(row["t_doubleprime_db"].get<double>() > -1.0);
    CHECK(row["centre_fraction"].get<double>() > 0.4);
    CHECK(row["centre_fraction"].get<double>() < 0.8);
    CHECK(row["gain_independent_pct"].get<double>() > row["gain_correlated_pct"].get<double>());
    CHECK(row["coverage_delta"].get<double>() >= 0.0);
    std::remove(out.c_str());
}

TEST_CASE("simulate cross-checks pass and are byte-reproducible", "[cli]") {
    const auto out1 = tmp_path("sim1.csv"), out2 = tmp_path("sim2.csv");
    const auto sum1 = tmp_path("sim1.json"), sum2 = tmp_path("sim2.json");
    REQUIRE(run("simulate --check coverage --samples 50000 --seed 42 --alpha 3 --threads 1 "
                "--out " + out1 + " --summary " + sum1) == 0);
    REQUIRE(run("simulate --check coverage --samples 50000 --seed 42 --alpha 3 --threads 6 "
                "--out " + out2 + " --summary " + sum2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(sum1) == slurp(sum2));

    const auto csv = parse_csv(slurp(out1));
    for (std::size_t i = 0; i < csv.size(); ++i) CHECK(csv.num(i, "pass") == 1.0);

    const auto j = nlohmann::json::parse(slurp(sum1));
    CHECK(j["all_passed"].get<bool>());
    for (const auto& p : {out1, out2, sum1, sum2}) std::remove(p.c_str());
}

TEST_CASE("simulate channel curves stay within the analytic envelope", "[cli]") {
    const auto out = tmp_path("tdl.csv");
    REQUIRE(run("simulate --channel pedA --r-steps 5 --samples 100000 --seed 3 --out " + out +
                " --summary " + tmp_path("tdl.json")) == 0);
    const auto csv = parse_csv(slurp(out));
    REQUIRE(csv.size() == 5);
    for (std::size_t i = 0; i < csv.size(); ++i) {
        const double mc = csv.num(i, "cp_ffr_mc"), se = csv.num(i, "std_error");
        CHECK(mc <= csv.num(i, "cp_ffr_independent") + 3.0 * se + 1e-12);
        CHECK(mc >= csv.num(i, "cp_ffr_correlated") - 3.0 * se - 1e-12);
    }
    std::remove(out.c_str());
    std::remove(tmp_path("tdl.json").c_str());
}

TEST_CASE("config files seed the flags and flags override", "[cli]") {
    const auto cfg = tmp_path("config.json");
    {
        ffr::RunConfig rc;
        rc.r_steps = 5;
        rc.alpha = 4.0;
        std::ofstream out(cfg);
        out << nlohmann::json(rc).dump();
    }
    const auto out = tmp_path("cfg_cov.csv");
    REQUIRE(run("coverage --config " + cfg + " --r-steps 3 --out " + out) == 0);
    const auto csv = parse_csv(slurp(out));
    CHECK(csv.size() == 3);  // flag wins over the config value
    std::remove(cfg.c_str());
    std::remove(out.c_str());
}

TEST_CASE("usage and validation errors exit with code 2", "[cli]") {
    CHECK(run("coverage --r-steps 0 --out /dev/null 2>/dev/null") == 2);
    CHECK(run("coverage --mode sideways --out /dev/null 2>/dev/null") == 2);
    CHECK(run("rate --sth-start 5 --sth-stop -5 --out /dev/null 2>/dev/null") == 2);
    CHECK(run("simulate --check coverage --channel pedA --out /dev/null 2>/dev/null") == 2);
    CHECK(run("frobnicate 2>/dev/null") == 2);
    CHECK(run("coverage --alpha 1.0 --out /dev/null 2>/dev/null") == 2);
}

TEST_CASE("csv output is LF terminated with headers", "[cli]") {
    const auto out = tmp_path("lf.csv");
    REQUIRE(run("coverage --r-steps 2 --out " + out) == 0);
    const auto text = slurp(out);
    CHECK(text.find("\r\n") == std::string::npos);
    CHECK(text.rfind("r_m,", 0) == 0);
    CHECK(text.back() == '\n');
    std::remove(out.c_str());
}

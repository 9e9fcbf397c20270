#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "aoapos/cli.hpp"

using namespace aoapos;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "aoapos");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    auto p = std::filesystem::temp_directory_path() / ("aoapos_test_" + name);
    std::ofstream(p) << content;
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, PdfCsvShapeAndAgreement) {
    const auto r = run_cli({"pdf", "--angle", "theta", "--samples", "1000000", "--bins", "100", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 101u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,analytic_exact,analytic_linear,empirical");
    double l1 = 0, width = std::stod(rows[2][0]) - std::stod(rows[1][0]);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 4u);
        l1 += std::abs(std::stod(rows[i][1]) - std::stod(rows[i][3])) * width;
    }
    // midpoint densities against histogram densities: a coarse version of the L1 check
    EXPECT_LT(l1, 0.02);
}

TEST(Cli, PhiPdf) {
    const auto r = run_cli({"pdf", "--angle", "phi", "--samples", "200000", "--bins", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(parse_csv(r.out).size(), 51u);
}

TEST(Cli, ConfigErrors) {
    EXPECT_EQ(run_cli({"pdf", "--samples", "0"}).code, cli::kConfig);
    EXPECT_EQ(run_cli({"pdf", "--bins", "0"}).code, cli::kConfig);
    EXPECT_EQ(run_cli({"pdf", "--angle", "psi"}).code, cli::kConfig);
    EXPECT_EQ(run_cli({"locate", "--n", "0"}).code, cli::kConfig);
    EXPECT_EQ(run_cli({"sweep", "--param", "colour"}).code, cli::kConfig);
    const auto unknown = temp_file("unknown.json", R"({"trials": 10, "bogus": 1})");
    const auto r = run_cli({"locate", "--config", unknown.string()});
    EXPECT_EQ(r.code, cli::kConfig);
    EXPECT_NE(r.err.find("bogus"), std::string::npos);
    const auto typed = temp_file("typed.json", R"({"trials": -5})");
    EXPECT_EQ(run_cli({"locate", "--config", typed.string()}).code, cli::kConfig);
    const auto broken = temp_file("broken.json", "{\"trials\": ");
    EXPECT_EQ(run_cli({"locate", "--config", broken.string()}).code, cli::kConfig);
}

TEST(Cli, ParseErrors) {
    EXPECT_EQ(run_cli({}).code, cli::kConfig);  // parse errors share the config code
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kConfig);  // parse errors share the config code
    EXPECT_EQ(run_cli({"pdf", "--no-such-flag"}).code, cli::kConfig);  // parse errors share the config code
    EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
}

TEST(Cli, DomainAndRankErrors) {
    EXPECT_EQ(run_cli({"pdf", "--phi-hat", "0"}).code, cli::kDomain);
    EXPECT_EQ(run_cli({"variance", "--theta-hat", "0"}).code, cli::kDomain);
    const auto r = run_cli({"locate", "--noiseless", "--anchors", "0,0,0;-1,-1,-1", "--mu", "5,5,5"});
    EXPECT_EQ(r.code, cli::kRank) << r.err;
}

TEST(Cli, VarianceTable) {
    const auto r = run_cli({"variance", "--sizes", "4,8,16,32", "--samples", "200000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "n,var_theta_closed,var_theta_mc,var_phi_closed,var_phi_mc");
    for (std::size_t i = 2; i < rows.size(); ++i) {
        EXPECT_LT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));
        EXPECT_LT(std::stod(rows[i][3]), std::stod(rows[i - 1][3]));
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_NEAR(std::stod(rows[i][2]) / std::stod(rows[i][1]), 1.0, 0.02);
        EXPECT_NEAR(std::stod(rows[i][4]) / std::stod(rows[i][3]), 1.0, 0.02);
    }
}

TEST(Cli, NoiselessLocateIsExact) {
    const auto r = run_cli({"locate", "--noiseless"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    ASSERT_EQ(rows[0], (std::vector<std::string>{"x", "y", "z", "error", "residual_norm", "passes", "condition_warning"}));
    EXPECT_NEAR(std::stod(rows[1][0]), 60, 1e-9);
    EXPECT_NEAR(std::stod(rows[1][1]), 40, 1e-9);
    EXPECT_NEAR(std::stod(rows[1][2]), 70, 1e-9);
    EXPECT_LT(std::stod(rows[1][3]), 1e-9);
}

TEST(Cli, QuantizedLocateClose) {
    const auto r = run_cli({"locate"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(std::stod(parse_csv(r.out)[1][3]), 1.0);
}

TEST(Cli, EstimateRow) {
    const auto r = run_cli({"estimate", "--theta", "1.0", "--phi", "0.4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].size(), 10u);
    EXPECT_NEAR(std::stod(rows[1][2]), 1.0, 0.02);
    EXPECT_NEAR(std::stod(rows[1][3]), 0.4, 0.02);
}

TEST(Cli, SweepRepeatableAcrossWorkers) {
    const auto a = run_cli({"sweep", "--param", "anchor-count", "--trials", "500", "--workers", "1"});
    const auto b = run_cli({"sweep", "--param", "anchor-count", "--trials", "500", "--workers", "3"});
    const auto c = run_cli({"sweep", "--param", "anchor-count", "--trials", "500", "--workers", "3"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(b.out, c.out);
    EXPECT_EQ(parse_csv(a.out).size(), 4u);
    EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "value,mse,mse_baseline,failure_fraction");
    const auto v = run_cli({"sweep", "--param", "grid-size", "--quantity", "variance", "--values", "16,64"});
    ASSERT_EQ(v.code, 0) << v.err;
    EXPECT_EQ(v.out.substr(0, v.out.find('\n')), "value,var_theta,var_phi");
}

TEST(Cli, FlagsOverrideConfig) {
    const auto cfg = temp_file("override.json", R"({"trials": 200, "seed": 5, "n_y": 8, "n_z": 8})");
    const auto file_only = run_cli({"sweep", "--config", cfg.string(), "--values", "4", "--param", "anchor-count"});
    const auto flag = run_cli({"sweep", "--config", cfg.string(), "--values", "4", "--param", "anchor-count", "--seed", "6"});
    const auto direct = run_cli({"sweep", "--trials", "200", "--seed", "6", "--n", "8", "--values", "4"});
    ASSERT_EQ(file_only.code, 0) << file_only.err;
    ASSERT_EQ(flag.code, 0) << flag.err;
    EXPECT_NE(file_only.out, flag.out);
    EXPECT_EQ(flag.out, direct.out);
}

TEST(Cli, OutFile) {
    const auto p = std::filesystem::temp_directory_path() / "aoapos_test_out.csv";
    std::filesystem::remove(p);
    const auto r = run_cli({"estimate", "--out", p.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(slurp(p), run_cli({"estimate"}).out);
}

TEST(Cli, Executable) {
    const std::string out = (std::filesystem::temp_directory_path() / "aoapos_exe.csv").string();
    const std::string cmd = std::string(AOAPOS_CLI_PATH) + " estimate --out " + out;
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_EQ(slurp(out), run_cli({"estimate"}).out);
    const std::string bad = std::string(AOAPOS_CLI_PATH) + " pdf --samples 0 2>/dev/null";
    const int status = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(status), cli::kConfig);
}

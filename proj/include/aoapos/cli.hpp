#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoapos/montecarlo.hpp"

namespace aoapos::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kConfig = 2, kDomain = 3, kRank = 4 };

struct RunConfig {
    std::string command;
    Scenario scenario = default_scenario();
    double d_over_lambda = 0.5;
    // state for pdf / variance
    double theta_hat = 1.0471975511965976;  // pi/3
    double phi_hat = 0.52359877559829882;   // pi/6
    // true angles for estimate
    double theta = 1.0471975511965976;
    double phi = 0.52359877559829882;
    std::string angle = "theta";
    std::size_t samples = 1000000;
    int bins = 100;
    std::vector<int> sizes = {4, 8, 16, 32};
    std::string parameter = "anchor-count";
    std::vector<int> values;  // empty: per-parameter default
    std::string quantity = "mse";
    unsigned workers = 0;
    std::string out;  // empty: stdout

    // Applies d_over_lambda and checks every field. Throws ConfigError.
    void finalize();
};

// Merges a JSON document into cfg. Unknown keys and type mismatches throw ConfigError.
void apply_json(RunConfig& cfg, const std::string& text);

std::string cmd_pdf(const RunConfig& cfg);
std::string cmd_variance(const RunConfig& cfg);
std::string cmd_locate(const RunConfig& cfg);
std::string cmd_sweep(const RunConfig& cfg);
std::string cmd_estimate(const RunConfig& cfg);

// Full front-end: parses argv, runs the subcommand, writes CSV to --out or
// `out`, diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aoapos::cli

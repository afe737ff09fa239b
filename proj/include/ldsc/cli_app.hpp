#pragma once

// Command-line front end. The logic lives here so tests can drive it without
// spawning a process; tools/ldsc_main.cpp only forwards argv.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ldsc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInfeasible = 2, kConverseFailure = 3, kIo = 4 };

constexpr int kCsvSchemaVersion = 1;

struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string output;
    std::string csv;
    std::string mode = "lossless";
    std::string p = "1/2";
    std::vector<std::string> p_list;
    double rate = 0.0;
    double epsilon = 1e-3;
    double distortion = 0.0;
    std::uint32_t t = 1;
    std::uint64_t bits = 0;  // 0: use every bit of the input file
    std::uint64_t index = 0;
    bool all = false;
    bool strict = false;
    std::uint32_t n_min_log = 10;
    std::uint32_t n_max_log = 20;
    std::uint32_t n_step_log = 2;
    std::uint64_t n = 65536;
    std::uint32_t t_min = 4;
    std::uint32_t t_max = 16;
    std::uint32_t max_block_len = 4096;
    std::string schedule = "fixed";
    std::string check = "all";
    std::uint64_t seed = 1;
    std::uint64_t draws = 1000;
    unsigned workers = 1;

    /// One-line echo of every field that affects output.
    [[nodiscard]] std::string describe() const;
};

/// Parses and runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ldsc::cli

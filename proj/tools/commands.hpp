// Subcommand implementations behind the photonkd CLI. Exit codes follow the
// fixed convention: 0 ok, 1 verification failure, 2 config error, 3 data
// error.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace photonkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;

struct MubsOptions {
    bool verify = false;
    std::optional<std::string> basis; // restrict printing to one basis
    std::string format = "table";     // table | csv
};

struct SimulateOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> rounds;
    std::optional<int> workers;
    std::optional<std::string> stats_path;
    std::optional<std::string> records_path;
    std::optional<std::string> alice_key_path;
    std::optional<std::string> bob_key_path;
    std::optional<double> expect_qber;
    double tolerance = 0.01;
};

struct MzemOptions {
    std::optional<std::string> preset;
    bool scan = false;
    double scan_from = 0.0;
    double scan_to = 0.0;
    int scan_steps = 1;
    std::string mode = "tem00"; // tem00 | tem10
    int grid = 512;
};

struct DistillOptions {
    std::string alice_path;
    std::string bob_path;
    std::size_t block_size = 8;
    int passes = 4;
    std::size_t security_margin = 64;
    std::uint64_t seed = 0;
    std::optional<std::string> out_path;
};

int cmd_mubs(const MubsOptions &opt);
int cmd_simulate(const SimulateOptions &opt);
int cmd_mzem(const MzemOptions &opt);
int cmd_distill(const DistillOptions &opt);

} // namespace photonkd::cli

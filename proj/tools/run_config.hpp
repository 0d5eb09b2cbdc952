// JSON run-configuration loading for the CLI. The schema mirrors
// ProtocolConfig plus output paths; unknown keys are rejected everywhere so
// typos fail loudly before anything runs.

#pragma once

#include "photonkd/protocol.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace photonkd::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputPaths {
    std::optional<std::string> stats;
    std::optional<std::string> records;
    std::optional<std::string> alice_key;
    std::optional<std::string> bob_key;
};

struct RunConfig {
    ProtocolConfig protocol;
    OutputPaths output;
};

// Parses and fully validates; throws ConfigError with a schema diagnostic.
RunConfig parse_run_config(const nlohmann::json &doc);
RunConfig load_run_config(const std::string &path);

} // namespace photonkd::cli

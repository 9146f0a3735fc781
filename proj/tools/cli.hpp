#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lrfr::cli {

/// Parameters shared by the pipeline subcommands.
struct ExperimentConfig {
    std::string manifest;
    std::string backend = "reference";
    double crop_ratio = 1.0;
    std::optional<int> target_resolution;
    int input_size = 224;
    std::string out;
    std::uint64_t seed = 0;
    std::vector<int> ranks{1};
};

/// Runs `lrfr <subcommand> ...` (args exclude the program name).
/// Returns 0 on success, 2 on usage errors, 1 on pipeline errors; failures
/// print one `error,<Code>,<message>` line to `err`.
int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lrfr::cli

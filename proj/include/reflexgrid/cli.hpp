#pragma once

// Command implementations behind the `reflexgrid` executable. Each command
// writes to the given streams and returns the process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "reflexgrid/engine.hpp"

namespace reflexgrid::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input_error = 1;   ///< parse or validation failure
inline constexpr int runtime_error = 2; ///< simulation or output failure
inline constexpr int awareness = 3;     ///< violations under --strict-awareness
} // namespace exit_code

struct RunOptions {
    std::filesystem::path scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> csv;
    std::optional<std::filesystem::path> svg;
    bool strict_awareness = false;
    bool record_shifts = false;
    std::optional<std::size_t> window_begin;
    std::optional<std::size_t> window_end;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Parsing plus awareness validation, no simulation.
int cmd_validate(const std::filesystem::path& scenario, bool strict_awareness, std::ostream& out,
                 std::ostream& err);

enum class AlgebraMode { Eval, Equals, Awareness };

/// Eval takes one expression; Equals two; Awareness a base expression
/// followed by one or more observer atoms.
int cmd_algebra(AlgebraMode mode, std::span<const std::string> args, std::ostream& out, std::ostream& err);

struct MetricsOptions {
    std::filesystem::path csv;
    /// Band and default window come from a scenario file when given.
    std::optional<std::filesystem::path> scenario;
    std::optional<double> v_low;
    std::optional<double> v_high;
    std::optional<std::size_t> window_begin;
    std::optional<std::size_t> window_end;
};

int cmd_metrics(const MetricsOptions& options, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv[0] is the program name).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace reflexgrid::cli

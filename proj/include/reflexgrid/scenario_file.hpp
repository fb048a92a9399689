#pragma once

// Scenario files: `key = value` lines under `[section]` headers, `#` starts a
// comment. Sections are [circuit], [source], [disturbance], [agents],
// [controller], [band], [run] and per-agent overrides [agent.<id>]. Unknown
// sections or keys are errors.

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "reflexgrid/engine.hpp"

namespace reflexgrid::cli {

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& source, std::size_t line, const std::string& message);
    /// 1-based; 0 when the problem is not tied to one line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

engine::Scenario parse_scenario(std::string_view text, const std::string& source_name = "<scenario>");
engine::Scenario load_scenario(const std::filesystem::path& path);

} // namespace reflexgrid::cli

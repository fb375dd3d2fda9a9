#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace pdelab {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitNumericalFailure = 3,
  kExitMissingInput = 4,
};

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  /// "csv" or "json"; overrides output.formats.
  std::optional<std::string> format;
};

/// Maps an exception to the exit-code contract.
int exit_code_for(const std::exception& e) noexcept;

// Each command writes its artifacts plus manifest.json into the output
// directory and returns an ExitCode; diagnostics go to `err`.
int cmd_solve(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_fit(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_train_ann(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_surrogate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_breakeven(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

/// Question-by-question table for a run manifest, one `Qn | topic | value`
/// row per question followed by the break-even row.
std::string render_report(const nlohmann::json& manifest);

}  // namespace pdelab

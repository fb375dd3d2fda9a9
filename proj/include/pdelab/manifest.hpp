#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pdelab {

inline constexpr std::string_view kToolName = "pdelab";

std::string sha256_hex(std::string_view bytes);

/// OS, architecture, CPU count, compiler and build flags of this process.
nlohmann::json machine_descriptor();

struct FileRecord {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::size_t bytes = 0;
  /// Contents include wall-clock measurements and differ between runs.
  bool timing_dependent = false;
};

/// Writes run artifacts into one directory and records each in the manifest
/// inventory.
class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  void write(const std::string& name, std::string_view contents, bool timing_dependent = false);
  void write_json(const std::string& name, const nlohmann::json& j, bool timing_dependent = false);
  const std::vector<FileRecord>& files() const noexcept { return files_; }

  /// Writes manifest.json: `body` plus tool, version, machine and the file
  /// inventory. The manifest does not list itself.
  void finish(nlohmann::json body);

 private:
  std::filesystem::path dir_;
  std::vector<FileRecord> files_;
};

/// Indented dump, 17 significant digits at most, trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace pdelab

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace intentscape::artifacts {

std::string sha256_hex(std::string_view bytes);

// Whole-file read; MissingArtifactError if the file does not exist.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct FileHash {
  std::string name;  // relative to the work directory, or a bare file name when external
  std::string sha256;
  bool external = false;

  friend bool operator==(const FileHash&, const FileHash&) = default;
};

struct StageMeta {
  std::string stage;
  nlohmann::json config;
  std::vector<FileHash> inputs;
  std::vector<FileHash> outputs;
};

nlohmann::json meta_to_json(const StageMeta& m);
StageMeta meta_from_json(const nlohmann::json& j);

// A directory of stage artifacts. Each stage writes `<stage>.meta.json`
// recording hashes of what it read and wrote, so any later edit to an
// artifact breaks the chain.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path dir, bool force = false);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(std::string_view name) const { return dir_ / std::string(name); }
  bool exists(std::string_view name) const;

  // Verifies `name` against its producer, recursively up the chain, then
  // returns its bytes. Throws MissingArtifactError or StaleArtifactError
  // (the latter only logged when forced).
  std::string read_verified(std::string_view name) const;
  void verify(std::string_view name) const;

  // Registers a file from outside the work directory as a stage input.
  static FileHash external_input(const std::filesystem::path& path);

  // Writes every output atomically, then the stage's meta file.
  void write_stage(const std::string& stage, const nlohmann::json& config, const std::vector<std::string>& inputs,
                   const std::vector<FileHash>& external_inputs,
                   const std::vector<std::pair<std::string, std::string>>& outputs) const;

  // Meta of the stage that wrote `name`, if any.
  std::optional<StageMeta> producer(std::string_view name) const;

 private:
  void verify_impl(std::string_view name, std::vector<std::string>& seen) const;
  void stale(const std::string& what) const;

  std::filesystem::path dir_;
  bool force_;
};

}  // namespace intentscape::artifacts

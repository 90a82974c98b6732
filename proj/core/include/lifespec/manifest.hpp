// Run manifest: a flat "key = value" record of one pipeline run.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lifespec {

inline constexpr std::string_view kEngineVersion = "lifespec-engine 0.3.0 (bit-parallel rows, dead boundary)";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

class RunManifest {
 public:
  void set(std::string key, std::string value);
  // Records an output file under "output.<name>" with its SHA-256.
  void add_output(const std::filesystem::path& path, const std::filesystem::path& relative_to);

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  const std::string* find(std::string_view key) const;

  std::string to_text() const;
  static RunManifest parse(std::string_view text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace lifespec

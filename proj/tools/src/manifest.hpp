#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace seismon::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Run manifest: command, settings, input and output hashes. No timestamps,
/// so two runs with the same inputs and seed produce the same bytes.
class Manifest {
 public:
  Manifest(std::string command, std::filesystem::path out_dir);

  nlohmann::json& settings() { return settings_; }
  void add_input(const std::filesystem::path& path);
  /// Writes `text` to out_dir/name and records its hash.
  void write_output(const std::string& name, const std::string& text);
  /// Writes manifest.json.
  void finish() const;

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  nlohmann::json settings_ = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

}  // namespace seismon::cli

#include "manifest.hpp"

#include "seismon/error.hpp"
#include "seismon/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>

namespace seismon::cli {

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1)
    throw IoError("SHA-256 computation failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(io::read_text(path)); }

Manifest::Manifest(std::string command, std::filesystem::path out_dir)
    : command_(std::move(command)), out_dir_(std::move(out_dir)) {
  std::filesystem::create_directories(out_dir_);
}

void Manifest::add_input(const std::filesystem::path& path) {
  inputs_.emplace_back(path.string(), sha256_file(path));
}

void Manifest::write_output(const std::string& name, const std::string& text) {
  io::write_text(out_dir_ / name, text);
  outputs_.emplace_back(name, sha256_hex(text));
}

void Manifest::finish() const {
  nlohmann::json j;
  j["tool"] = "seismon";
  j["version"] = SEISMON_VERSION;
  j["command"] = command_;
  j["settings"] = settings_;
  j["inputs"] = nlohmann::json::array();
  for (const auto& [path, hash] : inputs_) j["inputs"].push_back({{"path", path}, {"sha256", hash}});
  j["outputs"] = nlohmann::json::array();
  for (const auto& [name, hash] : outputs_) j["outputs"].push_back({{"file", name}, {"sha256", hash}});
  io::write_text(out_dir_ / "manifest.json", j.dump(2) + "\n");
}

}  // namespace seismon::cli

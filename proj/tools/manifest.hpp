#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace nnse::cli {

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);
std::string sha256_bytes(const std::string& bytes);

// UTC, second resolution: 2024-01-31T12:00:00Z
std::string utc_timestamp();

// Run record written as manifest.json into every output directory.
class RunManifest {
public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
  // Values decided during the run, such as a tuned lambda.
  void set_result(nlohmann::ordered_json result) { result_ = std::move(result); }
  void add_input(const std::string& path);
  // `file` is relative to the output directory.
  void add_output(const std::string& dir, const std::string& file);
  // Stamps the finish time and writes <dir>/manifest.json.
  void write(const std::string& dir);

  nlohmann::ordered_json to_json() const;

private:
  std::string command_;
  std::vector<std::string> argv_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json result_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
  std::string started_;
  std::string finished_;
};

struct DigestCheck {
  std::string file;
  bool ok = false;
};

// Recomputes every input and output digest listed in <dir>/manifest.json.
std::vector<DigestCheck> verify_manifest(const std::string& dir);

}  // namespace nnse::cli

#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#include "nnse/errors.hpp"
#include "nnse/io.hpp"

#ifndef NNSE_VERSION
#define NNSE_VERSION "0.0.0"
#endif

namespace nnse::cli {

namespace {

using Ctx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

Ctx new_context() {
  Ctx ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest initialisation failed");
  return ctx;
}

std::string finish(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, md.data(), &len) != 1) throw std::runtime_error("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

}  // namespace

std::string sha256_bytes(const std::string& bytes) {
  auto ctx = new_context();
  EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size());
  return finish(ctx.get());
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  auto ctx = new_context();
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return finish(ctx.get());
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), started_(utc_timestamp()) {}

void RunManifest::add_input(const std::string& path) {
  inputs_.push_back({{"path", std::filesystem::absolute(path).lexically_normal().string()},
                     {"sha256", sha256_file(path)}});
}

void RunManifest::add_output(const std::string& dir, const std::string& file) {
  outputs_.push_back({{"file", file}, {"sha256", sha256_file((std::filesystem::path(dir) / file).string())}});
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = NNSE_VERSION;
  j["command"] = command_;
  j["argv"] = argv_;
  j["config"] = config_;
  j["result"] = result_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  j["started"] = started_;
  j["finished"] = finished_;
  return j;
}

void RunManifest::write(const std::string& dir) {
  finished_ = utc_timestamp();
  io::write_file((std::filesystem::path(dir) / "manifest.json").string(), to_json().dump(2) + "\n");
}

std::vector<DigestCheck> verify_manifest(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / "manifest.json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  std::vector<DigestCheck> out;
  auto check = [&](const std::string& label, const std::string& file, const std::string& expect) {
    bool ok = false;
    if (std::filesystem::exists(file)) ok = sha256_file(file) == expect;
    out.push_back({label, ok});
  };
  try {
    for (const auto& in : j.at("inputs")) {
      const auto p = in.at("path").get<std::string>();
      check(p, p, in.at("sha256").get<std::string>());
    }
    for (const auto& o : j.at("outputs")) {
      const auto f = o.at("file").get<std::string>();
      check(f, (std::filesystem::path(dir) / f).string(), o.at("sha256").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace nnse::cli

#include "dlab/manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "dlab/errors.hpp"

namespace dlab {

namespace fs = std::filesystem;

namespace {

using DigestCtx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

DigestCtx new_ctx() {
  DigestCtx ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("cannot initialise SHA-256");
  }
  return ctx;
}

std::string finish(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, md.data(), &len) != 1) throw IoError("SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  auto ctx = new_ctx();
  EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size());
  return finish(ctx.get());
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  auto ctx = new_ctx();
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
  return finish(ctx.get());
}

RunManifest::RunManifest(std::string command, fs::path root)
    : command_(std::move(command)), root_(std::move(root)) {}

void RunManifest::set_config(const nlohmann::json& echo, const std::string& source) {
  config_ = echo;
  config_source_ = source;
}

void RunManifest::add_input(const fs::path& path) { inputs_.push_back(path); }
void RunManifest::add_output(const fs::path& path) { outputs_.push_back(path); }
void RunManifest::add_outputs(const std::vector<fs::path>& paths) {
  outputs_.insert(outputs_.end(), paths.begin(), paths.end());
}

void RunManifest::verdict(const std::string& name, const nlohmann::json& value) {
  verdicts_[name] = value;
}

std::string RunManifest::relative(const fs::path& p) const {
  std::error_code ec;
  const auto rel = fs::relative(p, root_, ec);
  if (ec || rel.empty() || *rel.begin() == "..") return p.generic_string();
  return rel.generic_string();
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command_;
  j["versions"] = {{"dlab", kVersion},
                   {"compiler", __VERSION__},
                   {"cxx_standard", static_cast<long>(__cplusplus)},
                   {"openssl", OPENSSL_VERSION_TEXT}};
  j["seed"] = seed_;
  j["threads"] = threads_;
  j["config"] = {{"source", config_source_}, {"values", config_}};
  if (!config_source_.empty() && fs::exists(config_source_)) {
    j["config"]["sha256"] = sha256_file(config_source_);
  }
  j["inputs"] = nlohmann::json::array();
  for (const auto& p : inputs_) j["inputs"].push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p)}});
  j["outputs"] = nlohmann::json::array();
  for (const auto& p : outputs_) {
    j["outputs"].push_back(
        {{"path", relative(p)}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
  }
  j["verdicts"] = verdicts_;
  return j;
}

fs::path RunManifest::write() const {
  const auto path = root_ / "manifest.json";
  const auto text = to_json().dump(2);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text << '\n';
  return path;
}

}  // namespace dlab

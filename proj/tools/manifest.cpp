#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "warpzsl/error.hpp"

#ifndef WARPZSL_VERSION
#define WARPZSL_VERSION "dev"
#endif

namespace warpzsl::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

void RunManifest::write_next_to(const std::filesystem::path& artifact) const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["tool_version"] = WARPZSL_VERSION;
  doc["seed"] = seed;
  doc["config"] = config;
  auto& fingerprints = doc["inputs"] = nlohmann::ordered_json::object();
  for (const auto& p : inputs) fingerprints[p.string()] = sha256_file(p);
  auto& produced = doc["outputs"] = nlohmann::ordered_json::object();
  for (const auto& p : outputs) produced[p.string()] = sha256_file(p);

  auto path = artifact;
  path += ".manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace warpzsl::cli

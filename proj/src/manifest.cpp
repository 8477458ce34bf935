#include "wavecast/manifest.hpp"

#include "wavecast/error.hpp"

#include <openssl/evp.h>

#include <memory>

namespace wavecast {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1)
    throw Error(ErrorKind::Io, "sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  auto list = [](const auto& entries) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [name, digest] : entries) arr.push_back({{"name", name}, {"sha256", digest}});
    return arr;
  };
  j["inputs"] = list(inputs);
  j["outputs"] = list(outputs);
  return j.dump(2) + "\n";
}

}  // namespace wavecast

#include "pdelab/manifest.hpp"

#include <sys/utsname.h>

#include <array>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <thread>

#include <openssl/evp.h>

#include "pdelab/surrogate.hpp"
#include "pdelab/textio.hpp"

namespace pdelab {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  hex.reserve(2 * len);
  static constexpr char kDigits[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kDigits[md[i] >> 4]);
    hex.push_back(kDigits[md[i] & 0xF]);
  }
  return hex;
}

nlohmann::json machine_descriptor() {
  nlohmann::json m;
  utsname u{};
  if (uname(&u) == 0) {
    m["os"] = std::string(u.sysname) + " " + u.release;
    m["arch"] = u.machine;
  }
  m["hardware_threads"] = std::thread::hardware_concurrency();
  m["generation_threads"] = generation_threads();
#if defined(__clang__)
  m["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
  m["compiler"] = "gcc " __VERSION__;
#endif
#ifdef NDEBUG
  m["build"] = "release";
#else
  m["build"] = "debug";
#endif
  return m;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

RunWriter::RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

void RunWriter::write(const std::string& name, std::string_view contents, bool timing_dependent) {
  write_file(dir_ / name, contents);
  files_.push_back({name, sha256_hex(contents), contents.size(), timing_dependent});
}

void RunWriter::write_json(const std::string& name, const nlohmann::json& j, bool timing_dependent) {
  write(name, dump(j), timing_dependent);
}

void RunWriter::finish(nlohmann::json body) {
  body["tool"] = kToolName;
  body["version"] = PDELAB_VERSION;
  body["machine"] = machine_descriptor();
  nlohmann::json inventory = nlohmann::json::array();
  for (const auto& f : files_)
    inventory.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}, {"timing_dependent", f.timing_dependent}});
  body["files"] = inventory;
  write_file(dir_ / "manifest.json", dump(body));
}

}  // namespace pdelab

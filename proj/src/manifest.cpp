#include "sns/manifest.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sns {

std::string code_version() { return "0.1.0"; }

std::string file_digest(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (is) {
    is.read(buf, sizeof buf);
    const std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  std::ostringstream os;
  os << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) os << ((h >> shift) & 0xF);
  return os.str();
}

void write_manifest(const std::string& dir, const RunManifest& manifest) {
  nlohmann::json j;
  j["config"] = manifest.config_echo;
  j["seed"] = manifest.seed;
  j["version"] = manifest.version;
  j["started"] = manifest.started;
  j["finished"] = manifest.finished;
  j["outputs"] = manifest.output_digests;
  std::ofstream os(dir + "/manifest.json", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write manifest in " + dir);
  os << j.dump(2) << "\n";
}

bool verify_manifest(const std::string& dir, RunManifest& manifest, std::string& error) {
  std::ifstream is(dir + "/manifest.json");
  if (!is) {
    error = "missing manifest.json in " + dir;
    return false;
  }
  nlohmann::json j;
  try {
    is >> j;
    manifest.seed = j.value("seed", 0ull);
    manifest.version = j.value("version", "");
    manifest.started = j.value("started", "");
    manifest.finished = j.value("finished", "");
    manifest.config_echo = j.value("config", std::map<std::string, std::string>{});
    manifest.output_digests = j.value("outputs", std::map<std::string, std::string>{});
  } catch (const std::exception& e) {
    error = std::string("corrupt manifest: ") + e.what();
    return false;
  }
  for (const auto& [file, digest] : manifest.output_digests) {
    std::string actual;
    try {
      actual = file_digest(dir + "/" + file);
    } catch (const std::exception&) {
      error = "missing output file " + file;
      return false;
    }
    if (actual != digest) {
      error = "digest mismatch for " + file;
      return false;
    }
  }
  return true;
}

}  // namespace sns

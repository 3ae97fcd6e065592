#pragma once

#include <map>
#include <string>

namespace sns {

// FNV-1a 64-bit digest of a file's bytes, as 16 lowercase hex digits.
std::string file_digest(const std::string& path);

// Run manifest: config echo, seed, code version, wall-clock bounds and
// per-file digests of everything the run emitted.  Exactly one manifest per
// output directory (manifest.json).
struct RunManifest {
  std::map<std::string, std::string> config_echo;
  std::uint64_t seed = 0;
  std::string version;
  std::string started;
  std::string finished;
  std::map<std::string, std::string> output_digests;  // file name -> digest
};

void write_manifest(const std::string& dir, const RunManifest& manifest);

// Loads dir/manifest.json and re-hashes the listed outputs.  Returns false
// (with a message) on a missing manifest, unreadable file or digest mismatch.
bool verify_manifest(const std::string& dir, RunManifest& manifest, std::string& error);

std::string code_version();

}  // namespace sns

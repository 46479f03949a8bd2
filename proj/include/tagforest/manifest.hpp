#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace tagforest {

// Provenance record written next to every CLI output as
// <stem>.manifest.json.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;  // resolved, in flag order
  std::vector<std::filesystem::path> inputs;
  unsigned long long seed = 0;
  double wall_seconds = 0.0;
};

// FNV-1a 64 of the file bytes as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& output);
std::string format_manifest(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& output);

}  // namespace tagforest

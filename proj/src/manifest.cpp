#include "tagforest/manifest.hpp"

#include <cstdio>

#include "json.hpp"
#include "tagforest/embeddings.hpp"
#include "tagforest/io.hpp"

namespace tagforest {

std::string file_digest(const std::filesystem::path& path) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(read_file(path))));
  return buf;
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return output.parent_path() / (output.stem().string() + ".manifest.json");
}

std::string format_manifest(const RunManifest& m) {
  nlohmann::ordered_json obj;
  obj["tool"] = "tagforest";
  obj["version"] = TAGFOREST_VERSION;
  obj["command"] = m.command;
  auto& params = obj["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.parameters) params[k] = v;
  auto& inputs = obj["inputs"] = nlohmann::ordered_json::array();
  for (const auto& p : m.inputs) inputs.push_back({{"path", p.string()}, {"fnv1a64", file_digest(p)}});
  obj["seed"] = m.seed;
  obj["wall_seconds"] = m.wall_seconds;
  return obj.dump(1) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& output) {
  write_file(manifest_path(output), format_manifest(manifest));
}

}  // namespace tagforest

#include <unordered_map>

#include "json.hpp"
#include "tagforest/error.hpp"
#include "tagforest/io.hpp"
#include "tagforest/sampler.hpp"

namespace tagforest {

using nlohmann::ordered_json;

std::string format_subset(const SampleResult& result, std::span<const AnchoredRecord> records,
                          const Pool* original_pool) {
  std::unordered_map<std::string_view, const Instance*> by_id;
  if (original_pool) {
    for (const auto& inst : *original_pool) by_id.emplace(inst.id, &inst);
  }
  std::string out;
  for (std::size_t k = 0; k < result.selected.size(); ++k) {
    const auto& rec = records[result.selected[k]];
    const auto& pick = result.trace.picks[k];
    ordered_json obj;
    if (original_pool) {
      auto it = by_id.find(rec.id);
      if (it == by_id.end()) throw InputError("selected id '" + rec.id + "' is missing from the original pool");
      const auto& inst = *it->second;
      obj["id"] = inst.id;
      obj["query"] = inst.query;
      obj["response"] = inst.response;
      obj["tags"] = inst.tags;
      obj["quality"] = inst.quality;
      obj["complexity"] = inst.complexity;
    } else {
      obj["id"] = rec.id;
      obj["quality"] = rec.quality;
      obj["complexity"] = rec.complexity;
    }
    obj["pick"] = pick.iteration;
    obj["score"] = pick.score;
    obj["leaves"] = rec.leaves;
    obj["gain"] = pick.gain;
    obj["joint"] = pick.joint;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void export_subset(const SampleResult& result, std::span<const AnchoredRecord> records, const Pool* original_pool,
                   const std::filesystem::path& path) {
  write_file(path, format_subset(result, records, original_pool));
}

std::string format_trace(const SelectionTrace& trace) {
  ordered_json obj;
  obj["mode"] = trace.mode == SamplingMode::kAligned ? "aligned" : "general";
  obj["budget"] = trace.budget;
  obj["pool_size"] = trace.pool_size;
  obj["selected"] = trace.picks.size();
  obj["excluded"] = trace.excluded;
  obj["final_information"] = trace.final_information;
  obj["final_kl"] = trace.final_kl ? ordered_json(*trace.final_kl) : ordered_json(nullptr);
  auto& picks = obj["picks"] = ordered_json::array();
  for (const auto& p : trace.picks) {
    ordered_json row;
    row["iteration"] = p.iteration;
    row["id"] = p.id;
    row["score"] = p.score;
    row["gain"] = p.gain;
    row["kl"] = p.kl ? ordered_json(*p.kl) : ordered_json(nullptr);
    row["joint"] = p.joint;
    picks.push_back(std::move(row));
  }
  return obj.dump(1) + "\n";
}

}  // namespace tagforest

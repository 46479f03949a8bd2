#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tagforest/anchoring.hpp"
#include "tagforest/embeddings.hpp"
#include "tagforest/instance.hpp"
#include "tagforest/report.hpp"
#include "tagforest/target.hpp"
#include "tagforest/tree.hpp"

namespace tagforest {

// ---- instances (pool.jsonl) ------------------------------------------------

// Total parse: every non-blank line yields an instance or a located error,
// so instances.size() + report.error_count() == lines.
struct InstanceParse {
  Pool instances;
  ValidationReport report;
  std::size_t lines = 0;
};

InstanceParse parse_instances(std::istream& in, std::string_view source = "<stream>");
// Throws ParseError at the first bad line.
Pool load_instances(const std::filesystem::path& path);
std::string format_instance(const Instance& instance);
void save_instances(std::span<const Instance> pool, const std::filesystem::path& path);

// Min-max scales quality and complexity independently to [0, 1]; a constant
// column maps to 0.5. Throws InputError naming the instance on a non-finite
// score.
Pool normalize_scores(Pool pool);

// ---- embeddings (embeddings.tsv) -------------------------------------------

// Header `dim=<d> count=<n>` followed by `key<TAB>v1 v2 ... vd` rows.
EmbeddingTable parse_embeddings(std::istream& in, std::string_view source = "<stream>");
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

// ---- tree (tree.json) ------------------------------------------------------

std::string format_tree(const TagTree& tree);
// Throws InvalidTreeError when the node list violates a tree invariant and
// InputError on schema problems.
TagTree parse_tree(std::string_view json);
void save_tree(const TagTree& tree, const std::filesystem::path& path);
TagTree load_tree(const std::filesystem::path& path);

// ---- target (target.json) --------------------------------------------------

// JSON object mapping leaf names to weights.
TargetDistribution parse_target(std::string_view json, const TagTree& tree);
TargetDistribution load_target(const std::filesystem::path& path, const TagTree& tree);
std::string format_target(const TargetDistribution& target, const TagTree& tree);

// ---- anchored records (anchored.jsonl / subset.jsonl) ----------------------

std::string format_anchored(std::span<const AnchoredRecord> records);
void save_anchored(std::span<const AnchoredRecord> records, const std::filesystem::path& path);
// Reads id/leaves/quality/complexity (dropped optional). Accepts subset.jsonl
// rows as well, since those carry the same keys.
std::vector<AnchoredRecord> parse_anchored(std::istream& in, std::string_view source = "<stream>");
std::vector<AnchoredRecord> load_anchored(const std::filesystem::path& path);

// ---- misc ------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace tagforest

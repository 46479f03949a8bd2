// tagforest: build a tag tree, anchor a pool, derive targets, sample subsets
// and summarize them.
//
// Exit codes: 0 success, 1 internal error, 2 user or input error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tagforest/anchoring.hpp"
#include "tagforest/error.hpp"
#include "tagforest/io.hpp"
#include "tagforest/manifest.hpp"
#include "tagforest/objective.hpp"
#include "tagforest/sampler.hpp"
#include "tagforest/stats.hpp"
#include "tagforest/tree_builder.hpp"

namespace fs = std::filesystem;
using namespace tagforest;

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::vector<std::string> read_tags(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> tags;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tags.push_back(line);
  }
  return tags;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct BuildTreeArgs {
  std::string tags, embeddings, out = "tree.json";
  int depth = 10;
  double branching = 10.0;
  std::size_t clusters = 0;
  unsigned long long seed = 0;
  int iters = 100;
};

int run_build_tree(const BuildTreeArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tags = read_tags(a.tags);
  const auto table = load_embeddings(a.embeddings);
  TreeBuildConfig cfg;
  cfg.depth_limit = a.depth;
  cfg.branching_ratio = a.branching;
  if (a.clusters > 0) cfg.clusters_per_level = a.clusters;
  cfg.seed = a.seed;
  cfg.kmeans_iters = a.iters;
  auto result = build_tree(tags, table, cfg);
  std::cerr << result.report.to_string();
  save_tree(result.tree, a.out);

  RunManifest m{"build-tree",
                {{"tags", a.tags},
                 {"embeddings", a.embeddings},
                 {"depth", std::to_string(a.depth)},
                 {"branching", num(a.branching)},
                 {"clusters", std::to_string(a.clusters)},
                 {"kmeans_iters", std::to_string(a.iters)},
                 {"out", a.out}},
                {a.tags, a.embeddings},
                a.seed,
                seconds_since(t0)};
  write_manifest(m, a.out);
  std::cout << "nodes: " << result.tree.size() << "\nleaves: " << result.tree.leaf_count()
            << "\ndepth: " << result.tree.max_depth() << "\n";
  return 0;
}

struct AnchorArgs {
  std::string tree, pool, embeddings, out = "anchored.jsonl";
  double min_sim = kDefaultMinSimilarity;
  unsigned threads = 1;
};

int run_anchor(const AnchorArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tree = load_tree(a.tree);
  const auto pool = normalize_scores(load_instances(a.pool));
  std::optional<EmbeddingTable> table;
  if (!a.embeddings.empty()) table = load_embeddings(a.embeddings);
  auto anchored = anchor_pool(pool, tree, table ? &*table : nullptr, a.min_sim, a.threads);
  const auto records = to_records(pool, anchored.profiles, tree);
  save_anchored(records, a.out);

  nlohmann::ordered_json drops;
  drops["dropped"] = nlohmann::ordered_json::array();
  drops["unanchorable"] = nlohmann::ordered_json::array();
  std::size_t unanchorable = 0;
  for (const auto& p : anchored.profiles) {
    for (const auto& t : p.dropped) drops["dropped"].push_back({{"id", p.instance_id}, {"tag", t}});
    if (!p.anchorable()) {
      drops["unanchorable"].push_back(p.instance_id);
      ++unanchorable;
    }
  }
  const fs::path out(a.out);
  write_file(out.parent_path() / (out.stem().string() + ".drops.json"), drops.dump(1) + "\n");

  std::vector<fs::path> inputs{a.tree, a.pool};
  if (!a.embeddings.empty()) inputs.emplace_back(a.embeddings);
  RunManifest m{"anchor",
                {{"tree", a.tree},
                 {"pool", a.pool},
                 {"embeddings", a.embeddings},
                 {"min_sim", num(a.min_sim)},
                 {"out", a.out}},
                inputs,
                0,
                seconds_since(t0)};
  write_manifest(m, a.out);
  std::cout << "instances: " << records.size() << "\nunanchorable: " << unanchorable
            << "\ndropped_tags: " << drops["dropped"].size() << "\n";
  return 0;
}

struct DeriveArgs {
  std::string reference, tree, out = "target.json";
};

int run_derive_target(const DeriveArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tree = load_tree(a.tree);
  const auto reference = load_anchored(a.reference);
  const auto q = derive_target(reference, tree);
  write_file(a.out, format_target(q, tree));
  RunManifest m{"derive-target", {{"reference", a.reference}, {"tree", a.tree}, {"out", a.out}},
                {a.reference, a.tree}, 0, seconds_since(t0)};
  write_manifest(m, a.out);
  std::cout << "support: " << q.support().size() << "\n";
  return 0;
}

struct SampleArgs {
  std::string anchored, tree, target, pool, mode, out = "subset.jsonl", trace = "trace.json";
  std::size_t budget = 0;
  double alpha = 0.8, gamma = 0.85, lambda = 0.0, epsilon = 1e-9;
  unsigned long long seed = 0;
  unsigned threads = 1;
};

int run_sample(const SampleArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  SamplerConfig cfg;
  cfg.budget = a.budget;
  cfg.objective = {a.alpha, a.gamma, a.lambda, a.epsilon};
  cfg.seed = a.seed;
  cfg.workers = a.threads;
  if (a.mode.empty()) {
    cfg.mode = a.lambda > 0.0 ? SamplingMode::kAligned : SamplingMode::kGeneral;
  } else {
    cfg.mode = a.mode == "aligned" ? SamplingMode::kAligned : SamplingMode::kGeneral;
  }
  if (cfg.mode == SamplingMode::kGeneral && a.lambda > 0.0)
    throw InputError("--lambda > 0 needs aligned mode");
  if (cfg.mode == SamplingMode::kAligned && a.target.empty()) throw InputError("aligned mode requires target");
  cfg.objective.validate();

  const auto tree = load_tree(a.tree);
  const auto records = load_anchored(a.anchored);
  std::optional<TargetDistribution> target;
  if (!a.target.empty()) target = load_target(a.target, tree);
  std::optional<Pool> pool;
  if (!a.pool.empty()) pool = load_instances(a.pool);

  auto result = sample(records, tree, cfg, target ? &*target : nullptr);
  std::cerr << result.report.to_string();
  export_subset(result, records, pool ? &*pool : nullptr, a.out);
  write_file(a.trace, format_trace(result.trace));

  std::vector<fs::path> inputs{a.anchored, a.tree};
  if (!a.target.empty()) inputs.emplace_back(a.target);
  if (!a.pool.empty()) inputs.emplace_back(a.pool);
  RunManifest m{"sample",
                {{"anchored", a.anchored},
                 {"tree", a.tree},
                 {"target", a.target},
                 {"pool", a.pool},
                 {"budget", std::to_string(a.budget)},
                 {"alpha", num(a.alpha)},
                 {"gamma", num(a.gamma)},
                 {"lambda", num(a.lambda)},
                 {"epsilon", num(a.epsilon)},
                 {"mode", cfg.mode == SamplingMode::kAligned ? "aligned" : "general"},
                 {"out", a.out},
                 {"trace", a.trace}},
                inputs,
                a.seed,
                seconds_since(t0)};
  write_manifest(m, a.out);

  std::cout << "picks: " << result.trace.picks.size() << "\nfinal_information: " << num(result.trace.final_information)
            << "\nfinal_kl: " << (result.trace.final_kl ? num(*result.trace.final_kl) : std::string("n/a")) << "\n";
  return 0;
}

struct StatsArgs {
  std::string input, tree, target;
  double alpha = 0.8, epsilon = 1e-9;
};

int run_stats(const StatsArgs& a) {
  const auto tree = load_tree(a.tree);
  const auto records = load_anchored(a.input);
  std::optional<TargetDistribution> target;
  if (!a.target.empty()) target = load_target(a.target, tree);
  const auto s = compute_stats(records, tree, target ? &*target : nullptr, a.alpha, a.epsilon);
  std::cout << format_stats(s, tree);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tagforest: tag-tree data selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(TAGFOREST_VERSION));

  BuildTreeArgs bt;
  auto* build = app.add_subcommand("build-tree", "Cluster tags into a hierarchical tag tree");
  build->add_option("--tags", bt.tags, "Tag list, one per line")->required();
  build->add_option("--embeddings", bt.embeddings, "embeddings.tsv")->required();
  build->add_option("--depth", bt.depth, "Maximum tree depth")->capture_default_str();
  build->add_option("--branching", bt.branching, "Per-level reduction ratio")->capture_default_str();
  build->add_option("--clusters", bt.clusters, "Fixed cluster count per level (overrides --branching)");
  build->add_option("--seed", bt.seed, "Random seed")->capture_default_str();
  build->add_option("--kmeans-iters", bt.iters, "Lloyd iteration cap")->capture_default_str();
  build->add_option("--out", bt.out, "Output tree.json")->capture_default_str();

  AnchorArgs an;
  auto* anchor = app.add_subcommand("anchor", "Map instance tags onto tree leaves");
  anchor->add_option("--tree", an.tree, "tree.json")->required();
  anchor->add_option("--pool", an.pool, "pool.jsonl")->required();
  anchor->add_option("--embeddings", an.embeddings, "embeddings.tsv with tag vectors");
  anchor->add_option("--min-sim", an.min_sim, "Minimum cosine similarity")->capture_default_str();
  anchor->add_option("--threads", an.threads, "Worker threads")->capture_default_str();
  anchor->add_option("--out", an.out, "Output anchored.jsonl")->capture_default_str();

  DeriveArgs dt;
  auto* derive = app.add_subcommand("derive-target", "Leaf distribution of an anchored reference set");
  derive->add_option("--reference", dt.reference, "Anchored reference jsonl")->required();
  derive->add_option("--tree", dt.tree, "tree.json")->required();
  derive->add_option("--out", dt.out, "Output target.json")->capture_default_str();

  SampleArgs sa;
  auto* samp = app.add_subcommand("sample", "Greedy budgeted subset selection");
  samp->add_option("--anchored", sa.anchored, "anchored.jsonl")->required();
  samp->add_option("--tree", sa.tree, "tree.json")->required();
  samp->add_option("--budget", sa.budget, "Number of instances to select")->required();
  samp->add_option("--alpha", sa.alpha, "Quality weight in the composite score")->capture_default_str();
  samp->add_option("--gamma", sa.gamma, "Exponent of the concave utility")->capture_default_str();
  samp->add_option("--lambda", sa.lambda, "KL alignment strength")->capture_default_str();
  samp->add_option("--epsilon", sa.epsilon, "Leaf-count smoothing in the KL term")->capture_default_str();
  samp->add_option("--target", sa.target, "target.json (leaf name -> weight)");
  samp->add_option("--mode", sa.mode, "general or aligned (default: aligned iff lambda > 0)")
      ->check(CLI::IsMember({"general", "aligned"}));
  samp->add_option("--pool", sa.pool, "Original pool.jsonl for full-record export");
  samp->add_option("--seed", sa.seed, "Random seed (recorded in the manifest)")->capture_default_str();
  samp->add_option("--threads", sa.threads, "Worker threads")->capture_default_str();
  samp->add_option("--out", sa.out, "Output subset.jsonl")->capture_default_str();
  samp->add_option("--trace", sa.trace, "Output trace.json")->capture_default_str();

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Summarize an anchored or subset file");
  stats->add_option("--input", st.input, "anchored.jsonl or subset.jsonl")->required();
  stats->add_option("--tree", st.tree, "tree.json")->required();
  stats->add_option("--target", st.target, "target.json");
  stats->add_option("--alpha", st.alpha, "Quality weight for composite quantiles")->capture_default_str();
  stats->add_option("--epsilon", st.epsilon, "Leaf-count smoothing in the KL term")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*build) return run_build_tree(bt);
    if (*anchor) return run_anchor(an);
    if (*derive) return run_derive_target(dt);
    if (*samp) return run_sample(sa);
    if (*stats) return run_stats(st);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

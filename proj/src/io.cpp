#include "tagforest/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "tagforest/error.hpp"

namespace tagforest {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw InputError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError(std::string("field '") + key + "' must be finite");
  return d;
}

std::vector<std::string> require_strings(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_array()) throw InputError(std::string("field '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw InputError(std::string("field '") + key + "' must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Instance instance_from_json(const json& obj) {
  if (!obj.is_object()) throw InputError("record is not a JSON object");
  Instance inst;
  inst.id = require_string(obj, "id");
  if (inst.id.empty()) throw InputError("field 'id' must be non-empty");
  inst.query = require_string(obj, "query");
  inst.response = require_string(obj, "response");
  inst.tags = require_strings(obj, "tags");
  inst.quality = require_number(obj, "quality");
  inst.complexity = require_number(obj, "complexity");
  return inst;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

// ---- instances -------------------------------------------------------------

InstanceParse parse_instances(std::istream& in, std::string_view source) {
  InstanceParse out;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    ++out.lines;
    const auto where = std::string(source) + ":" + std::to_string(lineno);
    try {
      auto obj = json::parse(line);
      auto inst = instance_from_json(obj);
      auto [it, fresh] = first_line.emplace(inst.id, lineno);
      if (!fresh) {
        out.report.add_error(where, "duplicate id '" + inst.id + "' (first on line " + std::to_string(it->second) + ")");
        continue;
      }
      out.instances.push_back(std::move(inst));
    } catch (const json::exception& e) {
      out.report.add_error(where, std::string("malformed JSON: ") + e.what());
    } catch (const InputError& e) {
      out.report.add_error(where, e.what());
    }
  }
  return out;
}

Pool load_instances(const std::filesystem::path& path) {
  auto in = open_input(path);
  auto parsed = parse_instances(in, path.string());
  if (parsed.report.has_errors()) {
    const auto& e = parsed.report.entries().front();
    const auto colon = e.location.rfind(':');
    throw ParseError(path.string(), std::stoul(e.location.substr(colon + 1)), e.message);
  }
  return std::move(parsed.instances);
}

std::string format_instance(const Instance& inst) {
  ordered_json obj;
  obj["id"] = inst.id;
  obj["query"] = inst.query;
  obj["response"] = inst.response;
  obj["tags"] = inst.tags;
  obj["quality"] = inst.quality;
  obj["complexity"] = inst.complexity;
  return obj.dump();
}

void save_instances(std::span<const Instance> pool, const std::filesystem::path& path) {
  std::string out;
  for (const auto& inst : pool) {
    out += format_instance(inst);
    out += '\n';
  }
  write_file(path, out);
}

Pool normalize_scores(Pool pool) {
  if (pool.empty()) return pool;
  for (const auto& inst : pool) {
    if (!std::isfinite(inst.quality) || !std::isfinite(inst.complexity))
      throw InputError("instance '" + inst.id + "' has a non-finite score");
  }
  auto rescale = [&pool](double Instance::*field) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& inst : pool) {
      lo = std::min(lo, inst.*field);
      hi = std::max(hi, inst.*field);
    }
    for (auto& inst : pool) {
      if (hi == lo) {
        inst.*field = 0.5;
      } else {
        inst.*field = std::clamp((inst.*field - lo) / (hi - lo), 0.0, 1.0);
      }
    }
  };
  rescale(&Instance::quality);
  rescale(&Instance::complexity);
  return pool;
}

// ---- embeddings ------------------------------------------------------------

EmbeddingTable parse_embeddings(std::istream& in, std::string_view source) {
  const std::string src(source);
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank(line)) break;
  }
  {
    std::istringstream hs(line);
    std::string a, b;
    hs >> a >> b;
    if (a.rfind("dim=", 0) != 0 || b.rfind("count=", 0) != 0)
      throw ParseError(src, lineno, "expected header 'dim=<d> count=<n>'");
    try {
      dim = std::stoul(a.substr(4));
      count = std::stoul(b.substr(6));
    } catch (const std::exception&) {
      throw ParseError(src, lineno, "malformed header numbers");
    }
    if (dim == 0) throw ParseError(src, lineno, "dimension must be positive");
  }
  EmbeddingTable table(dim);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(src, lineno, "expected 'key<TAB>values'");
    std::string key = line.substr(0, tab);
    std::vector<double> values;
    std::istringstream vs(line.substr(tab + 1));
    std::string tok;
    while (vs >> tok) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(src, lineno, "embedding '" + key + "': bad number '" + tok + "'");
      }
    }
    try {
      table.insert(std::move(key), std::move(values));
    } catch (const InputError& e) {
      throw ParseError(src, lineno, e.what());
    }
  }
  if (table.size() != count) {
    throw ParseError(src, lineno, "header declares " + std::to_string(count) + " rows, found " +
                                      std::to_string(table.size()));
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_embeddings(in, path.string());
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  out << "dim=" << table.dimension() << " count=" << table.size() << '\n';
  for (const auto& key : table.keys()) {
    out << key << '\t';
    auto v = *table.find(key);
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    out << '\n';
  }
  write_file(path, out.str());
}

// ---- tree ------------------------------------------------------------------

std::string format_tree(const TagTree& tree) {
  ordered_json root;
  root["format"] = "tagforest-tree";
  root["version"] = 1;
  auto& nodes = root["nodes"] = ordered_json::array();
  for (const auto& n : tree.nodes()) {
    ordered_json obj;
    obj["id"] = n.id;
    obj["name"] = n.name;
    obj["parent"] = n.parent ? ordered_json(*n.parent) : ordered_json(nullptr);
    obj["children"] = n.children;
    obj["depth"] = n.depth;
    if (n.embedding) obj["embedding"] = *n.embedding;
    nodes.push_back(std::move(obj));
  }
  return root.dump(1) + "\n";
}

TagTree parse_tree(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("tree: malformed JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("nodes") || !root["nodes"].is_array())
    throw InputError("tree: expected an object with a 'nodes' array");
  std::vector<TreeNode> nodes;
  std::size_t pos = 0;
  for (const auto& obj : root["nodes"]) {
    const auto where = "tree: node at position " + std::to_string(pos++) + ": ";
    try {
      if (!obj.is_object()) throw InputError("not an object");
      TreeNode n;
      const auto& id = require(obj, "id");
      if (!id.is_number_integer()) throw InputError("field 'id' must be an integer");
      n.id = id.get<NodeId>();
      n.name = require_string(obj, "name");
      const auto& parent = require(obj, "parent");
      if (parent.is_number_integer()) {
        n.parent = parent.get<NodeId>();
      } else if (!parent.is_null()) {
        throw InputError("field 'parent' must be an integer or null");
      }
      const auto& children = require(obj, "children");
      if (!children.is_array()) throw InputError("field 'children' must be an array");
      for (const auto& c : children) {
        if (!c.is_number_integer()) throw InputError("field 'children' must hold integers");
        n.children.push_back(c.get<NodeId>());
      }
      const auto& depth = require(obj, "depth");
      if (!depth.is_number_integer()) throw InputError("field 'depth' must be an integer");
      n.depth = depth.get<int>();
      if (auto it = obj.find("embedding"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw InputError("field 'embedding' must be an array");
        std::vector<double> v;
        for (const auto& x : *it) {
          if (!x.is_number()) throw InputError("field 'embedding' must hold numbers");
          v.push_back(x.get<double>());
        }
        n.embedding = std::move(v);
      }
      nodes.push_back(std::move(n));
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  return TagTree::from_nodes(std::move(nodes));
}

void save_tree(const TagTree& tree, const std::filesystem::path& path) { write_file(path, format_tree(tree)); }

TagTree load_tree(const std::filesystem::path& path) { return parse_tree(read_file(path)); }

// ---- target ----------------------------------------------------------------

TargetDistribution parse_target(std::string_view text, const TagTree& tree) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("target: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw InputError("target: expected an object mapping leaf names to weights");
  std::vector<std::pair<NodeId, double>> weights;
  for (const auto& [name, w] : root.items()) {
    auto leaf = tree.find_leaf(name);
    if (!leaf) {
      const bool internal = std::any_of(tree.nodes().begin(), tree.nodes().end(),
                                        [&](const TreeNode& n) { return n.name == name; });
      throw InputError("target key '" + name + "' " + (internal ? "is not a leaf (non-leaf node)" : "names no tree node"));
    }
    if (!w.is_number()) throw InputError("target weight for '" + name + "' must be a number");
    weights.emplace_back(*leaf, w.get<double>());
  }
  return TargetDistribution::from_leaf_weights(tree, weights);
}

TargetDistribution load_target(const std::filesystem::path& path, const TagTree& tree) {
  return parse_target(read_file(path), tree);
}

std::string format_target(const TargetDistribution& target, const TagTree& tree) {
  ordered_json obj = ordered_json::object();
  for (auto j : target.support()) obj[tree.node(tree.leaves()[j]).name] = target.at_leaf_index(j);
  return obj.dump(1) + "\n";
}

// ---- anchored --------------------------------------------------------------

std::string format_anchored(std::span<const AnchoredRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json obj;
    obj["id"] = r.id;
    obj["leaves"] = r.leaves;
    obj["dropped"] = r.dropped;
    obj["quality"] = r.quality;
    obj["complexity"] = r.complexity;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_anchored(std::span<const AnchoredRecord> records, const std::filesystem::path& path) {
  write_file(path, format_anchored(records));
}

std::vector<AnchoredRecord> parse_anchored(std::istream& in, std::string_view source) {
  std::vector<AnchoredRecord> out;
  std::string line;
  std::size_t lineno = 0;
  const std::string src(source);
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      auto obj = json::parse(line);
      if (!obj.is_object()) throw InputError("record is not a JSON object");
      AnchoredRecord r;
      r.id = require_string(obj, "id");
      const auto& leaves = require(obj, "leaves");
      if (!leaves.is_array()) throw InputError("field 'leaves' must be an array of node ids");
      for (const auto& l : leaves) {
        if (!l.is_number_integer()) throw InputError("field 'leaves' must be an array of node ids");
        r.leaves.push_back(l.get<NodeId>());
      }
      if (obj.contains("dropped")) r.dropped = require_strings(obj, "dropped");
      r.quality = require_number(obj, "quality");
      r.complexity = require_number(obj, "complexity");
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(src, lineno, std::string("malformed JSON: ") + e.what());
    } catch (const InputError& e) {
      throw ParseError(src, lineno, e.what());
    }
  }
  return out;
}

std::vector<AnchoredRecord> load_anchored(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_anchored(in, path.string());
}

}  // namespace tagforest

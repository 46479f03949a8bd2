#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tagforest/anchoring.hpp"
#include "tagforest/error.hpp"
#include "tagforest/io.hpp"
#include "tagforest/matrices.hpp"
#include "tagforest/objective.hpp"
#include "tagforest/sampler.hpp"
#include "tagforest/stats.hpp"
#include "tagforest/tree_builder.hpp"

namespace py = pybind11;
using namespace tagforest;

namespace {

EmbeddingTable table_from_dict(const std::map<std::string, std::vector<double>>& vectors) {
  if (vectors.empty()) throw InputError("embedding dict is empty");
  EmbeddingTable table(vectors.begin()->second.size());
  for (const auto& [k, v] : vectors) table.insert(k, v);
  return table;
}

TargetDistribution target_from_dict(const TagTree& tree, const std::map<std::string, double>& weights) {
  std::vector<std::pair<NodeId, double>> w;
  for (const auto& [name, p] : weights) {
    auto leaf = tree.find_leaf(name);
    if (!leaf) throw InputError("target key '" + name + "' is not a leaf");
    w.emplace_back(*leaf, p);
  }
  return TargetDistribution::from_leaf_weights(tree, w);
}

std::map<std::string, double> target_to_dict(const TargetDistribution& q, const TagTree& tree) {
  std::map<std::string, double> out;
  for (auto j : q.support()) out[tree.node(tree.leaves()[j]).name] = q.at_leaf_index(j);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tag-tree construction, anchoring and information-gain subset selection";

  // Translators run newest first, so the more specific type goes last.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<Instance>(m, "Instance")
      .def(py::init<>())
      .def(py::init([](std::string id, std::vector<std::string> tags, double quality, double complexity,
                       std::string query, std::string response) {
             return Instance{std::move(id), std::move(query), std::move(response), std::move(tags), quality,
                             complexity};
           }),
           py::arg("id"), py::arg("tags"), py::arg("quality"), py::arg("complexity"), py::arg("query") = "",
           py::arg("response") = "")
      .def_readwrite("id", &Instance::id)
      .def_readwrite("query", &Instance::query)
      .def_readwrite("response", &Instance::response)
      .def_readwrite("tags", &Instance::tags)
      .def_readwrite("quality", &Instance::quality)
      .def_readwrite("complexity", &Instance::complexity)
      .def("__repr__", [](const Instance& i) { return "<Instance " + i.id + ">"; });

  py::class_<AnchoredRecord>(m, "AnchoredRecord")
      .def(py::init<>())
      .def(py::init([](std::string id, std::vector<NodeId> leaves, double quality, double complexity) {
             return AnchoredRecord{std::move(id), std::move(leaves), {}, quality, complexity};
           }),
           py::arg("id"), py::arg("leaves"), py::arg("quality"), py::arg("complexity"))
      .def_readwrite("id", &AnchoredRecord::id)
      .def_readwrite("leaves", &AnchoredRecord::leaves)
      .def_readwrite("dropped", &AnchoredRecord::dropped)
      .def_readwrite("quality", &AnchoredRecord::quality)
      .def_readwrite("complexity", &AnchoredRecord::complexity);

  py::class_<TagTree>(m, "TagTree")
      .def_static(
          "from_parents",
          [](std::vector<std::string> names, std::vector<std::optional<std::size_t>> parents) {
            return TagTree::from_parent_links(std::move(names), parents);
          },
          py::arg("names"), py::arg("parents"),
          "Build a tree from names and parent indices (None for the root); ids are renumbered breadth-first.")
      .def_static("from_json", [](const std::string& text) { return parse_tree(text); })
      .def_static("load", [](const std::filesystem::path& p) { return load_tree(p); })
      .def("to_json", [](const TagTree& t) { return format_tree(t); })
      .def("save", [](const TagTree& t, const std::filesystem::path& p) { save_tree(t, p); })
      .def("__len__", &TagTree::size)
      .def_property_readonly("names",
                             [](const TagTree& t) {
                               std::vector<std::string> out;
                               for (const auto& n : t.nodes()) out.push_back(n.name);
                               return out;
                             })
      .def_property_readonly("parents",
                             [](const TagTree& t) {
                               std::vector<std::optional<NodeId>> out;
                               for (const auto& n : t.nodes()) out.push_back(n.parent);
                               return out;
                             })
      .def_property_readonly("leaves", &TagTree::leaves)
      .def_property_readonly("max_depth", &TagTree::max_depth)
      .def("find_leaf", &TagTree::find_leaf)
      .def("__eq__", [](const TagTree& a, const TagTree& b) { return a == b; });

  m.def(
      "ancestry_matrix",
      [](const TagTree& tree) {
        const auto mat = build_ancestry_matrix(tree);
        std::vector<std::vector<int>> dense(mat.rows(), std::vector<int>(mat.cols(), 0));
        for (std::size_t j = 0; j < mat.cols(); ++j)
          for (NodeId i : mat.column(j)) dense[static_cast<std::size_t>(i)][j] = 1;
        return dense;
      },
      "Dense |V| x |V_leaf| ancestry matrix.");
  m.def(
      "propagation_matrix",
      [](const TagTree& tree) {
        const auto a = build_propagation_matrix(tree);
        std::vector<std::vector<double>> dense(a.size(), std::vector<double>(a.size(), 0.0));
        for (std::size_t p = 0; p < a.size(); ++p) {
          auto cols = a.row_columns(p);
          auto vals = a.row_values(p);
          for (std::size_t k = 0; k < cols.size(); ++k) dense[p][static_cast<std::size_t>(cols[k])] = vals[k];
        }
        return dense;
      },
      "Dense |V| x |V| propagation matrix.");

  m.def("composite_score", &composite_score, py::arg("quality"), py::arg("complexity"), py::arg("alpha") = 0.8);

  m.def(
      "subset_information",
      [](const TagTree& tree, const std::vector<std::vector<NodeId>>& leaves, const std::vector<double>& scores,
         double gamma) {
        if (leaves.size() != scores.size()) throw InputError("leaves and scores differ in length");
        const auto mat = build_ancestry_matrix(tree);
        const auto a = build_propagation_matrix(tree);
        std::vector<SparseVector> es;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
          std::vector<std::size_t> cols;
          for (NodeId l : leaves[i]) {
            auto j = tree.leaf_index(l);
            if (!j) throw InputError("node " + std::to_string(l) + " is not a leaf");
            cols.push_back(*j);
          }
          std::sort(cols.begin(), cols.end());
          cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
          es.push_back(raw_info_vector(scores[i], mat.multiply(cols)));
        }
        return subset_information(es, a, gamma);
      },
      py::arg("tree"), py::arg("leaves"), py::arg("scores"), py::arg("gamma") = 0.85,
      "Information of a subset given each member's leaf node ids and composite score.");

  m.def("load_instances", [](const std::filesystem::path& p) { return load_instances(p); });
  m.def("normalize_scores", &normalize_scores);

  m.def(
      "anchor",
      [](const std::vector<Instance>& pool, const TagTree& tree,
         const std::optional<std::map<std::string, std::vector<double>>>& embeddings, double min_similarity) {
        std::optional<EmbeddingTable> table;
        if (embeddings) table = table_from_dict(*embeddings);
        auto out = anchor_pool(pool, tree, table ? &*table : nullptr, min_similarity);
        return to_records(pool, out.profiles, tree);
      },
      py::arg("pool"), py::arg("tree"), py::arg("embeddings") = py::none(),
      py::arg("min_similarity") = kDefaultMinSimilarity);

  m.def(
      "build_tree",
      [](const std::vector<std::string>& tags, const std::map<std::string, std::vector<double>>& embeddings,
         int depth, double branching, std::optional<std::size_t> clusters, std::uint64_t seed) {
        TreeBuildConfig cfg;
        cfg.depth_limit = depth;
        cfg.branching_ratio = branching;
        cfg.clusters_per_level = clusters;
        cfg.seed = seed;
        return build_tree(tags, table_from_dict(embeddings), cfg).tree;
      },
      py::arg("tags"), py::arg("embeddings"), py::arg("depth") = 10, py::arg("branching") = 10.0,
      py::arg("clusters") = py::none(), py::arg("seed") = 0);

  m.def(
      "derive_target",
      [](const std::vector<AnchoredRecord>& reference, const TagTree& tree) {
        return target_to_dict(derive_target(reference, tree), tree);
      },
      py::arg("reference"), py::arg("tree"));

  m.def(
      "sample",
      [](const std::vector<AnchoredRecord>& records, const TagTree& tree, std::size_t budget, double alpha,
         double gamma, double lambda_, double epsilon, std::optional<std::map<std::string, double>> target,
         std::optional<std::string> mode, unsigned workers) {
        SamplerConfig cfg;
        cfg.budget = budget;
        cfg.objective = {alpha, gamma, lambda_, epsilon};
        cfg.workers = workers;
        cfg.mode = mode ? (*mode == "aligned" ? SamplingMode::kAligned : SamplingMode::kGeneral)
                        : (lambda_ > 0.0 ? SamplingMode::kAligned : SamplingMode::kGeneral);
        std::optional<TargetDistribution> q;
        if (target) q = target_from_dict(tree, *target);
        SampleResult r;
        {
          py::gil_scoped_release release;
          r = sample(records, tree, cfg, q ? &*q : nullptr);
        }
        py::dict out;
        py::list ids, gains, joints;
        for (const auto& p : r.trace.picks) {
          ids.append(p.id);
          gains.append(p.gain);
          joints.append(p.joint);
        }
        out["ids"] = ids;
        out["gains"] = gains;
        out["joints"] = joints;
        out["final_information"] = r.trace.final_information;
        out["final_kl"] = r.trace.final_kl ? py::cast(*r.trace.final_kl) : py::none();
        out["excluded"] = r.trace.excluded;
        return out;
      },
      py::arg("records"), py::arg("tree"), py::arg("budget"), py::arg("alpha") = 0.8, py::arg("gamma") = 0.85,
      py::arg("lambda_") = 0.0, py::arg("epsilon") = 1e-9, py::arg("target") = py::none(),
      py::arg("mode") = py::none(), py::arg("workers") = 1);

  m.def(
      "stats",
      [](const std::vector<AnchoredRecord>& records, const TagTree& tree,
         std::optional<std::map<std::string, double>> target, double alpha) {
        std::optional<TargetDistribution> q;
        if (target) q = target_from_dict(tree, *target);
        const auto s = compute_stats(records, tree, q ? &*q : nullptr, alpha, 1e-9);
        py::dict out;
        out["leaf_histogram"] = s.leaf_histogram;
        out["kl"] = s.kl ? py::cast(*s.kl) : py::none();
        return out;
      },
      py::arg("records"), py::arg("tree"), py::arg("target") = py::none(), py::arg("alpha") = 0.8);

  m.attr("__version__") = TAGFOREST_VERSION;
}

#include "tagforest/matrices.hpp"

#include <algorithm>
#include <cassert>

namespace tagforest {

double SparseVector::at(NodeId id) const {
  auto it = std::lower_bound(index.begin(), index.end(), id);
  if (it == index.end() || *it != id) return 0.0;
  return value[static_cast<std::size_t>(it - index.begin())];
}

AncestryMatrix::AncestryMatrix(std::size_t rows, std::vector<std::size_t> col_ptr, std::vector<NodeId> row_idx)
    : rows_(rows), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)) {}

bool AncestryMatrix::contains(NodeId row, std::size_t leaf) const {
  auto col = column(leaf);
  return std::binary_search(col.begin(), col.end(), row);
}

SparseVector AncestryMatrix::multiply(std::span<const std::size_t> active_leaves) const {
  // Paths share prefixes; merge by counting into a small sorted list.
  std::vector<NodeId> ids;
  for (auto leaf : active_leaves) {
    auto col = column(leaf);
    ids.insert(ids.end(), col.begin(), col.end());
  }
  std::sort(ids.begin(), ids.end());
  SparseVector out;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    out.index.push_back(ids[i]);
    out.value.push_back(static_cast<double>(j - i));
    i = j;
  }
  return out;
}

PropagationMatrix::PropagationMatrix(std::vector<std::size_t> row_ptr, std::vector<NodeId> col_idx,
                                     std::vector<double> values)
    : row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {}

double PropagationMatrix::at(NodeId p, NodeId q) const {
  auto cols = row_columns(static_cast<std::size_t>(p));
  auto it = std::lower_bound(cols.begin(), cols.end(), q);
  if (it == cols.end() || *it != q) return 0.0;
  return row_values(static_cast<std::size_t>(p))[static_cast<std::size_t>(it - cols.begin())];
}

double PropagationMatrix::row_dot(std::size_t p, std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t k = row_ptr_[p]; k < row_ptr_[p + 1]; ++k) acc += values_[k] * x[static_cast<std::size_t>(col_idx_[k])];
  return acc;
}

std::vector<double> PropagationMatrix::multiply(std::span<const double> x) const {
  assert(x.size() == size());
  std::vector<double> y(size(), 0.0);
  for (std::size_t p = 0; p < size(); ++p) y[p] = row_dot(p, x);
  return y;
}

std::vector<double> PropagationMatrix::multiply(const SparseVector& x) const {
  std::vector<double> dense(size(), 0.0);
  for (std::size_t k = 0; k < x.nnz(); ++k) dense[static_cast<std::size_t>(x.index[k])] = x.value[k];
  return multiply(dense);
}

std::vector<double> PropagationMatrix::left_multiply(std::span<const double> w) const {
  assert(w.size() == size());
  std::vector<double> y(size(), 0.0);
  for (std::size_t p = 0; p < size(); ++p) {
    if (w[p] == 0.0) continue;
    for (std::size_t k = row_ptr_[p]; k < row_ptr_[p + 1]; ++k) y[static_cast<std::size_t>(col_idx_[k])] += w[p] * values_[k];
  }
  return y;
}

AncestryMatrix build_ancestry_matrix(const TagTree& tree) {
  std::vector<std::size_t> col_ptr{0};
  std::vector<NodeId> row_idx;
  col_ptr.reserve(tree.leaf_count() + 1);
  std::vector<NodeId> path;
  for (NodeId leaf : tree.leaves()) {
    path.clear();
    for (std::optional<NodeId> cur = leaf; cur; cur = tree.node(*cur).parent) path.push_back(*cur);
    // Breadth-first ids make every ancestor smaller than its descendants.
    row_idx.insert(row_idx.end(), path.rbegin(), path.rend());
    col_ptr.push_back(row_idx.size());
  }
  return AncestryMatrix(tree.size(), std::move(col_ptr), std::move(row_idx));
}

PropagationMatrix build_propagation_matrix(const TagTree& tree) {
  std::vector<std::size_t> row_ptr{0};
  std::vector<NodeId> col_idx;
  std::vector<double> values;
  row_ptr.reserve(tree.size() + 1);
  for (const auto& node : tree.nodes()) {
    auto cols = tree.neighbors(node.id);
    const double w = 1.0 / (1.0 + static_cast<double>(cols.size()));
    cols.push_back(node.id);
    std::sort(cols.begin(), cols.end());
    for (NodeId q : cols) {
      col_idx.push_back(q);
      values.push_back(w);
    }
    row_ptr.push_back(col_idx.size());
  }
  return PropagationMatrix(std::move(row_ptr), std::move(col_idx), std::move(values));
}

}  // namespace tagforest

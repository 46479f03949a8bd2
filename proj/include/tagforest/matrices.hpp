#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tagforest/tree.hpp"

namespace tagforest {

// Sparse nonnegative vector over node ids, sorted by id.
struct SparseVector {
  std::vector<NodeId> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
  double at(NodeId id) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

// Binary |V| x |V_leaf| matrix with M[i][j] = 1 iff node i lies on the
// root-to-leaf path of leaf j (the leaf itself included). Stored by column;
// each column lists its path ids in ascending (root-first) order.
class AncestryMatrix {
 public:
  AncestryMatrix() = default;
  AncestryMatrix(std::size_t rows, std::vector<std::size_t> col_ptr, std::vector<NodeId> row_idx);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return col_ptr_.empty() ? 0 : col_ptr_.size() - 1; }
  std::size_t nnz() const { return row_idx_.size(); }

  std::span<const NodeId> column(std::size_t leaf) const {
    return {row_idx_.data() + col_ptr_[leaf], col_ptr_[leaf + 1] - col_ptr_[leaf]};
  }
  bool contains(NodeId row, std::size_t leaf) const;

  // M * h_leaf for a binary leaf vector given as its support (leaf indices).
  // Entries are integer ancestor counts.
  SparseVector multiply(std::span<const std::size_t> active_leaves) const;

 private:
  std::size_t rows_ = 0;
  std::vector<std::size_t> col_ptr_;
  std::vector<NodeId> row_idx_;
};

// Row-stochastic |V| x |V| propagation matrix over the undirected tree
// neighbourhood plus an implicit unit self-loop:
//   A[p][q] = 1 / (1 + deg(p))  for q == p or q adjacent to p.
// Stored by row with ascending column ids.
class PropagationMatrix {
 public:
  PropagationMatrix() = default;
  PropagationMatrix(std::vector<std::size_t> row_ptr, std::vector<NodeId> col_idx, std::vector<double> values);

  std::size_t size() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t nnz() const { return col_idx_.size(); }

  std::span<const NodeId> row_columns(std::size_t p) const {
    return {col_idx_.data() + row_ptr_[p], row_ptr_[p + 1] - row_ptr_[p]};
  }
  std::span<const double> row_values(std::size_t p) const {
    return {values_.data() + row_ptr_[p], row_ptr_[p + 1] - row_ptr_[p]};
  }
  double at(NodeId p, NodeId q) const;

  // y = A x
  std::vector<double> multiply(std::span<const double> x) const;
  // y = A x for a sparse x, accumulated into a dense vector.
  std::vector<double> multiply(const SparseVector& x) const;
  // Single row of A x.
  double row_dot(std::size_t p, std::span<const double> x) const;
  // y^T = w^T A, i.e. y[q] = sum_p w[p] A[p][q].
  std::vector<double> left_multiply(std::span<const double> w) const;

 private:
  std::vector<std::size_t> row_ptr_;
  std::vector<NodeId> col_idx_;
  std::vector<double> values_;
};

AncestryMatrix build_ancestry_matrix(const TagTree& tree);
PropagationMatrix build_propagation_matrix(const TagTree& tree);

}  // namespace tagforest

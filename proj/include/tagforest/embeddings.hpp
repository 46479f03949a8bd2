#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tagforest {

// Fixed-dimension table of named real vectors (tags or node names).
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  bool contains(std::string_view key) const { return index_.contains(std::string(key)); }

  // Throws InputError on dimension mismatch, non-finite component or duplicate key.
  void insert(std::string key, std::vector<double> vector);
  std::optional<std::span<const double>> find(std::string_view key) const;

  // Keys in insertion order.
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::size_t dim_;
  std::vector<std::string> keys_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Deterministic unit vector derived from the key's bytes; stands in for tags
// that have no embedding entry.
std::vector<double> fallback_embedding(std::string_view key, std::size_t dimension);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
// Unit-length copy; zero vectors are returned unchanged.
std::vector<double> normalized(std::span<const double> v);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace tagforest

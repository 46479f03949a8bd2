#include "tagforest/embeddings.hpp"

#include <cmath>

#include "tagforest/error.hpp"

namespace tagforest {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dim_(dimension) {
  if (dimension == 0) throw InputError("embedding dimension must be positive");
}

void EmbeddingTable::insert(std::string key, std::vector<double> vector) {
  if (vector.size() != dim_) {
    throw InputError("embedding '" + key + "' has " + std::to_string(vector.size()) + " components, expected " +
                     std::to_string(dim_));
  }
  for (double v : vector)
    if (!std::isfinite(v)) throw InputError("embedding '" + key + "' has a non-finite component");
  if (index_.contains(key)) throw InputError("duplicate embedding key '" + key + "'");
  index_.emplace(key, keys_.size());
  keys_.push_back(std::move(key));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::optional<std::span<const double>> EmbeddingTable::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return std::span<const double>(data_.data() + it->second * dim_, dim_);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> fallback_embedding(std::string_view key, std::size_t dimension) {
  std::vector<double> v(dimension);
  const std::uint64_t base = fnv1a64(key);
  for (std::size_t i = 0; i < dimension; ++i) {
    const std::uint64_t bits = splitmix64(base + 0x632be59bd9b4e019ULL * (i + 1));
    v[i] = static_cast<double>(bits >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return normalized(v);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::vector<double> normalized(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  const double norm = std::sqrt(dot(v, v));
  if (norm > 0.0)
    for (double& x : out) x /= norm;
  return out;
}

}  // namespace tagforest

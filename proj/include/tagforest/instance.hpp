#pragma once

#include <string>
#include <vector>

namespace tagforest {

// One query/response pair with its fine-grained tags and the two raw or
// normalized attribute scores.
struct Instance {
  std::string id;
  std::string query;
  std::string response;
  std::vector<std::string> tags;
  double quality = 0.0;
  double complexity = 0.0;

  friend bool operator==(const Instance&, const Instance&) = default;
};

using Pool = std::vector<Instance>;

}  // namespace tagforest

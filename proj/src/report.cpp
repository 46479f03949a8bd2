#include "tagforest/report.hpp"

#include <algorithm>

namespace tagforest {

void ValidationReport::add_error(std::string location, std::string message) {
  entries_.push_back({Severity::kError, std::move(location), std::move(message)});
}

void ValidationReport::add_warning(std::string location, std::string message) {
  entries_.push_back({Severity::kWarning, std::move(location), std::move(message)});
}

void ValidationReport::append(const ValidationReport& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [](const ReportEntry& e) { return e.severity == Severity::kError; }));
}

std::size_t ValidationReport::warning_count() const { return entries_.size() - error_count(); }

bool ValidationReport::mentions(std::string_view needle) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const ReportEntry& e) {
                       return e.message.find(needle) != std::string::npos ||
                              e.location.find(needle) != std::string::npos;
                     });
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.severity == Severity::kError ? "error " : "warning ";
    out += e.location;
    out += ": ";
    out += e.message;
    out += '\n';
  }
  return out;
}

}  // namespace tagforest

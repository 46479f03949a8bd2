#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tagforest {

enum class Severity { kWarning, kError };

struct ReportEntry {
  Severity severity;
  std::string location;
  std::string message;

  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

// Ordered diagnostics list. Entries are appended in a deterministic order by
// every producer, so identical inputs give identical reports.
class ValidationReport {
 public:
  void add_error(std::string location, std::string message);
  void add_warning(std::string location, std::string message);
  void append(const ValidationReport& other);

  const std::vector<ReportEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool has_errors() const { return error_count() > 0; }

  // True if any entry location or message contains `needle`.
  bool mentions(std::string_view needle) const;

  // One "severity location: message" line per entry.
  std::string to_string() const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;

 private:
  std::vector<ReportEntry> entries_;
};

}  // namespace tagforest

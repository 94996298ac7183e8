#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kantolab {

/// Shortest round-trip decimal form, locale independent.  Integral values
/// keep a trailing ".0"; non-finite values print as inf, -inf, nan.
std::string format_double(double x);

/// Minimal CSV writer: comma separated, quotes only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& columns) { row(columns); }
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
};

std::string csv_escape(const std::string& cell);

}  // namespace kantolab

#pragma once

// Column-ordered numeric tables and their CSV serialization (17 significant
// digits, so values round-trip exactly).

#include <iosfwd>
#include <string>
#include <vector>

namespace iam::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  /// Column index by name; throws when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

std::string format(double v);
void write(std::ostream& out, const Table& table);
/// Writes `table` to `path` (IoError on failure).
void write(const std::string& path, const Table& table);

}  // namespace iam::csv

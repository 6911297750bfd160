#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace platoon {

/// Shortest round-trip decimal form, '.' separator, independent of locale.
std::string format_number(double x);

/// Minimal CSV row writer. Fields never contain separators in this project,
/// so no quoting is done.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> names);

  CsvWriter& field(double x);
  CsvWriter& field(std::int64_t x);
  CsvWriter& field(std::uint64_t x);
  CsvWriter& field(int x) { return field(static_cast<std::int64_t>(x)); }
  CsvWriter& field(std::string_view s);
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  void end_row();

 private:
  void sep();
  std::ostream& os_;
  bool first_ = true;
};

/// Parsed CSV file: header plus string cells.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& is);

}  // namespace platoon

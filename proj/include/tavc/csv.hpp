#pragma once

#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tavc {

inline constexpr std::string_view kCsvVersionLine = "# tavc-csv v1";

// Comma-separated output with the fixed version line and a header row.
// Doubles use the shortest round-trip representation, absent values are
// empty cells.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& columns);

  template <std::integral T>
    requires(!std::same_as<T, bool>)
  CsvWriter& cell(T v) {
    return cell_int(static_cast<std::int64_t>(v));
  }
  CsvWriter& cell(const char* v) { return cell(std::string_view(v)); }
  CsvWriter& cell(double v);
  CsvWriter& cell(std::optional<double> v);
  CsvWriter& cell(std::string_view v);
  CsvWriter& cell(bool v);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;

  void sep();
  CsvWriter& cell_int(std::int64_t v);
};

}  // namespace tavc

#include "tavc/csv.hpp"

#include <ostream>
#include <stdexcept>

#include "tavc/estimator.hpp"

namespace tavc {

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& columns) : out_(out), columns_(columns.size()) {
  out_ << kCsvVersionLine << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::sep() {
  if (in_row_ == columns_) throw std::logic_error("CsvWriter: too many cells in row");
  if (in_row_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell_int(std::int64_t v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::optional<double> v) {
  sep();
  if (v) out_ << format_double(*v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(bool v) {
  sep();
  out_ << (v ? "true" : "false");
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw std::logic_error("CsvWriter: row has the wrong number of cells");
  out_ << '\n';
  in_row_ = 0;
}

}  // namespace tavc

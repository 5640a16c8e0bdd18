#pragma once

// RFC-4180 CSV output with fixed 17-significant-digit floats, so identical
// inputs give byte-identical files.

#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace hsq::io {

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

std::string format_double(double v);
std::string quote(const std::string& field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& names);
  void row(std::initializer_list<double> values);
  void row(const std::vector<Cell>& cells);

 private:
  std::ostream& out_;
};

inline Cell cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(std::monostate{}); }

}  // namespace hsq::io

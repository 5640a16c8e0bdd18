#include "hsq/io.hpp"

#include <cmath>
#include <cstdio>

namespace hsq::io {

namespace {
constexpr const char* kEol = "\r\n";
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string q = "\"";
  for (char c : field) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << quote(names[i]);
  out_ << kEol;
}

void CsvWriter::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    out_ << (first ? "" : ",") << format_double(v);
    first = false;
  }
  out_ << kEol;
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) out_ << format_double(v);
          else if constexpr (std::is_same_v<T, long long>) out_ << v;
          else if constexpr (std::is_same_v<T, bool>) out_ << (v ? "true" : "false");
          else if constexpr (std::is_same_v<T, std::string>) out_ << quote(v);
        },
        cells[i]);
  }
  out_ << kEol;
}

}  // namespace hsq::io

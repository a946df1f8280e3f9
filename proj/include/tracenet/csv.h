#ifndef TRACENET_CSV_H_
#define TRACENET_CSV_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tracenet {

// Minimal reader for the unquoted, comma-separated files this project emits.
// Lines starting with '#' are comments; the first non-comment line must equal
// the expected header exactly.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source, std::string_view header);

  // Advances to the next data row. Returns false at end of input.
  bool next();

  std::size_t size() const { return fields_.size(); }
  long line() const { return line_; }

  std::string_view field(std::size_t i) const;
  std::int64_t integer(std::size_t i) const;
  double real(std::size_t i) const;

  // Throws ParseError naming the current line.
  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::istream& in_;
  std::string source_;
  std::size_t columns_ = 0;
  std::string buffer_;
  std::vector<std::string_view> fields_;
  long line_ = 0;
};

// Shortest representation that round-trips through strtod.
std::string format_double(double value);

// Writes "# key=value" provenance lines. Empty input writes nothing.
void write_comment(std::ostream& out, std::string_view comment);

}  // namespace tracenet

#endif  // TRACENET_CSV_H_

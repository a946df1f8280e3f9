#include "tracenet/csv.h"

#include <charconv>

#include "tracenet/types.h"

namespace tracenet {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool read_line(std::istream& in, std::string& buffer, long& line) {
  if (!std::getline(in, buffer)) return false;
  ++line;
  if (!buffer.empty() && buffer.back() == '\r') buffer.pop_back();
  return true;
}

}  // namespace

CsvReader::CsvReader(std::istream& in, std::string source,
                     std::string_view header)
    : in_(in), source_(std::move(source)) {
  columns_ = split(header).size();
  while (read_line(in_, buffer_, line_)) {
    if (!buffer_.empty() && buffer_.front() == '#') continue;
    if (buffer_ != header) {
      fail("expected header '" + std::string(header) + "', got '" + buffer_ +
           "'");
    }
    return;
  }
  fail("missing header '" + std::string(header) + "'");
}

bool CsvReader::next() {
  while (read_line(in_, buffer_, line_)) {
    if (buffer_.empty() || buffer_.front() == '#') continue;
    fields_ = split(buffer_);
    if (fields_.size() != columns_) {
      fail("expected " + std::to_string(columns_) + " fields, got " +
           std::to_string(fields_.size()));
    }
    return true;
  }
  fields_.clear();
  return false;
}

std::string_view CsvReader::field(std::size_t i) const { return fields_.at(i); }

std::int64_t CsvReader::integer(std::size_t i) const {
  const std::string_view f = field(i);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
    fail("field " + std::to_string(i + 1) + " is not an integer: '" +
         std::string(f) + "'");
  }
  return value;
}

double CsvReader::real(std::size_t i) const {
  const std::string_view f = field(i);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
    fail("field " + std::to_string(i + 1) + " is not a number: '" +
         std::string(f) + "'");
  }
  return value;
}

void CsvReader::fail(const std::string& message) const {
  throw ParseError(source_, line_, message);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_comment(std::ostream& out, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
}

}  // namespace tracenet

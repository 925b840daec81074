#include "structembed/dataset.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "structembed/errors.hpp"

namespace structembed {

namespace {

// Splits one line into float tokens; commas and whitespace both separate.
std::vector<double> parse_line(const std::string& line, std::size_t line_no) {
  std::vector<double> out;
  std::size_t pos = 0;
  const std::size_t len = line.size();
  while (pos < len) {
    while (pos < len &&
           (std::isspace(static_cast<unsigned char>(line[pos])) || line[pos] == ',')) {
      ++pos;
    }
    if (pos >= len || line[pos] == '#') break;
    std::size_t end = pos;
    while (end < len && !std::isspace(static_cast<unsigned char>(line[end])) &&
           line[end] != ',' && line[end] != '#') {
      ++end;
    }
    const std::string token = line.substr(pos, end - pos);
    errno = 0;
    char* stop = nullptr;
    const double value = std::strtod(token.c_str(), &stop);
    if (stop == token.c_str() || *stop != '\0' || errno == ERANGE) {
      throw data_error("unparsable number '" + token + "'", line_no);
    }
    out.push_back(value);
    pos = end;
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> parse_dataset(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<double> row = parse_line(line, line_no);
    if (row.empty()) continue;  // blank or comment-only line
    if (rows.empty()) {
      dim = row.size();
    } else if (row.size() != dim) {
      throw data_error("expected " + std::to_string(dim) + " values, got " +
                           std::to_string(row.size()),
                       line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<double>> load_dataset(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw data_error("cannot open dataset file '" + path + "'", 0);
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_dataset(buffer.str());
}

std::string format_float(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  // Guard against a non-C numeric locale leaking into snprintf.
  for (char& c : buf) {
    if (c == '\0') break;
    if (c == ',') c = '.';
  }
  return std::string(buf);
}

}  // namespace structembed

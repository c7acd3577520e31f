#include "agcas/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace agcas::csv {

std::string format(double v) {
  if (v == 0.0) return "0";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void Row::sep() {
  if (!empty_) text_ += ',';
  empty_ = false;
}

Row& Row::operator<<(double v) {
  sep();
  text_ += format(v);
  return *this;
}

Row& Row::operator<<(long long v) {
  sep();
  text_ += std::to_string(v);
  return *this;
}

Row& Row::operator<<(std::string_view v) {
  sep();
  text_ += v;
  return *this;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

std::vector<double> parse_doubles(std::string_view line) {
  std::vector<double> out;
  for (const auto& field : split(line)) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      throw std::invalid_argument("unparseable CSV number '" + field + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace agcas::csv

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace agcas::csv {

/// Shortest decimal text that round-trips the double.
std::string format(double v);

/// Comma-joined row builder.
class Row {
 public:
  Row& operator<<(double v);
  Row& operator<<(long long v);
  Row& operator<<(int v) { return *this << static_cast<long long>(v); }
  Row& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  Row& operator<<(bool v) { return *this << static_cast<long long>(v ? 1 : 0); }
  Row& operator<<(std::string_view v);
  const std::string& str() const { return text_; }

 private:
  void sep();
  std::string text_;
  bool empty_ = true;
};

std::vector<std::string> split(std::string_view line);
std::vector<double> parse_doubles(std::string_view line);

}  // namespace agcas::csv

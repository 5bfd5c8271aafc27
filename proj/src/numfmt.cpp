#include "npfuse/numfmt.hpp"

#include <charconv>
#include <cmath>

#include "npfuse/error.hpp"

namespace npfuse {

std::string format_sig17(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (token.empty() || res.ec != std::errc() || res.ptr != end) {
    throw DecodeError("malformed number '" + std::string(token) + "'");
  }
  return v;
}

long long parse_integer(std::string_view token) {
  long long v = 0;
  const auto* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (token.empty() || res.ec != std::errc() || res.ptr != end) {
    throw DecodeError("malformed integer '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace npfuse

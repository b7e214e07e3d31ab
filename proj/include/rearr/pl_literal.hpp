#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/piecewise_linear.hpp"

namespace rearr {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return std::to_string(v);
  return std::string(buf, end);
}

/// "pl:x0:y0,x1:y1,..." with x0 = -1 and xlast = 1.
inline std::string format_pl(const PiecewiseLinear& u) {
  std::string out = "pl:";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(u.xs()[i]);
    out += ':';
    out += format_double(u.ys()[i]);
  }
  return out;
}

namespace detail {

inline double parse_number(std::string_view text, std::size_t offset) {
  while (!text.empty() && text.front() == ' ') {
    text.remove_prefix(1);
    ++offset;
  }
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
    ++offset;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw SyntaxError(offset, "expected a number");
  }
  return v;
}

}  // namespace detail

/// Parses a pl: literal. Offsets in syntax errors count from the start of `text`.
inline PiecewiseLinear parse_pl(std::string_view text) {
  constexpr std::string_view kPrefix = "pl:";
  if (text.substr(0, kPrefix.size()) != kPrefix) throw SyntaxError(0, "expected 'pl:' prefix");
  std::vector<double> xs, ys;
  std::size_t pos = kPrefix.size();
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) throw SyntaxError(pos, "expected 'x:y'");
    xs.push_back(detail::parse_number(item.substr(0, colon), pos));
    ys.push_back(detail::parse_number(item.substr(colon + 1), pos + colon + 1));
    pos = comma + 1;
  }
  PiecewiseLinear u(std::move(xs), std::move(ys));
  u.require_unit_domain();
  return u;
}

}  // namespace rearr

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace codemix {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string ascii_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
bool starts_with_icase(std::string_view s, std::string_view prefix);

}  // namespace codemix

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace codemix::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
  char32_t cp;
  std::size_t length;  // bytes consumed, always >= 1
};

// Decodes one scalar at `pos`. Malformed input yields U+FFFD and advances one
// byte so that byte offsets always make progress.
Decoded decode_at(std::string_view s, std::size_t pos);

std::u32string decode(std::string_view s);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view s);
std::string encode(char32_t cp);

bool is_ascii(std::string_view s);

}  // namespace codemix::utf8

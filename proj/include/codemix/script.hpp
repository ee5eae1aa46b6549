#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "codemix/corpus.hpp"

namespace codemix {

enum class ScriptTag : std::uint8_t {
  Latin,
  KannadaScript,
  TamilScript,
  MalayalamScript,
  Digit,
  Punct,
  Other,
};

std::string_view to_string(ScriptTag t);

// Total over all scalar values. Native blocks: Kannada U+0C80-0CFF,
// Tamil U+0B80-0BFF, Malayalam U+0D00-0D7F; Latin is ASCII letters only.
ScriptTag classify_codepoint(char32_t cp);

// True for tags that count as letters when voting on a token's script.
constexpr bool is_letter_script(ScriptTag t) {
  return t == ScriptTag::Latin || t == ScriptTag::KannadaScript ||
         t == ScriptTag::TamilScript || t == ScriptTag::MalayalamScript;
}

ScriptTag native_script(Language language);

struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

struct TaggedToken {
  std::string token;
  ScriptTag tag = ScriptTag::Other;
  ByteRange bytes;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

// Script of a single whitespace-free token: majority of its letters (ties to
// the first-seen script); letter-free tokens are Digit, Punct or Other.
ScriptTag tag_token(std::string_view token);

std::vector<TaggedToken> tag_tokens(std::string_view text);

// Majority over letter-bearing tokens. Ties go to Latin when Latin is among
// the leaders, otherwise to the leader seen first. Letter-free text -> Other.
ScriptTag dominant_script(std::string_view text);

}  // namespace codemix

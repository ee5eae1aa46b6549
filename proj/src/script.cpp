#include "codemix/script.hpp"

#include <array>
#include <cstdint>

#include "codemix/strings.hpp"
#include "codemix/utf8.hpp"

namespace codemix {

std::string_view to_string(ScriptTag t) {
  switch (t) {
    case ScriptTag::Latin: return "Latin";
    case ScriptTag::KannadaScript: return "KannadaScript";
    case ScriptTag::TamilScript: return "TamilScript";
    case ScriptTag::MalayalamScript: return "MalayalamScript";
    case ScriptTag::Digit: return "Digit";
    case ScriptTag::Punct: return "Punct";
    case ScriptTag::Other: return "Other";
  }
  return "?";
}

ScriptTag classify_codepoint(char32_t cp) {
  if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z')) {
    return ScriptTag::Latin;
  }
  if (cp >= '0' && cp <= '9') return ScriptTag::Digit;
  if (cp >= 0x0C80 && cp <= 0x0CFF) return ScriptTag::KannadaScript;
  if (cp >= 0x0B80 && cp <= 0x0BFF) return ScriptTag::TamilScript;
  if (cp >= 0x0D00 && cp <= 0x0D7F) return ScriptTag::MalayalamScript;
  if ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
      (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E) ||
      (cp >= 0xA1 && cp <= 0xBF) || (cp >= 0x2010 && cp <= 0x205E) ||
      (cp >= 0x3000 && cp <= 0x303F)) {
    return ScriptTag::Punct;
  }
  return ScriptTag::Other;
}

ScriptTag native_script(Language language) {
  switch (language) {
    case Language::Kannada: return ScriptTag::KannadaScript;
    case Language::Tamil: return ScriptTag::TamilScript;
    case Language::Malayalam: return ScriptTag::MalayalamScript;
  }
  return ScriptTag::Other;
}

namespace {

constexpr std::size_t kNumTags = 7;

// Majority vote with a caller-supplied tie rule.
template <typename TieRule>
ScriptTag vote(const std::array<std::size_t, kNumTags>& counts,
               const std::array<std::size_t, kNumTags>& first_seen,
               TieRule prefer) {
  std::size_t best_count = 0;
  ScriptTag best = ScriptTag::Other;
  for (std::size_t i = 0; i < kNumTags; ++i) {
    if (counts[i] == 0) continue;
    const auto tag = static_cast<ScriptTag>(i);
    if (counts[i] > best_count ||
        (counts[i] == best_count && prefer(tag, best, first_seen))) {
      best_count = counts[i];
      best = tag;
    }
  }
  return best;
}

bool earlier(ScriptTag a, ScriptTag b,
             const std::array<std::size_t, kNumTags>& first_seen) {
  return first_seen[static_cast<std::size_t>(a)] <
         first_seen[static_cast<std::size_t>(b)];
}

}  // namespace

ScriptTag tag_token(std::string_view token) {
  std::array<std::size_t, kNumTags> letters{};
  std::array<std::size_t, kNumTags> first_seen;
  first_seen.fill(SIZE_MAX);
  bool any_digit = false, all_punct = true, all_digit_or_punct = true;
  std::size_t order = 0;

  for (std::size_t i = 0; i < token.size();) {
    const auto d = utf8::decode_at(token, i);
    i += d.length;
    const ScriptTag t = classify_codepoint(d.cp);
    const auto ti = static_cast<std::size_t>(t);
    if (is_letter_script(t)) {
      ++letters[ti];
      if (first_seen[ti] == SIZE_MAX) first_seen[ti] = order++;
    }
    if (t == ScriptTag::Digit) any_digit = true;
    if (t != ScriptTag::Punct) all_punct = false;
    if (t != ScriptTag::Digit && t != ScriptTag::Punct) {
      all_digit_or_punct = false;
    }
  }

  const ScriptTag winner =
      vote(letters, first_seen, [](ScriptTag a, ScriptTag b, const auto& fs) {
        return earlier(a, b, fs);
      });
  if (winner != ScriptTag::Other) return winner;
  if (token.empty()) return ScriptTag::Other;
  if (all_punct) return ScriptTag::Punct;
  if (any_digit && all_digit_or_punct) return ScriptTag::Digit;
  return ScriptTag::Other;
}

std::vector<TaggedToken> tag_tokens(std::string_view text) {
  std::vector<TaggedToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > b) {
      const auto tok = text.substr(b, i - b);
      out.push_back(TaggedToken{std::string(tok), tag_token(tok), {b, i}});
    }
  }
  return out;
}

ScriptTag dominant_script(std::string_view text) {
  std::array<std::size_t, kNumTags> counts{};
  std::array<std::size_t, kNumTags> first_seen;
  first_seen.fill(SIZE_MAX);
  std::size_t order = 0;
  for (const auto& tok : tag_tokens(text)) {
    if (!is_letter_script(tok.tag)) continue;
    const auto ti = static_cast<std::size_t>(tok.tag);
    ++counts[ti];
    if (first_seen[ti] == SIZE_MAX) first_seen[ti] = order++;
  }
  return vote(counts, first_seen,
              [](ScriptTag a, ScriptTag b, const auto& fs) {
                if (a == ScriptTag::Latin) return true;
                if (b == ScriptTag::Latin) return false;
                return earlier(a, b, fs);
              });
}

}  // namespace codemix

#include "codemix/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "codemix/error.hpp"
#include "codemix/strings.hpp"

namespace codemix {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::Positive: return "Positive";
    case Label::Negative: return "Negative";
    case Label::MixedFeelings: return "Mixed_feelings";
    case Label::UnknownState: return "unknown_state";
    case Label::NotLanguage: return "not-language";
  }
  return "?";
}

std::string_view to_string(Language l) {
  switch (l) {
    case Language::Kannada: return "kannada";
    case Language::Tamil: return "tamil";
    case Language::Malayalam: return "malayalam";
  }
  return "?";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Original: return "original";
    case Provenance::Transliterated: return "transliterated";
    case Provenance::Translated: return "translated";
  }
  return "?";
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "?";
}

std::string_view to_string(VariantId v) {
  switch (v) {
    case VariantId::TRA: return "TRA";
    case VariantId::TRAI: return "TRAI";
    case VariantId::TRAA: return "TRAA";
    case VariantId::MERGED: return "MERGED";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view raw) {
  const std::string s = ascii_lower(trim(raw));
  if (s == "positive") return Label::Positive;
  if (s == "negative") return Label::Negative;
  if (s == "mixed_feelings" || s == "mixed feelings") {
    return Label::MixedFeelings;
  }
  if (s == "unknown_state" || s == "unknown state") {
    return Label::UnknownState;
  }
  if (s.rfind("not-", 0) == 0) return Label::NotLanguage;
  return std::nullopt;
}

std::optional<Language> parse_language(std::string_view raw) {
  const std::string s = ascii_lower(trim(raw));
  if (s == "kannada" || s == "kn") return Language::Kannada;
  if (s == "tamil" || s == "ta") return Language::Tamil;
  if (s == "malayalam" || s == "ml") return Language::Malayalam;
  return std::nullopt;
}

std::optional<Provenance> parse_provenance(std::string_view raw) {
  const std::string s = ascii_lower(trim(raw));
  if (s == "original") return Provenance::Original;
  if (s == "transliterated") return Provenance::Transliterated;
  if (s == "translated") return Provenance::Translated;
  return std::nullopt;
}

std::optional<VariantId> parse_variant(std::string_view raw) {
  const std::string s = ascii_lower(trim(raw));
  if (s == "tra") return VariantId::TRA;
  if (s == "trai") return VariantId::TRAI;
  if (s == "traa") return VariantId::TRAA;
  if (s == "merged") return VariantId::MERGED;
  return std::nullopt;
}

Corpus load_tsv(std::istream& in, Language language, LoadOptions opts) {
  Corpus corpus;
  corpus.language = language;
  corpus.split = opts.split;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && opts.skip_header) continue;
    if (line.empty()) continue;

    const auto fields = split(line, '\t');
    if (fields.size() < 2) throw ParseError(lineno, "missing tab separator");
    if (fields.size() > 3) throw ParseError(lineno, "too many fields");
    if (trim(fields[0]).empty()) throw ParseError(lineno, "empty text field");

    const auto label = parse_label(fields[1]);
    if (!label) {
      throw ParseError(lineno,
                       "unknown label '" + std::string(fields[1]) + "'");
    }
    Provenance prov = Provenance::Original;
    if (fields.size() == 3) {
      const auto p = parse_provenance(fields[2]);
      if (!p) {
        throw ParseError(lineno,
                         "unknown provenance '" + std::string(fields[2]) + "'");
      }
      prov = *p;
    }
    corpus.samples.push_back(Sample{corpus.samples.size(),
                                    std::string(fields[0]), *label, language,
                                    prov});
  }
  if (in.bad()) throw std::runtime_error("read error while loading corpus");
  return corpus;
}

Corpus load_tsv_file(const std::string& path, Language language,
                     LoadOptions opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_tsv(in, language, opts);
}

namespace {

std::string flatten(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

bool is_language_tag(std::string_view token) {
  if (!token.empty() && token.front() == '#') token.remove_prefix(1);
  const std::string t = ascii_lower(token);
  return t == "kannada" || t == "tamil" || t == "malayalam" || t == "english";
}

std::string join_tokens(const std::vector<std::string_view>& tokens,
                        std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out.push_back(' ');
    out.append(tokens[i]);
  }
  return out;
}

// Removes balanced (...) and [...] spans with their content; stray bracket
// characters are dropped on their own.
std::string strip_brackets(std::string_view text) {
  std::string out;
  std::vector<char> stack;
  std::string pending;  // content of the outermost open span
  for (char c : text) {
    if (c == '(' || c == '[') {
      stack.push_back(c == '(' ? ')' : ']');
      pending.push_back(c);
      continue;
    }
    if (c == ')' || c == ']') {
      if (!stack.empty() && stack.back() == c) {
        stack.pop_back();
        if (stack.empty()) {
          pending.clear();
          out.push_back(' ');
        } else {
          pending.push_back(c);
        }
      }
      continue;
    }
    if (stack.empty()) {
      out.push_back(c);
    } else {
      pending.push_back(c);
    }
  }
  // Unclosed span: keep its text, drop the bracket characters.
  for (char c : pending) {
    if (c != '(' && c != '[' && c != ')' && c != ']') out.push_back(c);
  }
  return out;
}

std::string strip_bracket_chars(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c != '(' && c != '[' && c != ')' && c != ']') out.push_back(c);
  }
  return out;
}

}  // namespace

void write_tsv(std::ostream& out, const Corpus& corpus, bool with_provenance) {
  for (const auto& s : corpus.samples) {
    out << flatten(s.text) << '\t' << to_string(s.label);
    if (with_provenance) out << '\t' << to_string(s.provenance);
    out << '\n';
  }
}

void write_tsv_file(const std::string& path, const Corpus& corpus,
                    bool with_provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_tsv(out, corpus, with_provenance);
}

std::string clean_text(std::string_view text) {
  std::string stripped = strip_brackets(text);
  auto tokens = split_whitespace(stripped);
  if (tokens.empty()) {
    // The whole comment was bracketed; keep its words rather than emit an
    // empty sample.
    stripped = strip_bracket_chars(text);
    tokens = split_whitespace(stripped);
  }
  std::size_t keep = tokens.size();
  while (keep > 1 && is_language_tag(tokens[keep - 1])) --keep;
  return join_tokens(tokens, keep);
}

Corpus preprocess_for_translit(const Corpus& corpus) {
  Corpus out;
  out.language = corpus.language;
  out.split = corpus.split;
  for (const auto& s : corpus.samples) {
    if (s.label == Label::NotLanguage) continue;
    Sample copy = s;
    copy.text = clean_text(s.text);
    if (copy.text.empty()) continue;
    out.samples.push_back(std::move(copy));
  }
  return out;
}

namespace {

void check_part(const Corpus& part, Language language, Provenance expected,
                std::string_view name) {
  if (part.language != language) {
    throw ContractError(std::string(name) + " corpus language mismatch");
  }
  for (const auto& s : part.samples) {
    if (s.provenance != expected) {
      throw ContractError(std::string(name) + " sample " +
                          std::to_string(s.id) + " has provenance " +
                          std::string(to_string(s.provenance)) + ", expected " +
                          std::string(to_string(expected)));
    }
  }
}

void append_part(Corpus& out, const Corpus& part) {
  for (const auto& s : part.samples) {
    Sample copy = s;
    copy.id = out.samples.size();
    out.samples.push_back(std::move(copy));
  }
}

}  // namespace

Corpus build_variant(VariantId variant, const Corpus& base,
                     const Corpus& translit, const Corpus& translated) {
  check_part(base, base.language, Provenance::Original, "base");
  const bool use_translit =
      variant == VariantId::TRAI || variant == VariantId::MERGED;
  const bool use_translated =
      variant == VariantId::TRAA || variant == VariantId::MERGED;
  if (use_translit) {
    check_part(translit, base.language, Provenance::Transliterated,
               "transliterated");
  }
  if (use_translated) {
    check_part(translated, base.language, Provenance::Translated,
               "translated");
  }

  Corpus out;
  out.language = base.language;
  out.split = base.split;
  out.samples.reserve(base.size() + (use_translit ? translit.size() : 0) +
                      (use_translated ? translated.size() : 0));
  append_part(out, base);
  if (use_translit) append_part(out, translit);
  if (use_translated) append_part(out, translated);
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.total = corpus.size();
  for (const auto& s : corpus.samples) ++stats.per_class[index_of(s.label)];
  return stats;
}

}  // namespace codemix

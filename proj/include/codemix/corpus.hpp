#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codemix {

// Declaration order is the fixed class order used for argmax tie-breaking
// and for every per-class array in the library.
enum class Label : std::uint8_t {
  Positive,
  Negative,
  MixedFeelings,
  UnknownState,
  NotLanguage,
};
inline constexpr std::size_t kNumLabels = 5;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::Positive, Label::Negative, Label::MixedFeelings,
    Label::UnknownState, Label::NotLanguage};

enum class Language : std::uint8_t { Kannada, Tamil, Malayalam };
inline constexpr std::array<Language, 3> kAllLanguages = {
    Language::Kannada, Language::Tamil, Language::Malayalam};

enum class Provenance : std::uint8_t { Original, Transliterated, Translated };

enum class Split : std::uint8_t { Train, Dev, Test };

enum class VariantId : std::uint8_t { TRA, TRAI, TRAA, MERGED };
inline constexpr std::array<VariantId, 4> kAllVariants = {
    VariantId::TRA, VariantId::TRAI, VariantId::TRAA, VariantId::MERGED};

constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

std::string_view to_string(Label l);
std::string_view to_string(Language l);
std::string_view to_string(Provenance p);
std::string_view to_string(Split s);
std::string_view to_string(VariantId v);

// Raw label spelling -> Label, case-insensitive; anything starting with
// "not-" is NotLanguage. Returns nullopt for unknown spellings.
std::optional<Label> parse_label(std::string_view raw);
std::optional<Language> parse_language(std::string_view raw);
std::optional<Provenance> parse_provenance(std::string_view raw);
std::optional<VariantId> parse_variant(std::string_view raw);

struct Sample {
  std::uint64_t id = 0;
  std::string text;
  Label label = Label::Positive;
  Language language = Language::Kannada;
  Provenance provenance = Provenance::Original;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Corpus {
  Language language = Language::Kannada;
  Split split = Split::Train;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct CorpusStats {
  std::size_t total = 0;
  std::array<std::size_t, kNumLabels> per_class{};

  std::size_t count(Label l) const { return per_class[index_of(l)]; }
  double share(Label l) const {
    return total == 0 ? 0.0
                      : static_cast<double>(count(l)) /
                            static_cast<double>(total);
  }
};

struct LoadOptions {
  bool skip_header = false;
  Split split = Split::Train;
};

// Reads `text<TAB>label[<TAB>provenance]` records. Throws ParseError with the
// 1-based line number on malformed rows. Fully empty lines are skipped.
Corpus load_tsv(std::istream& in, Language language, LoadOptions opts = {});
Corpus load_tsv_file(const std::string& path, Language language,
                     LoadOptions opts = {});

// Writes the same format. Tabs and line breaks inside text become spaces.
void write_tsv(std::ostream& out, const Corpus& corpus,
               bool with_provenance = false);
void write_tsv_file(const std::string& path, const Corpus& corpus,
                    bool with_provenance = false);

// Bracketed spans, trailing language tags and NotLanguage rows removed;
// whitespace collapsed. Idempotent.
Corpus preprocess_for_translit(const Corpus& corpus);

// Text-level part of preprocess_for_translit.
std::string clean_text(std::string_view text);

// TRA = base, TRAI = base ++ translit, TRAA = base ++ translated,
// MERGED = base ++ translit ++ translated. Ids are renumbered 0..n-1.
Corpus build_variant(VariantId variant, const Corpus& base,
                     const Corpus& translit, const Corpus& translated);

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace codemix

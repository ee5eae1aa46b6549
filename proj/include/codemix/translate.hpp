#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codemix/corpus.hpp"

namespace codemix {

enum class TranslatorKind : std::uint8_t { ExternalCommand, Dictionary, Identity };

struct TranslatorSpec {
  TranslatorKind kind = TranslatorKind::Identity;
  std::vector<std::string> command;  // argv for ExternalCommand
  std::string dictionary_path;       // for Dictionary
  std::size_t chunk_size = 0;        // lines per child process; 0 = whole batch

  static TranslatorSpec identity();
  static TranslatorSpec dictionary(std::string path);
  static TranslatorSpec external(std::vector<std::string> argv);

  // Throws ConfigError when the spec cannot be used.
  void validate() const;

  // Stable fingerprint of the configuration. Dictionary ids cover the file
  // contents so an edited dictionary never hits stale cache entries.
  std::string id() const;
};

using Dictionary = std::unordered_map<std::string, std::string>;

// TSV `source<TAB>target`; later duplicates override earlier ones.
Dictionary load_dictionary(const std::string& path);

// Case-sensitive whitespace-token lookup; unknown tokens and all separators
// pass through unchanged.
std::string dictionary_translate(std::string_view text, const Dictionary& dict);

// Append-only (translator id, source hash) -> translation store. With an
// empty path the cache lives in memory only. All methods are serialized.
class TranslationCache {
 public:
  TranslationCache() = default;
  explicit TranslationCache(std::string path);

  std::optional<std::string> lookup(const std::string& translator_id,
                                    const std::string& source_hash) const;
  void insert(const std::string& translator_id, const std::string& source_hash,
              const std::string& translation);
  std::size_t size() const;
  const std::string& path() const { return path_; }

 private:
  static std::string key(const std::string& id, const std::string& hash);

  std::string path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
};

// Newlines are replaced by spaces before a sentence crosses the process
// boundary; the source hash is taken over this sanitized form.
std::string sanitize_for_protocol(std::string_view text);
std::string source_hash(std::string_view sanitized_text);

struct TranslateStats {
  std::size_t invocations = 0;  // child processes started
  std::size_t cache_hits = 0;
  std::size_t translated = 0;   // sentences sent to the translator
};

// Runs argv as a line filter: writes one line per input, expects exactly one
// line per input back. Throws TranslationError on spawn failure, non-zero
// exit or signal, ProtocolError on a line-count mismatch.
std::vector<std::string> run_line_filter(const std::vector<std::string>& argv,
                                         const std::vector<std::string>& lines);

// Order-preserving; each output keeps its input's label and becomes
// Translated. Blank translations fall back to the source text.
std::vector<Sample> translate_batch(const std::vector<Sample>& samples,
                                    const TranslatorSpec& spec,
                                    TranslationCache* cache,
                                    TranslateStats* stats = nullptr);

Corpus translate_corpus(const Corpus& corpus, const TranslatorSpec& spec,
                        TranslationCache* cache,
                        TranslateStats* stats = nullptr);

}  // namespace codemix

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codemix/corpus.hpp"

namespace codemix {

struct Rule {
  std::string roman;   // non-empty ASCII, no whitespace
  std::string native;  // target-script UTF-8; empty deletes the grapheme
  std::string group;   // entries sharing a group are alternatives

  friend bool operator==(const Rule&, const Rule&) = default;
};

// Ordered grapheme mapping table. Among entries with the same roman string
// the first listed one is the default output.
class RuleTable {
 public:
  RuleTable(Language language, std::vector<Rule> entries);

  // Built-in consonant/vowel/matra table for the language.
  static RuleTable default_for(Language language);

  // `roman<TAB>native[<TAB>group]` lines, `#` comments, blank lines ignored.
  static RuleTable parse(std::istream& in, Language language);
  static RuleTable load(const std::string& path, Language language);
  void write(std::ostream& out) const;

  Language language() const { return language_; }
  const std::vector<Rule>& entries() const { return entries_; }
  std::size_t max_grapheme_len() const { return max_len_; }

  // Entry indices whose roman string equals `roman`, in table order.
  const std::vector<std::size_t>* find(std::string_view roman) const;

  // Length of the longest roman grapheme matching `word` at `pos`; 0 if none.
  std::size_t longest_match(std::string_view word, std::size_t pos) const;

 private:
  Language language_;
  std::vector<Rule> entries_;
  std::size_t max_len_ = 0;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

// One way to consume input at a position.
struct RuleOption {
  std::size_t length = 0;  // bytes of `word` consumed
  std::string output;
};

// Options at `pos`, default (maximal-munch) option first. Alternatives are
// the other entries matching at `pos` that share the default entry's group.
// An unmatched scalar yields a single pass-through option.
std::vector<RuleOption> options_at(std::string_view word, std::size_t pos,
                                   const RuleTable& table);

// Deterministic left-to-right maximal munch.
std::string apply_rules(std::string_view word, const RuleTable& table);

struct Candidate {
  std::string text;
  double score = 0.0;  // natural-log score; 0 until reranked

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Breadth-first expansion over rule alternatives keeping at most `beam`
// partial hypotheses, ordered by number of non-default choices and then by
// choice sequence. Returns up to k distinct candidates; the first is always
// the apply_rules output. Throws ContractError unless beam >= k >= 1.
std::vector<Candidate> generate_candidates(std::string_view word,
                                           const RuleTable& table,
                                           std::size_t beam, std::size_t k);

// Character n-gram model with add-alpha smoothing over code points.
// Each line is padded with (n-1) boundary symbols on the left and one on the
// right; the boundary symbol is part of the predictive alphabet.
class CharLM {
 public:
  static constexpr char32_t kBoundary = 0xE000;

  static CharLM train(const std::vector<std::string>& lines, int order,
                      double alpha);
  static CharLM load(std::istream& in);
  static CharLM load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  const std::vector<char32_t>& alphabet() const { return alphabet_; }

  std::uint64_t count(std::u32string_view context, char32_t next) const;
  std::uint64_t context_total(std::u32string_view context) const;

  // P(next | last order-1 symbols of context).
  double prob(std::u32string_view context, char32_t next) const;

  // Mean per-symbol log-probability of the text, including the final
  // boundary prediction.
  double score(std::string_view text) const;

 private:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::map<char32_t, std::uint64_t> next;
  };

  std::u32string_view clip(std::u32string_view context) const;

  int order_ = 1;
  double alpha_ = 1.0;
  std::vector<char32_t> alphabet_;  // sorted
  std::map<std::u32string, ContextCounts> counts_;
};

// Scores every candidate with lm.score, sorts descending (stable) and keeps
// the first k.
std::vector<Candidate> rerank(std::vector<Candidate> candidates,
                              const CharLM& lm, std::size_t k);

struct DecodeParams {
  std::size_t beam = 16;
  std::size_t k = 4;
};

// Replaces every Latin-tagged token by its best reranked candidate (the token
// is lowercased before rule application). Everything else is preserved
// byte-for-byte.
std::string transliterate_text(std::string_view text, const RuleTable& table,
                               const CharLM& lm, DecodeParams params = {});

// Transliterates each sample and marks it Transliterated. The parallel
// version distributes rows over OpenMP threads; the serial one is the
// reference it must match exactly.
Corpus transliterate_corpus(const Corpus& corpus, const RuleTable& table,
                            const CharLM& lm, DecodeParams params = {});
Corpus transliterate_corpus_serial(const Corpus& corpus,
                                   const RuleTable& table, const CharLM& lm,
                                   DecodeParams params = {});

// Native-script lines to fit a reranking model when none is supplied: the
// native-script tokens of the corpus plus every rule output of the table.
std::vector<std::string> lm_training_lines(const Corpus& corpus,
                                           const RuleTable& table);

}  // namespace codemix

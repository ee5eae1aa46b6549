#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace codemix {

// Hashed character n-gram (+ optional word unigram) feature space.
//
// Feature keys: "c:" + n-gram for character n-grams, "w:" + token for words.
// Unigrams use the bare characters of each token; longer n-grams are taken
// over the token padded with kWordStart/kWordEnd. Text is ASCII-lowercased
// and truncated to max_tokens whitespace tokens (0 = no limit).
struct FeatureSpace {
  static constexpr char kWordStart = '\x02';
  static constexpr char kWordEnd = '\x03';

  int ngram_lo = 1;
  int ngram_hi = 4;
  bool word_unigrams = true;
  std::uint32_t dim = 1u << 14;
  std::size_t max_tokens = 128;

  // Throws ContractError unless 1 <= lo <= hi <= 6 and dim is a power of two
  // no smaller than 2^10.
  void validate() const;

  friend bool operator==(const FeatureSpace&, const FeatureSpace&) = default;
};

struct SparseVec {
  std::vector<std::uint32_t> indices;  // strictly increasing
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  friend bool operator==(const SparseVec&, const SparseVec&) = default;
};

std::uint32_t hash_feature(std::string_view key, std::uint32_t dim);

SparseVec featurize(std::string_view text, const FeatureSpace& space);

// Row-parallel batch featurization and its serial reference.
std::vector<SparseVec> featurize_batch(const std::vector<std::string>& texts,
                                       const FeatureSpace& space);
std::vector<SparseVec> featurize_batch_serial(
    const std::vector<std::string>& texts, const FeatureSpace& space);

}  // namespace codemix

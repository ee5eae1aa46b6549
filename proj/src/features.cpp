#include "codemix/features.hpp"

#include <map>

#include "codemix/error.hpp"
#include "codemix/hash.hpp"
#include "codemix/strings.hpp"
#include "codemix/utf8.hpp"

namespace codemix {

void FeatureSpace::validate() const {
  if (ngram_lo < 1 || ngram_lo > ngram_hi || ngram_hi > 6) {
    throw ContractError("FeatureSpace: need 1 <= lo <= hi <= 6");
  }
  if (dim < (1u << 10) || (dim & (dim - 1)) != 0) {
    throw ContractError("FeatureSpace: dim must be a power of two >= 1024");
  }
}

std::uint32_t hash_feature(std::string_view key, std::uint32_t dim) {
  return static_cast<std::uint32_t>(fnv1a64(key) & (dim - 1));
}

SparseVec featurize(std::string_view text, const FeatureSpace& space) {
  const std::string lowered = ascii_lower(text);
  auto tokens = split_whitespace(lowered);
  if (space.max_tokens > 0 && tokens.size() > space.max_tokens) {
    tokens.resize(space.max_tokens);
  }

  std::map<std::uint32_t, double> counts;
  std::string key;
  for (const auto tok : tokens) {
    const std::u32string chars = utf8::decode(tok);
    for (int n = space.ngram_lo; n <= space.ngram_hi; ++n) {
      const auto len = static_cast<std::size_t>(n);
      std::u32string seq;
      if (n == 1) {
        seq = chars;
      } else {
        seq.push_back(static_cast<char32_t>(FeatureSpace::kWordStart));
        seq += chars;
        seq.push_back(static_cast<char32_t>(FeatureSpace::kWordEnd));
      }
      if (seq.size() < len) continue;
      for (std::size_t i = 0; i + len <= seq.size(); ++i) {
        key = "c:";
        for (std::size_t j = 0; j < len; ++j) utf8::append(key, seq[i + j]);
        counts[hash_feature(key, space.dim)] += 1.0;
      }
    }
    if (space.word_unigrams) {
      key = "w:";
      key.append(tok);
      counts[hash_feature(key, space.dim)] += 1.0;
    }
  }

  SparseVec out;
  out.indices.reserve(counts.size());
  out.values.reserve(counts.size());
  for (const auto& [idx, v] : counts) {
    out.indices.push_back(idx);
    out.values.push_back(v);
  }
  return out;
}

std::vector<SparseVec> featurize_batch_serial(
    const std::vector<std::string>& texts, const FeatureSpace& space) {
  std::vector<SparseVec> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(featurize(t, space));
  return out;
}

std::vector<SparseVec> featurize_batch(const std::vector<std::string>& texts,
                                       const FeatureSpace& space) {
  std::vector<SparseVec> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out[idx] = featurize(texts[idx], space);
  }
  return out;
}

}  // namespace codemix

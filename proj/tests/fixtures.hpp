#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "codemix/corpus.hpp"
#include "codemix/rng.hpp"

namespace codemix::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "codemix-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p,
                       const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string random_roman_word(Rng& rng, std::size_t min_len = 1,
                                     std::size_t max_len = 10) {
  const std::size_t len = min_len + rng.below(max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) {
    w.push_back(static_cast<char>('a' + rng.below(26)));
  }
  return w;
}

// Two classes with disjoint vocabularies: Positive comments use `pos_words`,
// Negative ones `neg_words`, plus shared filler.
inline Corpus separable_corpus(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> pos_words = {
      "super", "semma", "chennagide", "nannayittund", "mass", "adipoli"};
  static const std::vector<std::string> neg_words = {
      "waste", "mokka", "boring", "kevala", "flop", "bore"};
  static const std::vector<std::string> filler = {"movie", "padam", "trailer",
                                                  "cinema", "song", "film"};
  Rng rng(seed);
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    const auto& vocab = pos ? pos_words : neg_words;
    std::string text;
    const std::size_t words = 2 + rng.below(4);
    for (std::size_t w = 0; w < words; ++w) {
      if (w) text.push_back(' ');
      text += (w % 2 == 0) ? vocab[rng.below(vocab.size())]
                           : filler[rng.below(filler.size())];
    }
    c.samples.push_back(Sample{i, text, pos ? Label::Positive : Label::Negative,
                               c.language, Provenance::Original});
  }
  return c;
}

// Five-class code-mixed toy data: each class has marker words, mixed with
// shared romanized filler and the occasional native-script token.
inline std::string toy_tsv(std::size_t n, std::uint64_t seed,
                           const std::string& native_token) {
  static const std::vector<std::vector<std::string>> markers = {
      {"super", "semma", "mass", "adipoli", "chennagide"},
      {"waste", "mokka", "flop", "kevala", "bore"},
      {"okay", "paravailla", "mixed", "sumar", "average"},
      {"when", "release", "date", "trailer", "update"},
      {"hello", "bro", "subscribe", "channel", "india"}};
  static const std::vector<std::string> filler = {
      "padam", "movie", "cinema", "song", "hero", "director", "film", "anna"};
  static const std::vector<std::string> labels = {
      "Positive", "Negative", "Mixed_feelings", "unknown_state",
      "not-language"};
  Rng rng(seed);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = rng.below(10) < 4 ? 0 : rng.below(5);
    std::string text;
    const std::size_t words = 3 + rng.below(5);
    for (std::size_t w = 0; w < words; ++w) {
      if (w) text.push_back(' ');
      const std::uint64_t r = rng.below(10);
      if (r < 4) {
        text += markers[cls][rng.below(markers[cls].size())];
      } else if (r < 9) {
        text += filler[rng.below(filler.size())];
      } else {
        text += native_token;
      }
    }
    if (rng.below(8) == 0) text += " (official)";
    out += text + "\t" + labels[cls] + "\n";
  }
  return out;
}

inline std::string native_token(Language l) {
  switch (l) {
    case Language::Kannada: return "ಚಿತ್ರ";
    case Language::Tamil: return "படம்";
    case Language::Malayalam: return "പടം";
  }
  return "";
}

// Writes train/dev/test splits per language and a grid config with a small
// MLP. Returns the config path.
inline std::filesystem::path write_toy_grid(const std::filesystem::path& dir,
                                            const std::vector<Language>& langs,
                                            std::uint64_t seed = 42,
                                            std::size_t train_rows = 120) {
  std::string entries;
  std::uint64_t data_seed = 1000;
  for (Language l : langs) {
    const std::string name(to_string(l));
    write_file(dir / (name + "_train.tsv"), toy_tsv(train_rows, data_seed++, native_token(l)));
    write_file(dir / (name + "_dev.tsv"), toy_tsv(40, data_seed++, native_token(l)));
    write_file(dir / (name + "_test.tsv"), toy_tsv(60, data_seed++, native_token(l)));
    if (!entries.empty()) entries += ",\n";
    entries += "    {\"language\": \"" + name + "\", \"train\": \"" + name +
               "_train.tsv\", \"dev\": \"" + name + "_dev.tsv\", \"test\": \"" +
               name + "_test.tsv\"}";
  }
  const std::string config =
      "{\n  \"languages\": [\n" + entries + "\n  ],\n"
      "  \"translator\": {\"kind\": \"identity\"},\n"
      "  \"mlp\": {\"epochs\": 3, \"batch_size\": 16, \"embed\": 8, \"hidden\": 16,\n"
      "          \"features\": {\"dim\": 4096}},\n"
      "  \"nb\": {\"alpha\": 1.0, \"features\": {\"dim\": 4096}},\n"
      "  \"seed\": " + std::to_string(seed) + ",\n"
      "  \"output_dir\": \"out\"\n}\n";
  const auto path = dir / "grid.json";
  write_file(path, config);
  return path;
}

}  // namespace codemix::testing

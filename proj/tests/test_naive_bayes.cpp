#include <doctest.h>

#include <cmath>

#include "codemix/error.hpp"
#include "codemix/model.hpp"
#include "codemix/naive_bayes.hpp"
#include "fixtures.hpp"

using namespace codemix;

namespace {

FeatureSpace words_only() {
  FeatureSpace s;
  s.ngram_lo = s.ngram_hi = 6;  // padded two-letter words have no 6-grams
  s.word_unigrams = true;
  s.dim = 1u << 16;
  return s;
}

Corpus docs(const std::vector<std::pair<std::string, Label>>& rows) {
  Corpus c;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    c.samples.push_back({i, rows[i].first, rows[i].second, Language::Kannada,
                         Provenance::Original});
  }
  return c;
}

}  // namespace

TEST_SUITE("naive_bayes") {

TEST_CASE("toy posteriors match hand-computed Bayes values") {
  const Corpus c = docs({{"ok", Label::Positive},
                         {"ok", Label::Positive},
                         {"no", Label::Negative},
                         {"ok", Label::Negative}});
  const FeatureSpace s = words_only();
  const NBModel m = train_nb(c, s, 1.0);
  const double D = s.dim;
  // P(pos) = 1/2, P(ok|pos) = (2+1)/(2+D); P(neg) = 1/2, P(ok|neg) = (1+1)/(2+D)
  const double lp = std::log(0.5) + std::log(3.0 / (2.0 + D));
  const double ln = std::log(0.5) + std::log(2.0 / (2.0 + D));
  const double pos = std::exp(lp) / (std::exp(lp) + std::exp(ln));
  const auto post = nb_posterior(m, featurize("ok", s));
  CHECK(post[index_of(Label::Positive)] == doctest::Approx(pos).epsilon(1e-12));
  CHECK(post[index_of(Label::Negative)] == doctest::Approx(1 - pos).epsilon(1e-12));
  CHECK(post[index_of(Label::MixedFeelings)] == 0.0);
  CHECK(std::isinf(m.log_prior[index_of(Label::UnknownState)]));
}

TEST_CASE("single class always wins") {
  const NBModel m = train_nb(docs({{"semma", Label::MixedFeelings}, {"mass", Label::MixedFeelings}}),
                             FeatureSpace{}, 1.0);
  for (const char* t : {"semma", "waste", "", "ಕನಸು"}) {
    CHECK(predict(Model{m}, t).label == Label::MixedFeelings);
  }
}

TEST_CASE("priors are normalized") {
  const NBModel m = train_nb(codemix::testing::separable_corpus(50, 1), FeatureSpace{}, 0.5);
  double sum = 0;
  for (double lp : m.log_prior) sum += std::exp(lp);
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("doubling the corpus") {
  const Corpus c = codemix::testing::separable_corpus(40, 2);
  Corpus twice = c;
  for (const auto& s : c.samples) twice.samples.push_back(s);
  const FeatureSpace s;
  const NBModel once = train_nb(c, s, 1.0);
  // Priors are count ratios and do not move.
  CHECK(train_nb(twice, s, 1.0).log_prior == once.log_prior);
  // With the smoothing mass doubled as well, every parameter is unchanged.
  const NBModel doubled = train_nb(twice, s, 2.0);
  CHECK(doubled.log_prior == once.log_prior);
  CHECK(doubled.log_likelihood == once.log_likelihood);
}

TEST_CASE("own training documents are recovered") {
  const Corpus c = codemix::testing::separable_corpus(60, 3);
  const Model m = train_nb(c, FeatureSpace{}, 1.0);
  for (const auto& s : c.samples) CHECK(predict(m, s.text).label == s.label);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(train_nb(Corpus{}, FeatureSpace{}, 1.0), ContractError);
  CHECK_THROWS_AS(train_nb(docs({{"a", Label::Positive}}), FeatureSpace{}, 0.0), ContractError);
}

}  // TEST_SUITE

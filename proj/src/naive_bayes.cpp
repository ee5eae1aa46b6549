#include "codemix/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "codemix/error.hpp"

namespace codemix {

NBModel train_nb(const Corpus& corpus, const FeatureSpace& space,
                 double alpha) {
  space.validate();
  if (corpus.empty()) throw ContractError("train_nb: empty corpus");
  if (!(alpha > 0.0)) throw ContractError("train_nb: alpha must be > 0");

  const std::size_t dim = space.dim;
  std::vector<double> counts(kNumLabels * dim, 0.0);
  std::array<double, kNumLabels> totals{};
  std::array<std::size_t, kNumLabels> docs{};
  for (const auto& s : corpus.samples) {
    const std::size_t c = index_of(s.label);
    ++docs[c];
    const SparseVec x = featurize(s.text, space);
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      counts[c * dim + x.indices[k]] += x.values[k];
      totals[c] += x.values[k];
    }
  }

  NBModel m;
  m.space = space;
  m.alpha = alpha;
  m.log_likelihood.resize(kNumLabels * dim);
  const double n = static_cast<double>(corpus.size());
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    m.log_prior[c] = std::log(static_cast<double>(docs[c]) / n);
    const double denom = totals[c] + alpha * static_cast<double>(dim);
    for (std::size_t f = 0; f < dim; ++f) {
      m.log_likelihood[c * dim + f] =
          std::log((counts[c * dim + f] + alpha) / denom);
    }
  }
  return m;
}

ClassScores nb_scores(const NBModel& model, const SparseVec& x) {
  ClassScores s = model.log_prior;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      if (x.indices[k] >= model.space.dim) {
        throw ContractError("nb_scores: feature index outside model dimension");
      }
      s[c] += x.values[k] * model.log_lik(c, x.indices[k]);
    }
  }
  return s;
}

ClassScores nb_posterior(const NBModel& model, const SparseVec& x) {
  const ClassScores s = nb_scores(model, x);
  const double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double v : s) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  ClassScores p;
  for (std::size_t c = 0; c < kNumLabels; ++c) p[c] = std::exp(s[c] - lse);
  return p;
}

}  // namespace codemix

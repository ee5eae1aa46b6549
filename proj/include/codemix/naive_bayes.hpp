#pragma once

#include <array>
#include <vector>

#include "codemix/corpus.hpp"
#include "codemix/features.hpp"

namespace codemix {

using ClassScores = std::array<double, kNumLabels>;

// Multinomial naive Bayes over hashed features.
struct NBModel {
  FeatureSpace space;
  double alpha = 1.0;
  // log(n_c / N); -inf for classes absent from training.
  ClassScores log_prior{};
  // Row-major [class][feature]: log((count + alpha) / (total_c + alpha * dim)).
  std::vector<double> log_likelihood;

  double log_lik(std::size_t cls, std::uint32_t feature) const {
    return log_likelihood[cls * space.dim + feature];
  }
};

// Maximum-likelihood priors with add-alpha feature smoothing. Throws
// ContractError on an empty corpus or alpha <= 0.
NBModel train_nb(const Corpus& corpus, const FeatureSpace& space, double alpha);

// Unnormalized log-posteriors: log prior + sum of value * log-likelihood,
// accumulated in increasing feature order.
ClassScores nb_scores(const NBModel& model, const SparseVec& x);

// Normalized posterior probabilities via log-sum-exp.
ClassScores nb_posterior(const NBModel& model, const SparseVec& x);

}  // namespace codemix

#pragma once

#include <cmath>
#include <set>

#include "codemix/mlp.hpp"
#include "fixtures.hpp"

namespace codemix::testing {

struct GradCheck {
  double relative_error = 0.0;  // ||a - n|| / (||a|| + ||n||)
  std::size_t checked = 0;
};

// Random small network and batch, analytic gradient against central
// differences. Every parameter that can influence the loss is perturbed:
// embedding rows of active features plus all dense weights and biases.
inline GradCheck gradient_check(std::uint64_t seed) {
  Rng rng(seed);
  FeatureSpace space;
  space.ngram_lo = 1;
  space.ngram_hi = 2;
  space.dim = 1u << 10;
  const std::size_t embed = 3 + rng.below(4), hidden = 3 + rng.below(5);
  MLPModel model = init_mlp(space, embed, hidden, 0.0, seed);
  // Non-zero biases so ReLU units sit away from their kink.
  for (auto& g : model.groups) {
    for (double& b : g.bias) b = rng.uniform(-0.5, 0.5);
  }

  const std::size_t batch_n = 1 + rng.below(4);
  std::vector<SparseVec> batch;
  std::vector<Label> labels;
  std::vector<std::vector<double>> keep;
  const bool use_dropout = rng.below(2) == 1;
  for (std::size_t i = 0; i < batch_n; ++i) {
    batch.push_back(featurize(random_roman_word(rng, 2, 6), space));
    labels.push_back(kAllLabels[rng.below(kNumLabels)]);
    std::vector<double> row(hidden, 1.0);
    if (use_dropout) {
      for (double& k : row) k = rng.below(4) == 0 ? 0.0 : 1.0 / 0.75;
    }
    keep.push_back(row);
  }

  GroupParams grads;
  mlp_loss_and_gradients(model, batch, labels, &keep, &grads);

  std::set<std::uint32_t> active;
  for (const auto& x : batch) active.insert(x.indices.begin(), x.indices.end());

  const double h = 1e-6;
  double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
  GradCheck out;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = mlp_loss_and_gradients(model, batch, labels, &keep, nullptr);
    param = saved - h;
    const double down = mlp_loss_and_gradients(model, batch, labels, &keep, nullptr);
    param = saved;
    const double numeric = (up - down) / (2 * h);
    diff2 += (analytic - numeric) * (analytic - numeric);
    a2 += analytic * analytic;
    n2 += numeric * numeric;
    ++out.checked;
  };

  for (std::uint32_t f : active) {
    for (std::size_t e = 0; e < embed; ++e) {
      probe(model.groups[0].weights[f * embed + e], grads[0].weights[f * embed + e]);
    }
  }
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    if (g > 0) {
      for (std::size_t i = 0; i < model.groups[g].weights.size(); ++i) {
        probe(model.groups[g].weights[i], grads[g].weights[i]);
      }
    }
    for (std::size_t i = 0; i < model.groups[g].bias.size(); ++i) {
      probe(model.groups[g].bias[i], grads[g].bias[i]);
    }
  }
  const double denom = std::sqrt(a2) + std::sqrt(n2);
  out.relative_error = denom == 0.0 ? 0.0 : std::sqrt(diff2) / denom;
  return out;
}

}  // namespace codemix::testing

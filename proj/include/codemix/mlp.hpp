#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "codemix/corpus.hpp"
#include "codemix/features.hpp"
#include "codemix/naive_bayes.hpp"
#include "codemix/schedule.hpp"

namespace codemix {

struct ParamGroup {
  std::vector<double> weights;
  std::vector<double> bias;

  std::size_t size() const { return weights.size() + bias.size(); }
  friend bool operator==(const ParamGroup&, const ParamGroup&) = default;
};

using GroupParams = std::array<ParamGroup, kNumGroups>;

// Three-group feed-forward classifier over L2-normalized sparse features.
//   G0: embedding bag, weights [dim][embed] (row per feature), bias [embed]
//   G1: hidden layer, weights [hidden][embed], bias [hidden], ReLU
//   G2: output layer, weights [5][hidden], bias [5]
// Dropout (inverted) is applied to the hidden activations while training.
struct MLPModel {
  FeatureSpace space;
  std::size_t embed = 0;
  std::size_t hidden = 0;
  double dropout = 0.0;
  GroupParams groups;
};

MLPModel init_mlp(const FeatureSpace& space, std::size_t embed,
                  std::size_t hidden, double dropout, std::uint64_t seed);

// Pre-softmax logits (inference: no dropout).
ClassScores mlp_logits(const MLPModel& model, const SparseVec& x);

// Mean cross-entropy over the batch and its gradient. `keep_scale`, when
// given, holds one row of `hidden` multipliers per sample (0 or 1/(1-p)).
double mlp_loss_and_gradients(const MLPModel& model,
                              std::span<const SparseVec> batch,
                              std::span<const Label> labels,
                              const std::vector<std::vector<double>>* keep_scale,
                              GroupParams* grads);

// Softmax cross-entropy of a single logit vector.
double cross_entropy(const ClassScores& logits, Label gold);

// One Adam step over a flat parameter block with bias correction for step
// `t` (1-based). Decoupled weight decay when weight_decay > 0. The OpenMP
// kernel and the serial reference produce bit-identical results.
struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, std::uint64_t t,
                 const AdamHyper& h);
void adam_update_serial(std::span<double> params, std::span<const double> grads,
                        std::span<double> m, std::span<double> v,
                        std::uint64_t t, const AdamHyper& h);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  std::array<bool, kNumGroups> trainable{};
};

struct TrainHooks {
  // Called after each epoch with the model state at that point.
  std::function<void(const EpochLog&, const MLPModel&)> on_epoch_end;
};

// Mini-batch training with seeded per-epoch shuffling (last partial batch
// kept), STLR over all steps, discriminative per-group rates and the given
// unfreeze schedule. Frozen groups are left bit-identical, optimizer state
// included. `stlr.total_steps` may be 0 (derived from the data) or must
// equal epochs * ceil(n / batch). Throws TrainingError on a non-finite loss.
MLPModel train_mlp(const Corpus& corpus, const FeatureSpace& space,
                   const TrainConfig& config, const STLRParams& stlr,
                   const UnfreezeSchedule& unfreeze, std::uint64_t seed,
                   const TrainHooks& hooks = {});

std::size_t steps_per_epoch(std::size_t samples, std::size_t batch_size);

}  // namespace codemix

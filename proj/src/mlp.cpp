#include "codemix/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "codemix/error.hpp"
#include "codemix/rng.hpp"

namespace codemix {

namespace {

void fill_uniform(std::vector<double>& v, double bound, Rng& rng) {
  for (double& w : v) w = rng.uniform(-bound, bound);
}

// L2-normalized copy of the input values.
std::vector<double> normalized(const SparseVec& x) {
  double ss = 0.0;
  for (double v : x.values) ss += v * v;
  std::vector<double> out(x.values);
  if (ss > 0.0) {
    const double inv = 1.0 / std::sqrt(ss);
    for (double& v : out) v *= inv;
  }
  return out;
}

struct Activations {
  std::vector<double> h0;  // embed
  std::vector<double> z1;  // hidden, pre-activation
  std::vector<double> a1;  // hidden, after ReLU and dropout scaling
  ClassScores logits{};
};

void forward(const MLPModel& m, const SparseVec& x, const double* keep,
             Activations& act) {
  const std::size_t E = m.embed, H = m.hidden;
  const auto& g0 = m.groups[0];
  const auto& g1 = m.groups[1];
  const auto& g2 = m.groups[2];

  act.h0.assign(g0.bias.begin(), g0.bias.end());
  const std::vector<double> xv = normalized(x);
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    if (x.indices[k] >= m.space.dim) {
      throw ContractError("mlp: feature index outside model dimension");
    }
    const double* row = &g0.weights[std::size_t{x.indices[k]} * E];
    for (std::size_t e = 0; e < E; ++e) act.h0[e] += xv[k] * row[e];
  }

  act.z1.resize(H);
  act.a1.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    double z = g1.bias[j];
    const double* row = &g1.weights[j * E];
    for (std::size_t e = 0; e < E; ++e) z += row[e] * act.h0[e];
    act.z1[j] = z;
    double a = z > 0.0 ? z : 0.0;
    if (keep) a *= keep[j];
    act.a1[j] = a;
  }

  for (std::size_t c = 0; c < kNumLabels; ++c) {
    double z = g2.bias[c];
    const double* row = &g2.weights[c * H];
    for (std::size_t j = 0; j < H; ++j) z += row[j] * act.a1[j];
    act.logits[c] = z;
  }
}

ClassScores softmax(const ClassScores& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  ClassScores p;
  double z = 0.0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    p[c] = std::exp(logits[c] - mx);
    z += p[c];
  }
  for (double& v : p) v /= z;
  return p;
}

void zero_like(const GroupParams& src, GroupParams& dst) {
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    dst[g].weights.assign(src[g].weights.size(), 0.0);
    dst[g].bias.assign(src[g].bias.size(), 0.0);
  }
}

}  // namespace

MLPModel init_mlp(const FeatureSpace& space, std::size_t embed,
                  std::size_t hidden, double dropout, std::uint64_t seed) {
  space.validate();
  MLPModel m;
  m.space = space;
  m.embed = embed;
  m.hidden = hidden;
  m.dropout = dropout;
  Rng rng(seed);
  auto& g0 = m.groups[0];
  auto& g1 = m.groups[1];
  auto& g2 = m.groups[2];
  g0.weights.resize(std::size_t{space.dim} * embed);
  g0.bias.assign(embed, 0.0);
  g1.weights.resize(hidden * embed);
  g1.bias.assign(hidden, 0.0);
  g2.weights.resize(kNumLabels * hidden);
  g2.bias.assign(kNumLabels, 0.0);
  fill_uniform(g0.weights, 0.5, rng);
  fill_uniform(g1.weights,
               std::sqrt(6.0 / static_cast<double>(embed + hidden)), rng);
  fill_uniform(g2.weights,
               std::sqrt(6.0 / static_cast<double>(hidden + kNumLabels)), rng);
  return m;
}

ClassScores mlp_logits(const MLPModel& model, const SparseVec& x) {
  Activations act;
  forward(model, x, nullptr, act);
  return act.logits;
}

double cross_entropy(const ClassScores& logits, Label gold) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  return mx + std::log(z) - logits[index_of(gold)];
}

double mlp_loss_and_gradients(
    const MLPModel& model, std::span<const SparseVec> batch,
    std::span<const Label> labels,
    const std::vector<std::vector<double>>* keep_scale, GroupParams* grads) {
  if (batch.size() != labels.size() || batch.empty()) {
    throw ContractError("mlp_loss_and_gradients: batch/label size mismatch");
  }
  const std::size_t E = model.embed, H = model.hidden;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  if (grads) zero_like(model.groups, *grads);

  double loss = 0.0;
  Activations act;
  std::vector<double> da1(H), dh0(E);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double* keep = keep_scale ? (*keep_scale)[i].data() : nullptr;
    forward(model, batch[i], keep, act);
    loss += cross_entropy(act.logits, labels[i]);
    if (!grads) continue;

    ClassScores dlogits = softmax(act.logits);
    dlogits[index_of(labels[i])] -= 1.0;
    for (double& d : dlogits) d *= inv_b;

    auto& g2 = (*grads)[2];
    const auto& w2 = model.groups[2].weights;
    std::fill(da1.begin(), da1.end(), 0.0);
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      g2.bias[c] += dlogits[c];
      for (std::size_t j = 0; j < H; ++j) {
        g2.weights[c * H + j] += dlogits[c] * act.a1[j];
        da1[j] += w2[c * H + j] * dlogits[c];
      }
    }

    auto& g1 = (*grads)[1];
    const auto& w1 = model.groups[1].weights;
    std::fill(dh0.begin(), dh0.end(), 0.0);
    for (std::size_t j = 0; j < H; ++j) {
      double dz = act.z1[j] > 0.0 ? da1[j] : 0.0;
      if (keep) dz *= keep[j];
      if (dz == 0.0) continue;
      g1.bias[j] += dz;
      for (std::size_t e = 0; e < E; ++e) {
        g1.weights[j * E + e] += dz * act.h0[e];
        dh0[e] += w1[j * E + e] * dz;
      }
    }

    auto& g0 = (*grads)[0];
    const std::vector<double> xv = normalized(batch[i]);
    for (std::size_t e = 0; e < E; ++e) g0.bias[e] += dh0[e];
    for (std::size_t k = 0; k < batch[i].nnz(); ++k) {
      double* row = &g0.weights[std::size_t{batch[i].indices[k]} * E];
      for (std::size_t e = 0; e < E; ++e) row[e] += xv[k] * dh0[e];
    }
  }
  return loss * inv_b;
}

namespace {

inline void adam_element(double& p, double g, double& m, double& v,
                         double c1, double c2, const AdamHyper& h) {
  m = h.beta1 * m + (1.0 - h.beta1) * g;
  v = h.beta2 * v + (1.0 - h.beta2) * g * g;
  const double mhat = m / c1;
  const double vhat = v / c2;
  p -= h.lr * (mhat / (std::sqrt(vhat) + h.eps));
  if (h.weight_decay > 0.0) p -= h.lr * h.weight_decay * p;
}

void check_adam_shapes(std::span<double> params, std::span<const double> grads,
                       std::span<double> m, std::span<double> v,
                       std::uint64_t t) {
  if (grads.size() != params.size() || m.size() != params.size() ||
      v.size() != params.size()) {
    throw ContractError("adam_update: size mismatch");
  }
  if (t < 1) throw ContractError("adam_update: step must be >= 1");
}

}  // namespace

void adam_update_serial(std::span<double> params, std::span<const double> grads,
                        std::span<double> m, std::span<double> v,
                        std::uint64_t t, const AdamHyper& h) {
  check_adam_shapes(params, grads, m, v, t);
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam_element(params[i], grads[i], m[i], v[i], c1, c2, h);
  }
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, std::uint64_t t,
                 const AdamHyper& h) {
  check_adam_shapes(params, grads, m, v, t);
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(t));
  const auto n = static_cast<std::ptrdiff_t>(params.size());
#pragma omp parallel for schedule(static) if (n > 32768)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    adam_element(params[k], grads[k], m[k], v[k], c1, c2, h);
  }
}

std::size_t steps_per_epoch(std::size_t samples, std::size_t batch_size) {
  return (samples + batch_size - 1) / batch_size;
}

MLPModel train_mlp(const Corpus& corpus, const FeatureSpace& space,
                   const TrainConfig& config, const STLRParams& stlr,
                   const UnfreezeSchedule& unfreeze, std::uint64_t seed,
                   const TrainHooks& hooks) {
  config.validate();
  if (corpus.empty()) throw ContractError("train_mlp: empty corpus");
  if (unfreeze.epochs() < config.epochs) {
    throw ContractError("train_mlp: unfreeze schedule covers " +
                        std::to_string(unfreeze.epochs()) + " of " +
                        std::to_string(config.epochs) + " epochs");
  }

  FeatureSpace fs = space;
  fs.max_tokens = config.max_len;
  const std::size_t n = corpus.size();
  const std::size_t per_epoch = steps_per_epoch(n, config.batch_size);
  STLRParams sched = stlr;
  const std::size_t total = per_epoch * config.epochs;
  if (sched.total_steps == 0) {
    sched.total_steps = total;
  } else if (sched.total_steps != total) {
    throw ContractError("train_mlp: STLR total_steps " +
                        std::to_string(sched.total_steps) +
                        " does not match " + std::to_string(total) +
                        " training steps");
  }
  sched.total_steps = std::max<std::size_t>(sched.total_steps, 2);
  sched.validate();
  const std::vector<double> group_scale =
      discriminative_lrs(1.0, kNumGroups, config.decay);

  std::vector<std::string> texts;
  std::vector<Label> labels;
  texts.reserve(n);
  labels.reserve(n);
  for (const auto& s : corpus.samples) {
    texts.push_back(s.text);
    labels.push_back(s.label);
  }
  const std::vector<SparseVec> features = featurize_batch(texts, fs);

  MLPModel model =
      init_mlp(fs, config.embed_dim, config.hidden_dim, config.dropout, seed);
  GroupParams m1, m2, grads;
  zero_like(model.groups, m1);
  zero_like(model.groups, m2);
  std::array<std::uint64_t, kNumGroups> group_steps{};

  // Independent streams for batching order and dropout masks.
  Rng order_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Rng dropout_rng(seed ^ 0xd1b54a32d192ed03ULL);
  const double keep_value =
      config.dropout > 0.0 ? 1.0 / (1.0 - config.dropout) : 1.0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<SparseVec> batch_x;
  std::vector<Label> batch_y;
  std::vector<std::vector<double>> keep;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto& trainable = unfreeze.trainable(epoch);
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < n; b += config.batch_size) {
      const std::size_t e = std::min(n, b + config.batch_size);
      batch_x.clear();
      batch_y.clear();
      keep.assign(e - b, std::vector<double>(model.hidden, 1.0));
      for (std::size_t i = b; i < e; ++i) {
        batch_x.push_back(features[order[i]]);
        batch_y.push_back(labels[order[i]]);
      }
      if (config.dropout > 0.0) {
        for (auto& row : keep) {
          for (double& k : row) {
            k = dropout_rng.uniform() < config.dropout ? 0.0 : keep_value;
          }
        }
      }
      const double loss =
          mlp_loss_and_gradients(model, batch_x, batch_y, &keep, &grads);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite loss " << loss << " at epoch " << epoch + 1
            << ", step " << step;
        throw TrainingError(msg.str());
      }
      loss_sum += loss * static_cast<double>(e - b);

      const double lr = stlr_lr(std::min(step, sched.total_steps), sched);
      for (std::size_t g = 0; g < kNumGroups; ++g) {
        if (!trainable[g]) continue;
        AdamHyper h{lr * group_scale[g], config.beta1, config.beta2, config.eps,
                    config.weight_decay};
        const std::uint64_t t = ++group_steps[g];
        adam_update(model.groups[g].weights, grads[g].weights, m1[g].weights,
                    m2[g].weights, t, h);
        adam_update(model.groups[g].bias, grads[g].bias, m1[g].bias,
                    m2[g].bias, t, h);
      }
      ++step;
    }

    if (hooks.on_epoch_end) {
      std::size_t correct = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const ClassScores s = mlp_logits(model, features[i]);
        const auto best = static_cast<std::size_t>(
            std::max_element(s.begin(), s.end()) - s.begin());
        if (best == index_of(labels[i])) ++correct;
      }
      EpochLog log{epoch + 1, loss_sum / static_cast<double>(n),
                   static_cast<double>(correct) / static_cast<double>(n),
                   trainable};
      hooks.on_epoch_end(log, model);
    }
  }
  return model;
}

}  // namespace codemix

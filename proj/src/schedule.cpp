#include "codemix/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "codemix/error.hpp"

namespace codemix {

void STLRParams::validate() const {
  if (!(lr_max > 0.0)) throw ContractError("STLR: lr_max must be > 0");
  if (!(ratio > 1.0)) throw ContractError("STLR: ratio must be > 1");
  if (!(cut_frac > 0.0 && cut_frac < 1.0)) {
    throw ContractError("STLR: cut_frac must lie in (0, 1)");
  }
  if (total_steps < 2) throw ContractError("STLR: total_steps must be >= 2");
}

// Clamped to [1, T-1] so short schedules keep both a warm-up and a decay.
std::size_t STLRParams::cut() const {
  const auto c = static_cast<std::size_t>(
      std::floor(static_cast<double>(total_steps) * cut_frac));
  return std::clamp<std::size_t>(c, 1, total_steps - 1);
}

double stlr_lr(std::size_t t, const STLRParams& p) {
  p.validate();
  if (t > p.total_steps) throw ContractError("stlr_lr: t exceeds total_steps");
  const std::size_t cut = p.cut();
  const double frac =
      t < cut ? static_cast<double>(t) / static_cast<double>(cut)
              : 1.0 - static_cast<double>(t - cut) /
                          static_cast<double>(p.total_steps - cut);
  // Grouped so that frac == 1 yields lr_max exactly.
  return p.lr_max * ((1.0 + frac * (p.ratio - 1.0)) / p.ratio);
}

std::vector<double> discriminative_lrs(double base_lr, std::size_t groups,
                                       double decay) {
  if (groups < 1) throw ContractError("discriminative_lrs: groups must be >= 1");
  if (!(decay > 1.0)) throw ContractError("discriminative_lrs: decay must be > 1");
  std::vector<double> lrs(groups);
  lrs[groups - 1] = base_lr;
  for (std::size_t i = groups - 1; i > 0; --i) lrs[i - 1] = lrs[i] / decay;
  return lrs;
}

UnfreezeSchedule::UnfreezeSchedule(std::vector<GroupSet> epochs)
    : epochs_(std::move(epochs)) {
  if (epochs_.empty()) throw ContractError("UnfreezeSchedule: no epochs");
  for (std::size_t e = 1; e < epochs_.size(); ++e) {
    for (std::size_t g = 0; g < kNumGroups; ++g) {
      if (epochs_[e - 1][g] && !epochs_[e][g]) {
        throw ContractError("UnfreezeSchedule: group " + std::to_string(g) +
                            " refrozen in epoch " + std::to_string(e + 1));
      }
    }
  }
  for (bool on : epochs_.back()) {
    if (!on) {
      throw ContractError("UnfreezeSchedule: final epoch must train all groups");
    }
  }
}

UnfreezeSchedule UnfreezeSchedule::gradual(std::size_t epochs) {
  std::vector<GroupSet> sets(epochs);
  for (std::size_t e = 0; e < epochs; ++e) {
    const bool last = e + 1 == epochs;
    for (std::size_t g = 0; g < kNumGroups; ++g) {
      sets[e][g] = last || g + e + 1 >= kNumGroups;
    }
  }
  return UnfreezeSchedule(std::move(sets));
}

UnfreezeSchedule UnfreezeSchedule::all_trainable(std::size_t epochs) {
  GroupSet all;
  all.fill(true);
  return UnfreezeSchedule(std::vector<GroupSet>(epochs, all));
}

const UnfreezeSchedule::GroupSet& UnfreezeSchedule::trainable(
    std::size_t epoch) const {
  if (epoch >= epochs_.size()) {
    throw ContractError("UnfreezeSchedule: epoch " + std::to_string(epoch + 1) +
                        " not covered");
  }
  return epochs_[epoch];
}

TrainConfig TrainConfig::transformer_table() {
  TrainConfig c;
  c.batch_size = 32;
  c.epochs = 5;
  c.learning_rate = 2e-5;
  c.max_len = 128;
  c.dropout = 0.4;
  return c;
}

TrainConfig TrainConfig::ulmfit() {
  TrainConfig c;
  c.lr_range_start = 1e-8;
  c.lr_range_end = 1e-2;
  c.learning_rate = c.lr_range_end;
  c.dropout = 0.5;
  return c;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ContractError("TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw ContractError("TrainConfig: batch_size must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ContractError("TrainConfig: dropout must lie in [0, 1)");
  }
  if (embed_dim < 1 || hidden_dim < 1) {
    throw ContractError("TrainConfig: layer widths must be >= 1");
  }
  if (!(decay > 1.0)) throw ContractError("TrainConfig: decay must be > 1");
}

}  // namespace codemix

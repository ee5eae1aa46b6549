#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace codemix {

inline constexpr std::size_t kNumGroups = 3;

// Slanted triangular learning rate: linear warm-up from lr_max/ratio to
// lr_max over the first floor(T * cut_frac) steps (at least one, at most T-1),
// then linear decay back to lr_max/ratio at step T.
struct STLRParams {
  double lr_max = 1e-2;
  double ratio = 32.0;
  double cut_frac = 0.1;
  std::size_t total_steps = 0;  // T

  void validate() const;
  std::size_t cut() const;
};

double stlr_lr(std::size_t t, const STLRParams& p);

// Per-group rates, last group = base_lr, each earlier one divided by decay.
std::vector<double> discriminative_lrs(double base_lr, std::size_t groups,
                                       double decay);

// Which parameter groups train in each epoch (0-based epoch index).
class UnfreezeSchedule {
 public:
  using GroupSet = std::array<bool, kNumGroups>;

  explicit UnfreezeSchedule(std::vector<GroupSet> epochs);

  // Last group first, then one more group per epoch. The final epoch always
  // trains every group.
  static UnfreezeSchedule gradual(std::size_t epochs);
  static UnfreezeSchedule all_trainable(std::size_t epochs);

  std::size_t epochs() const { return epochs_.size(); }
  const GroupSet& trainable(std::size_t epoch) const;

 private:
  std::vector<GroupSet> epochs_;
};

// Training constants. `transformer_table()` carries the fine-tuning setup of
// the transformer + BiLSTM classifier; `ulmfit()` the language-model
// classifier setup, whose end learning rate is the peak of the schedule.
struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 5;
  double learning_rate = 1e-2;
  double lr_range_start = 1e-8;
  double lr_range_end = 1e-2;
  std::size_t max_len = 128;
  double dropout = 0.5;
  double decay = 2.6;          // discriminative fine-tuning factor
  double weight_decay = 0.0;   // decoupled (AdamW) when > 0
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 64;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static TrainConfig transformer_table();
  static TrainConfig ulmfit();

  void validate() const;
};

}  // namespace codemix

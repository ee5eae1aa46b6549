#include <doctest.h>

#include <cmath>

#include "codemix/error.hpp"
#include "codemix/model.hpp"
#include "gradcheck.hpp"

using namespace codemix;
using codemix::testing::separable_corpus;

namespace {

TrainConfig small_config(std::size_t epochs = 3) {
  TrainConfig c = TrainConfig::ulmfit();
  c.epochs = epochs;
  c.batch_size = 16;
  c.embed_dim = 8;
  c.hidden_dim = 16;
  return c;
}

FeatureSpace small_space() {
  FeatureSpace s;
  s.dim = 1u << 12;
  return s;
}

}  // namespace

TEST_SUITE("mlp") {

TEST_CASE("zero network gives uniform loss") {
  MLPModel m = init_mlp(small_space(), 4, 4, 0.0, 1);
  for (auto& g : m.groups) {
    std::fill(g.weights.begin(), g.weights.end(), 0.0);
    std::fill(g.bias.begin(), g.bias.end(), 0.0);
  }
  const std::vector<SparseVec> xs = {featurize("semma", m.space), featurize("", m.space)};
  const std::vector<Label> ys = {Label::Positive, Label::NotLanguage};
  CHECK(mlp_loss_and_gradients(m, xs, ys, nullptr, nullptr) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-14));
  CHECK(cross_entropy(ClassScores{}, Label::Negative) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-14));
  CHECK(cross_entropy({50, 0, 0, 0, 0}, Label::Positive) >= 0.0);
  CHECK(std::isfinite(cross_entropy({800, -800, 0, 0, 0}, Label::Negative)));
}

TEST_CASE("analytic gradients match finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = codemix::testing::gradient_check(seed);
    CHECK(r.checked > 0);
    CHECK(r.relative_error < 1e-4);
  }
}

TEST_CASE("initialization shapes") {
  const MLPModel m = init_mlp(small_space(), 8, 16, 0.5, 3);
  CHECK(m.groups[0].weights.size() == small_space().dim * 8);
  CHECK(m.groups[0].bias.size() == 8);
  CHECK(m.groups[1].weights.size() == 16 * 8);
  CHECK(m.groups[2].weights.size() == kNumLabels * 16);
  CHECK(m.groups[2].bias.size() == kNumLabels);
  CHECK(init_mlp(small_space(), 8, 16, 0.5, 3).groups == m.groups);
  CHECK(init_mlp(small_space(), 8, 16, 0.5, 4).groups != m.groups);
}

TEST_CASE("frozen groups stay bit-identical") {
  const Corpus c = separable_corpus(64, 5);
  const TrainConfig cfg = small_config(3);
  const MLPModel init = init_mlp(small_space(), cfg.embed_dim, cfg.hidden_dim, cfg.dropout, 11);
  std::vector<MLPModel> snapshots;
  TrainHooks hooks;
  hooks.on_epoch_end = [&](const EpochLog&, const MLPModel& m) { snapshots.push_back(m); };
  train_mlp(c, small_space(), cfg, STLRParams{}, UnfreezeSchedule::gradual(3), 11, hooks);
  REQUIRE(snapshots.size() == 3);
  CHECK(snapshots[0].groups[0] == init.groups[0]);
  CHECK(snapshots[0].groups[1] == init.groups[1]);
  CHECK(snapshots[0].groups[2] != init.groups[2]);
  CHECK(snapshots[1].groups[0] == init.groups[0]);
  CHECK(snapshots[1].groups[1] != init.groups[1]);
  CHECK(snapshots[2].groups[0] != init.groups[0]);
}

TEST_CASE("same seed, same weights") {
  const Corpus c = separable_corpus(50, 6);
  const auto cfg = small_config(2);
  const auto a = train_mlp(c, small_space(), cfg, {}, UnfreezeSchedule::gradual(2), 99);
  const auto b = train_mlp(c, small_space(), cfg, {}, UnfreezeSchedule::gradual(2), 99);
  const auto d = train_mlp(c, small_space(), cfg, {}, UnfreezeSchedule::gradual(2), 100);
  CHECK(a.groups == b.groups);
  CHECK(a.groups != d.groups);
}

TEST_CASE("separable data is learned") {
  const Corpus c = separable_corpus(200, 7);
  TrainConfig cfg = TrainConfig::ulmfit();
  double last_acc = 0.0;
  TrainHooks hooks;
  hooks.on_epoch_end = [&](const EpochLog& log, const MLPModel&) { last_acc = log.train_accuracy; };
  const Model m = train_mlp(c, FeatureSpace{}, cfg, {}, UnfreezeSchedule::gradual(cfg.epochs), 42, hooks);
  CHECK(last_acc >= 0.95);
  std::size_t correct = 0;
  for (const auto& s : c.samples) correct += predict(m, s.text).label == s.label;
  CHECK(static_cast<double>(correct) / c.size() == doctest::Approx(last_acc));
}

TEST_CASE("contract errors") {
  const Corpus c = separable_corpus(40, 8);
  const auto cfg = small_config(2);
  STLRParams wrong;
  wrong.total_steps = 5;  // real count is 2 * ceil(40 / 16) = 6
  CHECK_THROWS_AS(train_mlp(c, small_space(), cfg, wrong, UnfreezeSchedule::gradual(2), 1),
                  ContractError);
  STLRParams right;
  right.total_steps = 6;
  CHECK_NOTHROW(train_mlp(c, small_space(), cfg, right, UnfreezeSchedule::gradual(2), 1));
  CHECK_THROWS_AS(train_mlp(c, small_space(), cfg, {}, UnfreezeSchedule::gradual(1), 1),
                  ContractError);
  CHECK_THROWS_AS(train_mlp(Corpus{}, small_space(), cfg, {}, UnfreezeSchedule::gradual(2), 1),
                  ContractError);
}

TEST_CASE("divergence is reported") {
  const Corpus c = separable_corpus(40, 9);
  TrainConfig cfg = small_config(3);
  STLRParams huge;
  huge.lr_max = 1e300;
  CHECK_THROWS_AS(train_mlp(c, small_space(), cfg, huge, UnfreezeSchedule::all_trainable(3), 1),
                  TrainingError);
}

}  // TEST_SUITE

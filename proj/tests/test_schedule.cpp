#include <doctest.h>

#include "codemix/error.hpp"
#include "codemix/schedule.hpp"

using namespace codemix;

TEST_SUITE("schedule") {

TEST_CASE("STLR endpoints") {
  STLRParams p;
  p.lr_max = 0.01;
  p.ratio = 32;
  p.cut_frac = 0.1;
  p.total_steps = 100;
  CHECK(p.cut() == 10);
  CHECK(stlr_lr(p.cut(), p) == 0.01);
  CHECK(stlr_lr(0, p) == doctest::Approx(0.01 / 32).epsilon(1e-15));
  CHECK(stlr_lr(100, p) == doctest::Approx(0.01 / 32).epsilon(1e-15));
  CHECK_THROWS_AS(stlr_lr(101, p), ContractError);
}

TEST_CASE("STLR is up then down") {
  STLRParams p;
  p.total_steps = 57;
  p.cut_frac = 0.3;
  for (std::size_t t = 1; t <= p.total_steps; ++t) {
    if (t <= p.cut()) {
      CHECK(stlr_lr(t, p) > stlr_lr(t - 1, p));
    } else {
      CHECK(stlr_lr(t, p) < stlr_lr(t - 1, p));
    }
  }
}

TEST_CASE("STLR validation") {
  STLRParams p;
  p.total_steps = 1;
  CHECK_THROWS_AS(p.validate(), ContractError);
  p.total_steps = 10;
  p.ratio = 1.0;
  CHECK_THROWS_AS(p.validate(), ContractError);
  p.ratio = 32;
  p.cut_frac = 1.0;
  CHECK_THROWS_AS(p.validate(), ContractError);
  p.cut_frac = 0.1;
  p.lr_max = 0;
  CHECK_THROWS_AS(p.validate(), ContractError);
}

TEST_CASE("discriminative rates") {
  CHECK(discriminative_lrs(1e-2, 1, 2.6) == std::vector<double>{1e-2});
  const auto lrs = discriminative_lrs(2.6e-3, 3, 2.6);
  REQUIRE(lrs.size() == 3);
  CHECK(lrs[0] == doctest::Approx(3.846e-4).epsilon(1e-3));
  CHECK(lrs[1] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(lrs[2] == 2.6e-3);
  CHECK(lrs[0] < lrs[1]);
}

TEST_CASE("unfreeze schedules") {
  const auto g = UnfreezeSchedule::gradual(5);
  REQUIRE(g.epochs() == 5);
  CHECK(g.trainable(0) == UnfreezeSchedule::GroupSet{false, false, true});
  CHECK(g.trainable(1) == UnfreezeSchedule::GroupSet{false, true, true});
  for (std::size_t e = 2; e < 5; ++e) {
    CHECK(g.trainable(e) == UnfreezeSchedule::GroupSet{true, true, true});
  }
  const auto one = UnfreezeSchedule::gradual(1);
  CHECK(one.trainable(0) == UnfreezeSchedule::GroupSet{true, true, true});
  CHECK_THROWS_AS(g.trainable(5), ContractError);

  using S = UnfreezeSchedule::GroupSet;
  CHECK_THROWS_AS(UnfreezeSchedule({S{false, true, true}, S{false, false, true}, S{true, true, true}}),
                  ContractError);
  CHECK_THROWS_AS(UnfreezeSchedule({S{false, false, true}}), ContractError);
  CHECK_THROWS_AS(UnfreezeSchedule(std::vector<S>{}), ContractError);
}

TEST_CASE("training presets") {
  const auto t = TrainConfig::transformer_table();
  CHECK(t.batch_size == 32);
  CHECK(t.epochs == 5);
  CHECK(t.learning_rate == 2e-5);
  CHECK(t.max_len == 128);
  CHECK(t.dropout == 0.4);

  const auto u = TrainConfig::ulmfit();
  CHECK(u.lr_range_start == 1e-8);
  CHECK(u.lr_range_end == 1e-2);
  CHECK(u.learning_rate == u.lr_range_end);
  CHECK(u.dropout == 0.5);
  CHECK(u.decay == 2.6);

  TrainConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = {};
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = {};
  bad.dropout = 1.0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
}

}  // TEST_SUITE

TEST_SUITE("schedule") {

TEST_CASE("short schedules keep a warm-up") {
  STLRParams p;
  p.total_steps = 5;
  p.cut_frac = 0.1;  // floor(0.5) would leave no warm-up
  CHECK(p.cut() == 1);
  CHECK(stlr_lr(0, p) == doctest::Approx(p.lr_max / p.ratio));
  CHECK(stlr_lr(1, p) == p.lr_max);
  CHECK(stlr_lr(5, p) == doctest::Approx(p.lr_max / p.ratio));
}

}  // TEST_SUITE

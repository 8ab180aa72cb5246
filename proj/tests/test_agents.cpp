#include <gtest/gtest.h>

#include <cmath>

#include "aoi/agents.hpp"
#include "aoi/errors.hpp"
#include "aoi/exact_solver.hpp"

using namespace aoi;

TEST(EpsilonSchedule, Values) {
  const EpsilonSchedule s{0.0, 0.99, 200.0};
  EXPECT_DOUBLE_EQ(epsilon_at(s, 0), 0.99);
  EXPECT_NEAR(epsilon_at(s, 200), 0.36420, 1e-5);
  EXPECT_NEAR(epsilon_at(s, 200), 0.99 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(epsilon_at(s, 1'000'000), 0.0, 1e-300);
  const EpsilonSchedule floor{0.1, 0.5, 10.0};
  EXPECT_NEAR(epsilon_at(floor, 100000), 0.1, 1e-15);
  double prev = 1.0;
  for (long t = 0; t < 2000; t += 7) {
    const double e = epsilon_at(s, t);
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(EpsilonSchedule, Validation) {
  EXPECT_THROW((EpsilonSchedule{0.5, 0.4, 10}.validate()), ConfigError);
  EXPECT_THROW((EpsilonSchedule{0.0, 1.5, 10}.validate()), ConfigError);
  EXPECT_THROW((EpsilonSchedule{0.0, 0.5, 0}.validate()), ConfigError);
  EXPECT_NO_THROW((EpsilonSchedule{1.0, 1.0, 1}.validate()));
}

TEST(FixedPeriod, UpdatesEveryDthSlot) {
  Rng rng(1);
  const SystemState s;
  auto one = fixed_period_policy(1);
  for (int t = 0; t < 10; ++t) EXPECT_EQ(one->act(s, rng), 1);
  auto three = fixed_period_policy(3);
  for (int t = 0; t < 12; ++t) EXPECT_EQ(three->act(s, rng), t % 3 == 0 ? 1 : 0);
  auto rr = fixed_period_policy(2, 3);
  const std::vector<Action> want{1, 0, 2, 0, 3, 0, 1, 0};
  for (Action w : want) EXPECT_EQ(rr->act(s, rng), w);
  EXPECT_THROW(fixed_period_policy(0), ConfigError);
}

TEST(RandomPolicy, UniformOverActions) {
  Rng rng(4);
  auto p = random_policy(2);
  std::vector<int> counts(3, 0);
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[p->act(SystemState{}, rng)];
  const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (int c : counts) EXPECT_NEAR(c, n / 3.0, 3.5 * sigma);
}

TEST(EpsilonGreedy, RandomFractionAtHalf) {
  Rng rng(17);
  EpsilonGreedyPolicy p(idle_policy(), EpsilonSchedule{0.5, 0.5, 1.0}, 1);
  const int n = 100000;
  for (int i = 0; i < n; ++i) p.act(SystemState{}, rng);
  EXPECT_EQ(p.steps(), n);
  const double frac = static_cast<double>(p.random_actions()) / n;
  EXPECT_NEAR(frac, 0.5, 0.01);
}

TEST(EpsilonGreedy, ZeroEpsilonDefersToInner) {
  Rng rng(3);
  auto p = epsilon_greedy(fixed_period_policy(1), EpsilonSchedule{0.0, 0.0, 1.0}, 1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(p->act(SystemState{}, rng), 1);
}

TEST(TablePolicy, LooksUpEncodedState) {
  ModelConfig c;
  c.window = 1;
  c.aoi_cap = 4;
  c.update_weight = 1.0;
  const auto t = rvia(c);
  auto p = table_policy(c, t.actions);
  EXPECT_EQ(tabulate(*p, c), t.actions);
  EXPECT_THROW(table_policy(c, std::vector<Action>(3, 0)), ConfigError);
}

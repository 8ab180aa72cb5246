#include <gtest/gtest.h>

#include "aoi/config_file.hpp"
#include "aoi/dqn.hpp"
#include "aoi/errors.hpp"

using namespace aoi;

TEST(KeyValueFile, ParsesCommentsAndWhitespace) {
  const auto f = KeyValueFile::parse("# header\nF = 2\n  delta=3   # trailing\n\nusers = 1, 3\nrates=0.2,0.4\neta = 1.5\n");
  const auto c = model_config_from(f);
  EXPECT_EQ(c.num_contents, 2);
  EXPECT_EQ(c.window, 3);
  EXPECT_EQ(c.users, (std::vector<int>{1, 3}));
  EXPECT_EQ(c.arrival_rates, (std::vector<double>{0.2, 0.4}));
  EXPECT_EQ(c.update_weight, 1.5);
  EXPECT_EQ(c.aoi_cap, 50);
}

TEST(KeyValueFile, BroadcastsSingleListValue) {
  const auto c = model_config_from(KeyValueFile::parse("F=3\nusers=2\nrates=0.5"));
  EXPECT_EQ(c.users, (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(c.arrival_rates, (std::vector<double>{0.5, 0.5, 0.5}));
}

TEST(KeyValueFile, Rejections) {
  EXPECT_THROW(KeyValueFile::parse("bogus = 1"), ConfigError);
  EXPECT_THROW(KeyValueFile::parse("F 2"), ConfigError);
  EXPECT_THROW(model_config_from(KeyValueFile::parse("delta = four")), ConfigError);
  EXPECT_THROW(model_config_from(KeyValueFile::parse("delta = 4x")), ConfigError);
  EXPECT_THROW(model_config_from(KeyValueFile::parse("F=3\nusers=1,2")), ConfigError);
  EXPECT_THROW(model_config_from(KeyValueFile::parse("rates=1.0")), ConfigError);
  EXPECT_THROW(KeyValueFile::load("/nonexistent/x.cfg"), ConfigError);
}

TEST(KeyValueFile, LaterValuesOverride) {
  auto f = KeyValueFile::parse("eta=1\neta=3");
  EXPECT_EQ(f.get_double("eta", 0), 3.0);
  f.set("eta", "0.25");
  EXPECT_EQ(model_config_from(f).update_weight, 0.25);
  EXPECT_EQ(f.entries().size(), 1u);
}

TEST(KeyValueFile, TrainerKeys) {
  const auto t = trainer_config_from(KeyValueFile::parse(
      "episodes=5\nepisode_steps=100\ntarget_update=50\nbatch_size=10\nlearning_rate=0.1\n"
      "epsilon_min=0.1\nepsilon_max=0.9\nepsilon_decay=20\nreplay_capacity=500\nmax_grad_norm=2.5\nseed=9"));
  EXPECT_EQ(t.episodes, 5);
  EXPECT_EQ(t.episode_steps, 100);
  EXPECT_EQ(t.target_update, 50);
  EXPECT_EQ(t.batch_size, 10);
  EXPECT_EQ(t.learning_rate, 0.1);
  EXPECT_EQ(t.epsilon.min, 0.1);
  EXPECT_EQ(t.epsilon.max, 0.9);
  EXPECT_EQ(t.epsilon.decay, 20.0);
  EXPECT_EQ(t.replay_capacity, 500u);
  EXPECT_EQ(t.max_grad_norm, 2.5);
  EXPECT_EQ(t.seed, 9u);
  EXPECT_THROW(trainer_config_from(KeyValueFile::parse("batch_size=0")), ConfigError);
  EXPECT_THROW(trainer_config_from(KeyValueFile::parse("replay_capacity=10\nbatch_size=20")), ConfigError);
}

TEST(CanonicalText, StableAndHashed) {
  ModelConfig c;
  c.update_weight = 2.0;
  EXPECT_EQ(canonical_text(c), "F=1 delta=4 aoi_cap=50 users=2 rates=0.5 eta=2");
  EXPECT_EQ(config_hash(c).size(), 16u);
  EXPECT_EQ(config_hash(c), fnv1a_hex(canonical_text(c)));
  // FNV-1a 64 test vectors
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  c.update_weight = 2.5;
  EXPECT_NE(config_hash(c), fnv1a_hex("F=1 delta=4 aoi_cap=50 users=2 rates=0.5 eta=2"));
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.0, 1e-300, 12345.678}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

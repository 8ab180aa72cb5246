#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aoi/errors.hpp"
#include "aoi/policy_io.hpp"

using namespace aoi;

namespace {

ModelConfig small() {
  ModelConfig c;
  c.window = 2;
  c.aoi_cap = 6;
  c.update_weight = 1.25;
  return c;
}

}  // namespace

TEST(PolicyIo, BinaryRoundTrip) {
  const PolicyTable t = rvia(small());
  std::stringstream buf;
  save_policy(t, buf);
  const PolicyTable back = load_policy(buf);
  EXPECT_TRUE(back == t);
}

TEST(PolicyIo, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "aoi_policy_io_test.bin";
  ModelConfig c;
  c.num_contents = 2;
  c.window = 1;
  c.aoi_cap = 3;
  c.users = {1, 2};
  c.arrival_rates = {0.3, 0.6};
  c.update_weight = 0.5;
  const PolicyTable t = rvia(c);
  save_policy(t, path);
  EXPECT_TRUE(load_policy(path) == t);
  std::filesystem::remove(path);
}

TEST(PolicyIo, RejectsCorruptInput) {
  std::stringstream bad("NOTAPOLICY");
  EXPECT_THROW(load_policy(bad), ConfigError);

  const PolicyTable t = rvia(small());
  std::stringstream buf;
  save_policy(t, buf);
  const std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_policy(truncated), ConfigError);

  std::string wrong_version = bytes;
  wrong_version[8] = 9;
  std::stringstream v(wrong_version);
  EXPECT_THROW(load_policy(v), ConfigError);
  EXPECT_THROW(load_policy(std::filesystem::path("/nonexistent/p.bin")), ConfigError);
}

TEST(PolicyIo, CsvHeaderAndRows) {
  const PolicyTable t = rvia(small());
  std::stringstream out;
  write_policy_csv(t, out);
  std::string line;
  std::getline(out, line);
  EXPECT_EQ(line, "# config: F=1 delta=2 aoi_cap=6 users=2 rates=0.5 eta=1.25");
  std::getline(out, line);
  EXPECT_EQ(line.rfind("# config_hash=", 0), 0u);
  std::getline(out, line);
  EXPECT_EQ(line, "state_index,action,h_value");
  std::size_t rows = 0;
  while (std::getline(out, line)) {
    std::stringstream ls(line);
    std::string idx, act;
    std::getline(ls, idx, ',');
    std::getline(ls, act, ',');
    ASSERT_EQ(std::stoul(idx), rows);
    ASSERT_EQ(std::stoi(act), t.actions[rows]);
    ++rows;
  }
  EXPECT_EQ(rows, t.actions.size());
}

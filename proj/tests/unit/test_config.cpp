#include <gtest/gtest.h>

#include <sstream>

#include "pinarray/config.hpp"

using namespace pinarray;

namespace
{

SimulationConfig parse(const std::string& text)
{
  std::istringstream is(text);
  return parse_config(is, "test.cfg");
}

std::string error_of(const std::string& text)
{
  try
  {
    parse(text);
  }
  catch (const ConfigError& e)
  {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, EmptyFileKeepsDefaults)
{
  const auto cfg = parse("# nothing here\n\n   \n");
  EXPECT_EQ(dump_config(cfg), dump_config(SimulationConfig{}));
}

TEST(Config, DumpParsesBackIdentically)
{
  SimulationConfig cfg;
  cfg.gripper.second_moment_I_m4 = 1.0 / 3.0 * 1e-12;
  cfg.asperity.beta_spread_deg = 0.1 + 0.2;
  cfg.phi_list_deg = {-45.5, 12.25};
  cfg.scan.include_clamped = false;
  cfg.grid.truth = TruthSampling::column_mean;
  cfg.scan.press.seat_depth_mm = 3.0;
  cfg.recognition.press = cfg.scan.press;
  const std::string text = dump_config(cfg);
  const auto back = parse(text);
  EXPECT_EQ(dump_config(back), text);
  EXPECT_EQ(back.gripper.second_moment_I_m4, cfg.gripper.second_moment_I_m4);
  EXPECT_EQ(back.asperity.beta_spread_deg, cfg.asperity.beta_spread_deg);
  EXPECT_EQ(back.phi_list_deg, cfg.phi_list_deg);
  EXPECT_FALSE(back.scan.include_clamped);
  EXPECT_EQ(back.grid.truth, TruthSampling::column_mean);
  EXPECT_EQ(back.recognition.press.seat_depth_mm, 3.0);
}

TEST(Config, EveryKeyAppearsInTheDump)
{
  const std::string text = dump_config(SimulationConfig{});
  for (const auto& key : config_keys())
  {
    EXPECT_NE(text.find("\n" + key + " = "), std::string::npos) << key;
  }
}

TEST(Config, ValuesOverrideDefaults)
{
  const auto cfg = parse("gripper.blocks = 2  # fewer blocks\nasperity.mu_global=0.4\npull.phi_list_deg = 60, -60\n");
  EXPECT_EQ(cfg.gripper.blocks, 2);
  EXPECT_DOUBLE_EQ(cfg.asperity.mu_global, 0.4);
  EXPECT_EQ(cfg.phi_list_deg, (std::vector<double>{60.0, -60.0}));
}

TEST(Config, ErrorsNameTheLine)
{
  EXPECT_NE(error_of("\n\nnot.a.key = 3\n").find("test.cfg:3: unknown key 'not.a.key'"), std::string::npos);
  EXPECT_NE(error_of("gripper.blocks = 3\ngripper.blocks = 4\n").find("test.cfg:2: duplicate key"),
            std::string::npos);
  EXPECT_NE(error_of("gripper.x_pitch_mm = fourteen\n").find("test.cfg:1:"), std::string::npos);
  EXPECT_NE(error_of("gripper.blocks = 2.5\n").find("test.cfg:1:"), std::string::npos);
  EXPECT_NE(error_of("just some words\n").find("expected key = value"), std::string::npos);
  EXPECT_NE(error_of("scan.include_clamped = maybe\n"), "");
  EXPECT_NE(error_of("grid.truth = median\n"), "");
  EXPECT_NE(error_of("gripper.x_pitch_mm = nan\n"), "");
}

TEST(Config, RejectsInvalidCombinations)
{
  EXPECT_NE(error_of("gripper.x_pitch_mm = -1\n"), "");
  EXPECT_NE(error_of("press.in_range_fraction = 1.5\n"), "");
  EXPECT_NE(error_of("pull.resolution_mm = 0\n"), "");
  EXPECT_NE(error_of("pull.phi_list_deg = 120\n"), "");
}

TEST(Config, MissingFileIsAConfigError)
{
  EXPECT_THROW(load_config("/nonexistent/dir/none.cfg"), ConfigError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "pinarray/terrain.hpp"

using namespace pinarray;

TEST(Heightfield, RejectsBadConstruction)
{
  EXPECT_THROW(Heightfield({0, 0}, 0.0, 2, 2, std::vector<double>(4, 0.0)), std::invalid_argument);
  EXPECT_THROW(Heightfield({0, 0}, 1.0, 1, 2, std::vector<double>(2, 0.0)), std::invalid_argument);
  EXPECT_THROW(Heightfield({0, 0}, 1.0, 2, 2, std::vector<double>(3, 0.0)), std::invalid_argument);
  EXPECT_THROW(Heightfield({0, 0}, 1.0, 2, 2, {0.0, 1.0, NAN, 0.0}), std::invalid_argument);
}

TEST(Heightfield, SampleIsExactAtNodes)
{
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  auto hf = Heightfield::from_function({-3.0, 2.0}, 0.7, 9, 6, [&](double, double) { return u(rng); });
  for (std::size_t r = 0; r < hf.rows(); ++r)
  {
    for (std::size_t c = 0; c < hf.cols(); ++c)
    {
      const double x = hf.origin().x + static_cast<double>(c) * hf.cell_size();
      const double y = hf.origin().y + static_cast<double>(r) * hf.cell_size();
      EXPECT_EQ(hf.sample(x, y), hf.node(c, r));
    }
  }
}

TEST(Heightfield, SampleIsContinuousAcrossCells)
{
  Rng rng = make_rng(11);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  auto hf = Heightfield::from_function({0.0, 0.0}, 1.0, 12, 5, [&](double, double) { return u(rng); });
  const double range = hf.max_elevation() - hf.min_elevation();
  const double y = 2.37;
  const double h = 1e-10;
  for (double x = 1.0; x < 11.0; x += 1.0)
  {
    const double jump = std::abs(hf.sample(x - h, y) - hf.sample(x + h, y));
    EXPECT_LT(jump, 1e-9 * range) << "at x = " << x;
  }
}

TEST(Heightfield, OutsideFootprintIsReported)
{
  auto hf = make_wedge({}, 1.0);
  EXPECT_THROW(hf.sample(-0.5, 10.0), SimulationError);
  EXPECT_THROW(hf.sample(10.0, 70.5), SimulationError);
  EXPECT_FALSE(hf.try_sample(201.0, 0.0).has_value());
  EXPECT_TRUE(hf.try_sample(200.0, 70.0).has_value());
}

TEST(Heightfield, TextRoundTripIsBitExact)
{
  Rng rng = make_rng(3);
  std::normal_distribution<double> n(0.0, 12.3);
  auto hf = Heightfield::from_function({1.25, -4.5}, 0.3, 7, 4, [&](double, double) { return n(rng); });
  std::stringstream ss;
  write_heightfield(ss, hf);
  auto back = read_heightfield(ss);
  ASSERT_EQ(back.cols(), hf.cols());
  ASSERT_EQ(back.rows(), hf.rows());
  EXPECT_EQ(back.cell_size(), hf.cell_size());
  EXPECT_EQ(back.origin().x, hf.origin().x);
  EXPECT_EQ(back.origin().y, hf.origin().y);
  EXPECT_EQ(back.values(), hf.values());

  std::stringstream again;
  write_heightfield(again, back);
  std::stringstream first;
  write_heightfield(first, hf);
  EXPECT_EQ(again.str(), first.str());
}

TEST(Heightfield, ReadRejectsMalformedText)
{
  std::stringstream truncated("3 2 1 0 0\n1 2 3\n4 5\n");
  EXPECT_THROW(read_heightfield(truncated), std::invalid_argument);
  std::stringstream garbage("2 2 1 0 0\n1 x 3 4\n");
  EXPECT_THROW(read_heightfield(garbage), std::invalid_argument);
  std::stringstream trailing("2 2 1 0 0\n1 2 3 4 5\n");
  EXPECT_THROW(read_heightfield(trailing), std::invalid_argument);
}

TEST(Wedge, FlatWhenInclinationIsZero)
{
  WedgeSpec spec;
  spec.inclination_phi_deg = 0.0;
  auto hf = make_wedge(spec);
  EXPECT_EQ(hf.min_elevation(), 0.0);
  EXPECT_EQ(hf.max_elevation(), 0.0);
}

TEST(Wedge, VerticalSidedBlockMatchesOracle)
{
  WedgeSpec spec;
  spec.inclination_phi_deg = 90.0;
  auto hf = make_wedge(spec);
  EXPECT_DOUBLE_EQ(hf.max_elevation() - hf.min_elevation(), 20.0);
  for (double x = 0.0; x <= 200.0; x += 0.25)
  {
    EXPECT_DOUBLE_EQ(hf.ground_truth(x, 35.0), oracle::wedge(x, 90.0, 20.0, 16.0, 100.0)) << x;
  }
  // Vertical walls: full height on the crest, nothing one node past it.
  EXPECT_DOUBLE_EQ(hf.sample(108.0, 35.0), 20.0);
  EXPECT_DOUBLE_EQ(hf.sample(109.0, 35.0), 0.0);
}

TEST(Wedge, ConcaveNotchMidFaceIsHalfDepth)
{
  WedgeSpec spec;
  spec.inclination_phi_deg = -60.0;
  auto hf = make_wedge(spec);
  const double extent = 20.0 / std::tan(60.0 * oracle::kPi / 180.0);
  const double mid_face = 100.0 + 8.0 + 0.5 * extent;
  EXPECT_NEAR(oracle::wedge(mid_face, -60.0, 20.0, 16.0, 100.0), 10.0, 1e-12);
  EXPECT_NEAR(hf.ground_truth(mid_face, 10.0), 10.0, 1e-12);
  EXPECT_NEAR(hf.ground_truth(200.0 - mid_face, 10.0), 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(hf.max_elevation() - hf.min_elevation(), 20.0);
  for (double x = 0.0; x <= 200.0; x += 0.5)
  {
    EXPECT_NEAR(hf.ground_truth(x, 0.0), oracle::wedge(x, -60.0, 20.0, 16.0, 100.0), 1e-12) << x;
  }
}

TEST(Wedge, ConvexAndConcaveMirrorThroughMidPlane)
{
  for (double phi : {10.0, 30.0, 45.0, 60.0, 75.0, 90.0})
  {
    WedgeSpec a;
    a.inclination_phi_deg = phi;
    WedgeSpec b = a;
    b.inclination_phi_deg = -phi;
    auto convex = make_wedge(a);
    auto concave = make_wedge(b);
    for (std::size_t i = 0; i < convex.values().size(); ++i)
    {
      EXPECT_NEAR(convex.values()[i] + concave.values()[i], 20.0, 1e-12);
    }
  }
}

TEST(Wedge, SignSelectsShapeClass)
{
  WedgeSpec s;
  s.inclination_phi_deg = -30.0;
  EXPECT_TRUE(s.is_concave());
  EXPECT_FALSE(s.is_convex());
  s.inclination_phi_deg = 30.0;
  EXPECT_TRUE(s.is_convex());
}

TEST(Wedge, InvalidSpecsAreRejected)
{
  WedgeSpec s;
  s.inclination_phi_deg = 91.0;
  EXPECT_THROW(make_wedge(s), std::invalid_argument);
  s.inclination_phi_deg = -90.5;
  EXPECT_THROW(make_wedge(s), std::invalid_argument);
  s = WedgeSpec{};
  s.apex_height_mm = 0.0;
  EXPECT_THROW(make_wedge(s), std::invalid_argument);
  s = WedgeSpec{};
  s.depth_mm = -1.0;
  EXPECT_THROW(make_wedge(s), std::invalid_argument);
  EXPECT_THROW(make_wedge(WedgeSpec{}, 0.0), std::invalid_argument);
}

TEST(RecognitionBlock, ConvexIsTwentyMillimetreStepFlatInDepth)
{
  auto hf = make_recognition_block(BlockKind::convex);
  EXPECT_DOUBLE_EQ(hf.max_elevation() - hf.min_elevation(), 20.0);
  EXPECT_DOUBLE_EQ(hf.sample(100.0, 30.0), 20.0);
  EXPECT_DOUBLE_EQ(hf.sample(20.0, 30.0), 0.0);
  for (double x = 0.0; x <= 200.0; x += 0.5)
  {
    for (double y = 0.0; y <= 70.0; y += 3.5)
    {
      EXPECT_EQ(hf.sample(x, y), hf.sample(x, 0.0));
    }
  }
}

TEST(RecognitionBlock, ConcaveIsInvertedProfile)
{
  auto convex = make_recognition_block(BlockKind::convex);
  auto concave = make_recognition_block(BlockKind::concave);
  EXPECT_DOUBLE_EQ(concave.max_elevation() - concave.min_elevation(), 20.0);
  for (std::size_t i = 0; i < convex.values().size(); ++i)
  {
    EXPECT_DOUBLE_EQ(convex.values()[i] + concave.values()[i], 20.0);
  }
}

TEST(MappingTerrain, FootprintAndFeatures)
{
  auto hf = make_mapping_terrain();
  EXPECT_DOUBLE_EQ(hf.width(), 200.0);
  EXPECT_DOUBLE_EQ(hf.depth(), 40.0);
  EXPECT_DOUBLE_EQ(hf.max_elevation(), 45.0);
  EXPECT_DOUBLE_EQ(hf.min_elevation(), 5.0);
  // Sloped band: 20 mm displacement across the depth at any fixed x.
  for (double x : {165.0, 180.0, 200.0})
  {
    double lo = 1e9;
    double hi = -1e9;
    for (double y = hf.origin().y; y <= hf.y_max(); y += 0.5)
    {
      lo = std::min(lo, hf.sample(x, y));
      hi = std::max(hi, hf.sample(x, y));
    }
    EXPECT_NEAR(hi - lo, 20.0, 1e-12) << x;
  }
}

TEST(MappingTerrain, GroundTruthEqualsStoredNodes)
{
  auto hf = make_mapping_terrain();
  for (std::size_t r = 0; r < hf.rows(); ++r)
  {
    for (std::size_t c = 0; c < hf.cols(); ++c)
    {
      const double x = hf.origin().x + static_cast<double>(c);
      const double y = hf.origin().y + static_cast<double>(r);
      EXPECT_EQ(hf.ground_truth(x, y), hf.node(c, r));
    }
  }
}

TEST(Heightfield, TranslationMovesDescriptorToo)
{
  auto hf = make_wedge({});
  auto moved = hf.translated_x(12.5);
  for (double x = 0.0; x <= 200.0; x += 0.7)
  {
    EXPECT_NEAR(moved.ground_truth(x + 12.5, 5.0), hf.ground_truth(x, 5.0), 1e-9);
  }
}

TEST(Asperity, ZeroSpreadIsDeterministic)
{
  AsperityModel m;
  m.beta_spread_deg = 0.0;
  Rng rng = make_rng(1);
  for (int i = 0; i < 10; ++i)
  {
    EXPECT_EQ(sample_asperity(m, 60.0, rng), m.beta_mean_deg(60.0));
  }
}

TEST(Asperity, MeanIsMonotoneNonIncreasingInSteepness)
{
  AsperityModel m;
  double prev = m.beta_mean_deg(0.0);
  for (double phi = 0.0; phi <= 90.0; phi += 0.5)
  {
    EXPECT_LE(m.beta_mean_deg(phi), prev);
    EXPECT_EQ(m.beta_mean_deg(phi), m.beta_mean_deg(-phi));
    prev = m.beta_mean_deg(phi);
  }
}

TEST(Asperity, SamplesStayInsideTruncation)
{
  AsperityModel m;
  const double atan_mu = std::atan(m.mu_global) * 180.0 / oracle::kPi;
  Rng rng = make_rng(5);
  for (double phi : {-90.0, -45.0, 0.0, 30.0, 90.0})
  {
    for (int i = 0; i < 20000; ++i)
    {
      const double b = sample_asperity(m, phi, rng);
      EXPECT_GT(b, atan_mu);
      EXPECT_GT(b, m.beta_floor_deg());
      EXPECT_LE(b, 90.0);
    }
  }
}

TEST(Asperity, ZeroSpreadBelowFloorIsClamped)
{
  AsperityModel m;
  m.beta_spread_deg = 0.0;
  m.beta0_deg = 5.0;
  m.beta_slope = 0.0;
  Rng rng = make_rng(2);
  const double b = sample_asperity(m, 90.0, rng);
  EXPECT_GT(b, m.beta_floor_deg());
  EXPECT_LT(b, m.beta_floor_deg() + 1e-9);
}

TEST(Asperity, EmpiricalMeanMatchesUntruncatedMeanWhenInterior)
{
  // With the mean well inside the interval the truncation moves it by < 0.1%.
  AsperityModel m;
  m.beta_slope = 0.5;
  const double target = m.beta_mean_deg(0.0);
  ASSERT_DOUBLE_EQ(target, 60.0);
  Rng rng = make_rng(2024);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
  {
    sum += sample_asperity(m, 0.0, rng);
  }
  EXPECT_NEAR(sum / n, target, 0.01 * target);
}

TEST(Asperity, EmpiricalMeanMatchesTruncatedNormalOracle)
{
  // Default model: the mean at phi = 0 sits on the 90 deg cap, so the
  // reference is the truncated-normal mean rather than the cap itself.
  AsperityModel m;
  const double expected = oracle::truncated_normal_mean(m.beta_mean_deg(0.0), m.beta_spread_deg, m.beta_floor_deg(), 90.0);
  EXPECT_NEAR(expected, 82.02115439, 1e-6);
  Rng rng = make_rng(99);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
  {
    sum += sample_asperity(m, 0.0, rng);
  }
  EXPECT_NEAR(sum / n, expected, 0.01 * expected);
}

TEST(Asperity, SameSeedSameSequence)
{
  AsperityModel m;
  Rng a = make_rng(42, 7, 3);
  Rng b = make_rng(42, 7, 3);
  Rng c = make_rng(42, 7, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i)
  {
    const double x = sample_asperity(m, 45.0, a);
    EXPECT_EQ(x, sample_asperity(m, 45.0, b));
    differs = differs || x != sample_asperity(m, 45.0, c);
  }
  EXPECT_TRUE(differs);
}

TEST(Asperity, InvalidModelsAreRejected)
{
  AsperityModel m;
  m.mu_global = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = AsperityModel{};
  m.beta_slope = -0.1;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = AsperityModel{};
  m.breakage_force_n = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

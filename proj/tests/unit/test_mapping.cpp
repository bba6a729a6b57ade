#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "oracles.hpp"
#include "pinarray/mapping.hpp"

using namespace pinarray;

namespace
{

Heightfield flat(double z)
{
  return Heightfield::from_function({0.0, 0.0}, 1.0, 201, 71, [&](double, double) { return z; });
}

CloudPoint point(double x, double y, double z)
{
  CloudPoint p;
  p.x = x;
  p.y = y;
  p.z = z;
  return p;
}

PointCloud noiseless_scan(const Heightfield& t, std::uint64_t seed, bool include_clamped = true)
{
  Rng rng = make_rng(seed);
  auto calib = calibrate_bank(21, rng).noiseless();
  ScanPlan plan;
  plan.include_clamped = include_clamped;
  return run_scan(GripperConfig{}, calib, t, plan, rng);
}

}  // namespace

TEST(RunScan, TwelveStepsOfTwentyOnePins)
{
  auto t = make_mapping_terrain();
  Rng rng = make_rng(1);
  auto calib = calibrate_bank(21, rng);
  auto cloud = run_scan(GripperConfig{}, calib, t, ScanPlan{}, rng);
  ASSERT_EQ(cloud.points.size(), 252u);
  for (int step = 1; step <= 12; ++step)
  {
    EXPECT_DOUBLE_EQ(cloud.points[(step - 1) * 21].x_g, -20.0 + 10.0 * step);
  }
}

TEST(RunScan, FlatTerrainNoiselessIsLevel)
{
  auto cloud = noiseless_scan(flat(25.0), 2);
  for (const auto& p : cloud.points)
  {
    EXPECT_TRUE(p.in_range);
    EXPECT_NEAR(p.z, 25.0, 1e-9);
  }
}

TEST(RunScan, NoiselessInRangePointsMatchGroundTruth)
{
  auto t = make_mapping_terrain();
  auto cloud = noiseless_scan(t, 3);
  int in_range = 0;
  for (const auto& p : cloud.points)
  {
    if (p.in_range)
    {
      ++in_range;
      EXPECT_LT(std::fabs(p.z - t.ground_truth(p.x, p.y)), 0.5);
    }
  }
  EXPECT_GT(in_range, 0);
  auto filtered = noiseless_scan(t, 3, false);
  EXPECT_EQ(static_cast<int>(filtered.points.size()), in_range);
}

TEST(RunScan, PointsRecomputeFromPoseAndReading)
{
  GripperConfig cfg;
  auto t = make_mapping_terrain();
  Rng rng = make_rng(4);
  auto calib = calibrate_bank(21, rng);
  auto cloud = run_scan(cfg, calib, t, ScanPlan{}, rng);
  for (const auto& p : cloud.points)
  {
    const CloudPoint q = make_point(cfg, p.step, p.j, p.k, p.x_g, p.z_g, p.h_mm, p.in_range);
    EXPECT_EQ(q.x, p.x);
    EXPECT_EQ(q.y, p.y);
    EXPECT_EQ(q.z, p.z);
    EXPECT_EQ(p.x, p.x_g + 14.0 * p.j);
    EXPECT_EQ(p.z, p.z_g + p.h_mm);
  }
}

TEST(RunScan, SameSeedSameCloud)
{
  auto t = make_mapping_terrain();
  auto run = [&] {
    Rng rng = make_rng(5);
    auto calib = calibrate_bank(21, rng);
    return run_scan(GripperConfig{}, calib, t, ScanPlan{}, rng);
  };
  auto a = run();
  auto b = run();
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
  {
    EXPECT_EQ(a.points[i].z, b.points[i].z);
  }
}

TEST(RunScan, InteriorColumnsAreRevisitedByDifferentPins)
{
  // Translating 10 mm per step with a 14 mm pitch puts different pins
  // over the same column.
  auto cloud = noiseless_scan(make_mapping_terrain(), 6);
  std::map<long, std::set<int>> pins_per_bin;
  for (const auto& p : cloud.points)
  {
    pins_per_bin[static_cast<long>(std::floor(p.x / 10.0))].insert(p.j);
  }
  for (long ix = 3; ix <= 16; ++ix)
  {
    EXPECT_GE(pins_per_bin[ix].size(), 2u) << ix;
  }
}

TEST(RunScan, RejectsBadPlan)
{
  ScanPlan plan;
  plan.steps = 0;
  EXPECT_THROW(plan.validate(), std::invalid_argument);
  plan = ScanPlan{};
  plan.delta_x_mm = 0.0;
  EXPECT_THROW(plan.validate(), std::invalid_argument);
}

TEST(BinAverage, SingletonColumn)
{
  auto t = flat(5.0);
  PointCloud c;
  c.points.push_back(point(12.0, 20.0, 7.5));
  auto map = bin_average(c, t);
  ASSERT_EQ(map.cells.size(), 1u);
  const auto& cell = map.cells[0];
  EXPECT_EQ(cell.ix, 1);
  EXPECT_EQ(cell.iy, 0);
  EXPECT_DOUBLE_EQ(cell.col_x, 15.0);
  EXPECT_DOUBLE_EQ(cell.col_y, 22.5);
  EXPECT_EQ(cell.n_samples, 1);
  EXPECT_DOUBLE_EQ(cell.mean_z_mm, 7.5);
  EXPECT_DOUBLE_EQ(cell.abs_err_mm, 2.5);
  EXPECT_DOUBLE_EQ(map.e_bar_mm, 2.5);
  EXPECT_NE(map.find(1, 0), nullptr);
  EXPECT_EQ(map.find(0, 0), nullptr);
}

TEST(BinAverage, MatchesBruteForceColumns)
{
  auto t = flat(0.0);
  const std::vector<std::tuple<double, double, double>> pts = {
    {1.0, 16.0, 2.0}, {9.9, 29.9, 4.0}, {10.0, 16.0, 1.0}, {10.5, 31.0, -3.0}, {19.99, 44.0, 6.5}, {3.0, 30.0, 8.0}};
  PointCloud cloud;
  for (const auto& [x, y, z] : pts)
  {
    cloud.points.push_back(point(x, y, z));
  }
  auto map = bin_average(cloud, t);
  const auto expected = oracle::column_means(pts, 0.0, 15.0, 10.0, 15.0);
  ASSERT_EQ(map.cells.size(), expected.size());
  double err = 0.0;
  for (const auto& [key, mean] : expected)
  {
    const GridCell* c = map.find(key.first, key.second);
    ASSERT_NE(c, nullptr);
    EXPECT_NEAR(c->mean_z_mm, mean, 1e-12);
    err += std::fabs(mean);
  }
  EXPECT_NEAR(map.e_bar_mm, err / expected.size(), 1e-12);
}

TEST(BinAverage, EmptyCloudIsAnError)
{
  EXPECT_THROW(bin_average(PointCloud{}, flat(0.0)), std::invalid_argument);
}

TEST(BinAverage, ColumnMeanTruthOnSlopedGround)
{
  // z = x: the mean over a 1 mm lattice of a 10 mm column equals its center.
  auto t = Heightfield::from_function({0.0, 0.0}, 1.0, 201, 71, [](double x, double) { return x; });
  PointCloud c;
  c.points.push_back(point(23.0, 20.0, 25.0));
  GridSpec spec;
  spec.truth = TruthSampling::column_mean;
  auto map = bin_average(c, t, spec);
  EXPECT_NEAR(map.cells[0].truth_z_mm, 25.0, 1e-12);
}

TEST(OutlierAttenuation, SingleOutlierIsDiluted)
{
  auto t = flat(10.0);
  PointCloud c;
  for (int i = 0; i < 11; ++i)
  {
    c.points.push_back(point(40.5 + 0.5 * i, 20.0 + 0.9 * i, 10.0));
  }
  c.points.push_back(point(45.0, 25.0, 40.0));
  auto map = bin_average(c, t);
  auto rows = outlier_attenuation_report(c, map, t);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n_samples, 12);
  EXPECT_DOUBLE_EQ(rows[0].max_point_err_mm, 30.0);
  EXPECT_NEAR(rows[0].averaged_err_mm, 2.5, 1e-12);
  EXPECT_LT(rows[0].averaged_err_mm, 5.0);
  EXPECT_TRUE(rows[0].attenuated);
}

TEST(OutlierAttenuation, AveragedNeverExceedsWorstPoint)
{
  auto t = make_mapping_terrain();
  Rng rng = make_rng(7);
  auto calib = calibrate_bank(21, rng);
  auto cloud = run_scan(GripperConfig{}, calib, t, ScanPlan{}, rng);
  auto map = bin_average(cloud, t);
  auto rows = outlier_attenuation_report(cloud, map, t);
  ASSERT_EQ(rows.size(), map.cells.size());
  for (const auto& r : rows)
  {
    EXPECT_TRUE(r.attenuated);
    EXPECT_LE(r.averaged_err_mm, r.max_point_err_mm + 1e-12);
  }
}

TEST(MappingExport, PlyCsvAndEbarLine)
{
  PointCloud c;
  auto p = point(1.0, 2.0, 3.25);
  p.step = 2;
  p.j = 3;
  p.k = 1;
  c.points.push_back(p);
  std::ostringstream ply;
  write_ply(ply, c);
  EXPECT_EQ(ply.str(),
            "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\nproperty double y\nproperty double z\n"
            "end_header\n1.000000 2.000000 3.250000\n");
  std::ostringstream csv;
  write_cloud_csv(csv, c);
  EXPECT_EQ(csv.str(), "step,j,k,x_mm,y_mm,z_mm\n2,3,1,1.000000,2.000000,3.250000\n");

  auto map = bin_average(c, flat(3.0));
  std::ostringstream grid;
  write_grid_csv(grid, map);
  EXPECT_EQ(grid.str(), "col_x,col_y,mean_z_mm,n_samples,abs_err_mm\n5.000000,7.500000,3.250000,1,0.250000\n");
  EXPECT_EQ(e_bar_line(map), "e_bar_mm,0.250000");
}

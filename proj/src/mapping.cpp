#include "pinarray/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace pinarray
{

void ScanPlan::validate() const
{
  if (!(delta_x_mm > 0.0))
  {
    throw std::invalid_argument("scan delta_x must be positive");
  }
  if (steps < 1)
  {
    throw std::invalid_argument("scan needs at least one step");
  }
}

CloudPoint make_point(const GripperConfig& cfg, int step, int j, int k, double x_g, double z_g, double h_mm,
                      bool in_range)
{
  CloudPoint p;
  p.step = step;
  p.j = j;
  p.k = k;
  p.x_g = x_g;
  p.z_g = z_g;
  p.h_mm = h_mm;
  p.in_range = in_range;
  const Vec2 xy = pin_world_xy(cfg, {x_g, z_g}, j, k);
  p.x = xy.x;
  p.y = xy.y;
  p.z = z_g + h_mm;
  return p;
}

PointCloud run_scan(const GripperConfig& cfg, const SensorCalibration& calib, const Heightfield& terrain,
                    const ScanPlan& plan, Rng& rng)
{
  plan.validate();
  cfg.validate();
  calib.validate();
  PointCloud cloud;
  Pose pose = plan.start;
  for (int step = 1; step <= plan.steps; ++step)
  {
    // 1. translate
    pose.x_g = plan.start.x_g + static_cast<double>(step) * plan.delta_x_mm;
    // 2. press until the pins conform, 3. read sensors and pose
    const PressResult press = press_and_read(cfg, calib, terrain, pose.x_g, plan.start.z_g, plan.press, rng);
    for (const auto& r : press.readings)
    {
      if (!plan.include_clamped && !r.in_range)
      {
        continue;
      }
      cloud.points.push_back(
        make_point(cfg, step, r.j, r.k, press.state.pose.x_g, press.state.pose.z_g, r.measured_height_mm, r.in_range));
    }
    // 4. retract to the safe height before the next translation
    pose.z_g = plan.start.z_g;
  }
  return cloud;
}

const GridCell* GridMap::find(long ix, long iy) const
{
  for (const auto& c : cells)
  {
    if (c.ix == ix && c.iy == iy)
    {
      return &c;
    }
  }
  return nullptr;
}

namespace
{

double truth_at(const Heightfield& t, double x, double y)
{
  if (t.contains(x, y) || t.shape().index() != 0)
  {
    return t.ground_truth(x, y);
  }
  return t.sample(std::clamp(x, t.origin().x, t.x_max()), std::clamp(y, t.origin().y, t.y_max()));
}

double column_truth(const Heightfield& t, const GridSpec& spec, long ix, long iy)
{
  const double x0 = spec.origin_x_mm + static_cast<double>(ix) * spec.bin_x_mm;
  const double y0 = spec.origin_y_mm + static_cast<double>(iy) * spec.bin_y_mm;
  if (spec.truth == TruthSampling::center)
  {
    return truth_at(t, x0 + 0.5 * spec.bin_x_mm, y0 + 0.5 * spec.bin_y_mm);
  }
  double sum = 0.0;
  int n = 0;
  for (double y = y0 + 0.5; y < y0 + spec.bin_y_mm; y += 1.0)
  {
    for (double x = x0 + 0.5; x < x0 + spec.bin_x_mm; x += 1.0)
    {
      if (t.contains(x, y))
      {
        sum += t.ground_truth(x, y);
        ++n;
      }
    }
  }
  return n > 0 ? sum / n : truth_at(t, x0 + 0.5 * spec.bin_x_mm, y0 + 0.5 * spec.bin_y_mm);
}

std::pair<long, long> column_of(const GridSpec& spec, double x, double y)
{
  return {static_cast<long>(std::floor((x - spec.origin_x_mm) / spec.bin_x_mm)),
          static_cast<long>(std::floor((y - spec.origin_y_mm) / spec.bin_y_mm))};
}

}  // namespace

GridMap bin_average(const PointCloud& cloud, const Heightfield& ground_truth, const GridSpec& spec)
{
  if (cloud.points.empty())
  {
    throw std::invalid_argument("cannot bin an empty point cloud");
  }
  if (!(spec.bin_x_mm > 0.0) || !(spec.bin_y_mm > 0.0))
  {
    throw std::invalid_argument("column size must be positive");
  }
  // Keyed (iy, ix) so iteration order is row-major.
  std::map<std::pair<long, long>, std::pair<double, int>> acc;
  for (const auto& p : cloud.points)
  {
    const auto [ix, iy] = column_of(spec, p.x, p.y);
    auto& a = acc[{iy, ix}];
    a.first += p.z;
    a.second += 1;
  }
  GridMap map;
  map.spec = spec;
  double err_sum = 0.0;
  for (const auto& [key, a] : acc)
  {
    GridCell c;
    c.iy = key.first;
    c.ix = key.second;
    c.col_x = spec.origin_x_mm + (static_cast<double>(c.ix) + 0.5) * spec.bin_x_mm;
    c.col_y = spec.origin_y_mm + (static_cast<double>(c.iy) + 0.5) * spec.bin_y_mm;
    c.n_samples = a.second;
    c.mean_z_mm = a.first / a.second;
    c.truth_z_mm = column_truth(ground_truth, spec, c.ix, c.iy);
    c.abs_err_mm = std::abs(c.mean_z_mm - c.truth_z_mm);
    err_sum += c.abs_err_mm;
    map.cells.push_back(c);
  }
  map.e_bar_mm = err_sum / static_cast<double>(map.cells.size());
  return map;
}

std::vector<AttenuationRow> outlier_attenuation_report(const PointCloud& cloud, const GridMap& map,
                                                       const Heightfield& ground_truth)
{
  struct Acc
  {
    double worst{0.0};
    double residual_sum{0.0};
    int n{0};
  };
  std::map<std::pair<long, long>, Acc> acc;
  for (const auto& p : cloud.points)
  {
    const auto [ix, iy] = column_of(map.spec, p.x, p.y);
    const double e = p.z - truth_at(ground_truth, p.x, p.y);
    auto& a = acc[{iy, ix}];
    a.worst = std::max(a.worst, std::abs(e));
    a.residual_sum += e;
    a.n += 1;
  }
  std::vector<AttenuationRow> rows;
  for (const auto& c : map.cells)
  {
    AttenuationRow r;
    r.ix = c.ix;
    r.iy = c.iy;
    r.n_samples = c.n_samples;
    auto it = acc.find({c.iy, c.ix});
    if (it != acc.end())
    {
      r.max_point_err_mm = it->second.worst;
      r.averaged_err_mm = std::abs(it->second.residual_sum / it->second.n);
    }
    r.attenuated = r.averaged_err_mm <= r.max_point_err_mm + 1e-12;
    rows.push_back(r);
  }
  return rows;
}

void write_ply(std::ostream& os, const PointCloud& cloud)
{
  os << "ply\nformat ascii 1.0\n";
  os << fmt::format("element vertex {}\n", cloud.points.size());
  os << "property double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& p : cloud.points)
  {
    os << fmt::format("{:.6f} {:.6f} {:.6f}\n", p.x, p.y, p.z);
  }
}

void write_cloud_csv(std::ostream& os, const PointCloud& cloud)
{
  os << "step,j,k,x_mm,y_mm,z_mm\n";
  for (const auto& p : cloud.points)
  {
    os << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f}\n", p.step, p.j, p.k, p.x, p.y, p.z);
  }
}

void write_grid_csv(std::ostream& os, const GridMap& map)
{
  os << "col_x,col_y,mean_z_mm,n_samples,abs_err_mm\n";
  for (const auto& c : map.cells)
  {
    os << fmt::format("{:.6f},{:.6f},{:.6f},{},{:.6f}\n", c.col_x, c.col_y, c.mean_z_mm, c.n_samples,
                      c.abs_err_mm);
  }
}

std::string e_bar_line(const GridMap& map)
{
  return fmt::format("e_bar_mm,{:.6f}", map.e_bar_mm);
}

}  // namespace pinarray

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pinarray/common.hpp"
#include "pinarray/gripper.hpp"
#include "pinarray/sensing.hpp"
#include "pinarray/terrain.hpp"

namespace pinarray
{

struct ScanPlan
{
  double delta_x_mm{10.0};
  int steps{12};
  /// Pose before the first translation.
  Pose start{-20.0, 60.0};
  PressPolicy press;
  /// Keep pins whose reading saturated (clamped to the window edge).
  bool include_clamped{true};

  void validate() const;
};

struct CloudPoint
{
  int step{0};
  int j{0};
  int k{0};
  /// Pose and reading the coordinates were computed from.
  double x_g{0.0};
  double z_g{0.0};
  double h_mm{0.0};
  bool in_range{false};
  double x{0.0};
  double y{0.0};
  double z{0.0};
};

struct PointCloud
{
  std::vector<CloudPoint> points;
};

/// World coordinates x_g + j * x_pitch, k * y_pitch, z_g + h.
CloudPoint make_point(const GripperConfig& cfg, int step, int j, int k, double x_g, double z_g, double h_mm,
                      bool in_range);

/// Translate, press, read, retract; `steps` times.
PointCloud run_scan(const GripperConfig& cfg, const SensorCalibration& calib, const Heightfield& terrain,
                    const ScanPlan& plan, Rng& rng);

enum class TruthSampling
{
  /// Ground truth at the column center.
  center,
  /// Mean ground truth over a 1 mm lattice inside the column and footprint.
  column_mean
};

struct GridSpec
{
  double bin_x_mm{10.0};
  double bin_y_mm{15.0};
  /// Column lattice origin (the mapping terrain origin by default).
  double origin_x_mm{0.0};
  double origin_y_mm{15.0};
  TruthSampling truth{TruthSampling::center};
};

struct GridCell
{
  long ix{0};
  long iy{0};
  double col_x{0.0};
  double col_y{0.0};
  double mean_z_mm{0.0};
  int n_samples{0};
  double truth_z_mm{0.0};
  double abs_err_mm{0.0};
};

/// Non-empty columns only, ordered by (iy, ix). Columns that received no
/// points are absent rather than zero.
struct GridMap
{
  GridSpec spec;
  std::vector<GridCell> cells;
  double e_bar_mm{0.0};

  /// nullptr for an empty column.
  const GridCell* find(long ix, long iy) const;
};

GridMap bin_average(const PointCloud& cloud, const Heightfield& ground_truth, const GridSpec& spec = {});

struct AttenuationRow
{
  long ix{0};
  long iy{0};
  int n_samples{0};
  double max_point_err_mm{0.0};
  /// |mean point residual|: the error left after averaging the column.
  double averaged_err_mm{0.0};
  /// averaged <= max point error (always true for a mean).
  bool attenuated{true};
};

/// One row per non-empty column. Residuals are taken against the ground
/// truth at each point's (x, y), so sloped columns do not count as error.
std::vector<AttenuationRow> outlier_attenuation_report(const PointCloud& cloud, const GridMap& map,
                                                       const Heightfield& ground_truth);

/// ASCII PLY with one `x y z` vertex element.
void write_ply(std::ostream& os, const PointCloud& cloud);
/// `step,j,k,x_mm,y_mm,z_mm`
void write_cloud_csv(std::ostream& os, const PointCloud& cloud);
/// `col_x,col_y,mean_z_mm,n_samples,abs_err_mm`
void write_grid_csv(std::ostream& os, const GridMap& map);
/// `e_bar_mm,<value>` on one line; the same text the CLI prints.
std::string e_bar_line(const GridMap& map);

}  // namespace pinarray

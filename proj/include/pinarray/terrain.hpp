#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "pinarray/common.hpp"

namespace pinarray
{

struct Vec2
{
  double x{0.0};
  double y{0.0};
};

// ---------------------------------------------------------------------------
// Analytic terrain descriptors. A heightfield built from one of these keeps it
// so ground-truth queries are exact instead of interpolated.
// ---------------------------------------------------------------------------

/// Ridge (phi > 0) or notch (phi < 0) running along y, symmetric about
/// center_x. Faces are inclined |phi| from horizontal; the crest (or notch
/// floor) is flat over crest_width. phi == 0 is a flat plane at z = 0.
struct WedgeProfile
{
  double phi_deg{0.0};
  double apex_height{20.0};
  double crest_width{16.0};
  double center_x{0.0};

  double elevation(double x) const;
  /// Horizontal extent of one inclined face (0 for vertical faces).
  double face_extent() const;
};

/// Vertical-walled 20 mm step feature, flat along y.
struct StepBlockProfile
{
  bool convex{true};
  double height{20.0};
  double width{70.0};
  double center_x{0.0};

  double elevation(double x) const;
};

/// Composite terrain for the mapping run: a raised ridge, a trough and a band
/// that slopes along y, on a common base plateau.
struct MappingProfile
{
  double base{25.0};
  double feature_height{20.0};
  double ridge_begin{45.0};
  double ridge_end{85.0};
  double trough_begin{110.0};
  double trough_end{150.0};
  double slope_begin{165.0};
  double y_begin{15.0};
  double depth{40.0};

  double elevation(double x, double y) const;
};

using TerrainShape = std::variant<std::monostate, WedgeProfile, StepBlockProfile, MappingProfile>;

/// Rectangular elevation grid with bilinear sampling (all lengths in mm).
/// Node (c, r) sits at origin + (c, r) * cell_size; values are row-major with
/// rows advancing along y.
class Heightfield
{
public:
  Heightfield(Vec2 origin, double cell_size, std::size_t cols, std::size_t rows,
              std::vector<double> values, TerrainShape shape = {});

  template <typename Fn>
  static Heightfield from_function(Vec2 origin, double cell_size, std::size_t cols,
                                   std::size_t rows, Fn&& fn, TerrainShape shape = {})
  {
    std::vector<double> values;
    values.reserve(cols * rows);
    for (std::size_t r = 0; r < rows; ++r)
    {
      for (std::size_t c = 0; c < cols; ++c)
      {
        values.push_back(fn(origin.x + static_cast<double>(c) * cell_size,
                            origin.y + static_cast<double>(r) * cell_size));
      }
    }
    return Heightfield(origin, cell_size, cols, rows, std::move(values), std::move(shape));
  }

  Vec2 origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }
  double width() const { return static_cast<double>(cols_ - 1) * cell_size_; }
  double depth() const { return static_cast<double>(rows_ - 1) * cell_size_; }
  double x_max() const { return origin_.x + width(); }
  double y_max() const { return origin_.y + depth(); }
  const std::vector<double>& values() const { return values_; }
  const TerrainShape& shape() const { return shape_; }

  double node(std::size_t col, std::size_t row) const { return values_[row * cols_ + col]; }

  bool contains(double x, double y) const;

  /// Bilinear interpolation. Throws SimulationError outside the footprint.
  double sample(double x, double y) const;
  std::optional<double> try_sample(double x, double y) const;

  /// Exact elevation from the analytic descriptor when one is attached,
  /// otherwise the bilinear sample.
  double ground_truth(double x, double y) const;

  double min_elevation() const;
  double max_elevation() const;

  /// Same terrain shifted by dx along x (origin and analytic descriptor move).
  Heightfield translated_x(double dx) const;

private:
  Vec2 origin_;
  double cell_size_;
  std::size_t cols_;
  std::size_t rows_;
  std::vector<double> values_;
  TerrainShape shape_;
};

/// Plain-text grid: header `cols rows cell_size_mm origin_x_mm origin_y_mm`,
/// then one line of elevations per row. Values are written with round-trip
/// precision, so read(write(h)) reproduces every node bit-for-bit. The
/// analytic descriptor is not serialized.
void write_heightfield(std::ostream& os, const Heightfield& hf);
Heightfield read_heightfield(std::istream& is);

// ---------------------------------------------------------------------------
// Terrain generators
// ---------------------------------------------------------------------------

struct WedgeSpec
{
  /// Negative = concave notch, positive = convex ridge.
  double inclination_phi_deg{60.0};
  double apex_height_mm{20.0};
  double crest_width_mm{16.0};
  double width_mm{200.0};
  double depth_mm{70.0};
  /// Sandpaper grit of the face covering; informational only, the asperity
  /// model carries the friction parameters.
  double surface_grit{40.0};

  bool is_concave() const { return inclination_phi_deg < 0.0; }
  bool is_convex() const { return inclination_phi_deg > 0.0; }
  void validate() const;
};

Heightfield make_wedge(const WedgeSpec& spec, double resolution_mm = 1.0);

enum class BlockKind
{
  convex,
  concave
};

Heightfield make_recognition_block(BlockKind kind, double resolution_mm = 1.0);

Heightfield make_mapping_terrain(double resolution_mm = 1.0);

// ---------------------------------------------------------------------------
// Asperity model
// ---------------------------------------------------------------------------

/// Micro-asperity engagement statistics for a spine on a sandpaper-covered
/// face. The asperity is a triangular bump of angle beta; steeper terrain
/// presents smaller beta on average.
struct AsperityModel
{
  double mu_global{0.3};
  double beta0_deg{15.0};
  double beta_slope{1.0};
  double beta_spread_deg{10.0};
  /// Lower truncation sits this far above atan(mu).
  double beta_floor_margin_deg{1.0};
  double breakage_force_n{12.0};

  /// beta0 + beta_slope * (90 - |phi|), capped at 90 deg.
  double beta_mean_deg(double phi_deg) const;
  double beta_floor_deg() const;
  void validate() const;
};

/// Draw beta from a normal(beta_mean(phi), spread) truncated to
/// (beta_floor, 90]. Out-of-range draws are re-drawn; after a bounded number
/// of attempts the value is clamped into the interval.
double sample_asperity(const AsperityModel& model, double phi_deg, Rng& rng);

}  // namespace pinarray

#include "pinarray/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace pinarray
{

namespace
{

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t node_count(double length, double resolution)
{
  return static_cast<std::size_t>(std::floor(length / resolution + 1e-9)) + 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

double WedgeProfile::face_extent() const
{
  const double a = std::abs(phi_deg);
  if (a >= 90.0)
  {
    return 0.0;
  }
  return apex_height / std::tan(deg_to_rad(a));
}

double WedgeProfile::elevation(double x) const
{
  if (phi_deg == 0.0)
  {
    return 0.0;
  }
  const double d = std::abs(x - center_x);
  const double half = 0.5 * crest_width;
  const double extent = face_extent();
  double convex = 0.0;
  if (d <= half)
  {
    convex = apex_height;
  }
  else if (extent > 0.0 && d < half + extent)
  {
    convex = apex_height * (1.0 - (d - half) / extent);
  }
  return phi_deg > 0.0 ? convex : apex_height - convex;
}

double StepBlockProfile::elevation(double x) const
{
  const bool inside = std::abs(x - center_x) <= 0.5 * width;
  if (convex)
  {
    return inside ? height : 0.0;
  }
  return inside ? 0.0 : height;
}

double MappingProfile::elevation(double x, double y) const
{
  if (x >= slope_begin)
  {
    return base + feature_height * (y - y_begin) / depth;
  }
  if (x >= ridge_begin && x <= ridge_end)
  {
    return base + feature_height;
  }
  if (x >= trough_begin && x <= trough_end)
  {
    return base - feature_height;
  }
  return base;
}

// ---------------------------------------------------------------------------
// Heightfield
// ---------------------------------------------------------------------------

Heightfield::Heightfield(Vec2 origin, double cell_size, std::size_t cols, std::size_t rows,
                         std::vector<double> values, TerrainShape shape)
  : origin_(origin),
    cell_size_(cell_size),
    cols_(cols),
    rows_(rows),
    values_(std::move(values)),
    shape_(std::move(shape))
{
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_))
  {
    throw std::invalid_argument("heightfield cell size must be positive");
  }
  if (cols_ < 2 || rows_ < 2)
  {
    throw std::invalid_argument("heightfield needs at least 2 x 2 nodes");
  }
  if (values_.size() != cols_ * rows_)
  {
    throw std::invalid_argument(fmt::format("heightfield expects {} values, got {}",
                                            cols_ * rows_, values_.size()));
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
  {
    throw std::invalid_argument("heightfield elevations must be finite");
  }
}

bool Heightfield::contains(double x, double y) const
{
  return x >= origin_.x && x <= x_max() && y >= origin_.y && y <= y_max();
}

std::optional<double> Heightfield::try_sample(double x, double y) const
{
  if (!contains(x, y))
  {
    return std::nullopt;
  }
  // Coordinates computed as origin + i * cell land a few ulps off the node;
  // snap those so node values come back unchanged.
  auto snap = [](double t) {
    const double n = std::round(t);
    return std::abs(t - n) < 1e-9 ? n : t;
  };
  const double u = snap((x - origin_.x) / cell_size_);
  const double v = snap((y - origin_.y) / cell_size_);
  const auto c0 = std::min(static_cast<std::size_t>(u), cols_ - 2);
  const auto r0 = std::min(static_cast<std::size_t>(v), rows_ - 2);
  const double fx = u - static_cast<double>(c0);
  const double fy = v - static_cast<double>(r0);

  const double z00 = node(c0, r0);
  const double z10 = node(c0 + 1, r0);
  const double z01 = node(c0, r0 + 1);
  const double z11 = node(c0 + 1, r0 + 1);

  // Exact at nodes: a zero weight never mixes in a neighbour.
  const double lower = fx == 0.0 ? z00 : (fx == 1.0 ? z10 : z00 + fx * (z10 - z00));
  const double upper = fx == 0.0 ? z01 : (fx == 1.0 ? z11 : z01 + fx * (z11 - z01));
  if (fy == 0.0)
  {
    return lower;
  }
  if (fy == 1.0)
  {
    return upper;
  }
  return lower + fy * (upper - lower);
}

double Heightfield::sample(double x, double y) const
{
  if (auto z = try_sample(x, y))
  {
    return *z;
  }
  throw SimulationError(fmt::format("query ({:.3f}, {:.3f}) mm outside terrain [{:.3f}, {:.3f}] x [{:.3f}, {:.3f}]",
                                    x, y, origin_.x, x_max(), origin_.y, y_max()));
}

double Heightfield::ground_truth(double x, double y) const
{
  return std::visit(Overloaded{[&](std::monostate) { return sample(x, y); },
                               [&](const WedgeProfile& p) { return p.elevation(x); },
                               [&](const StepBlockProfile& p) { return p.elevation(x); },
                               [&](const MappingProfile& p) { return p.elevation(x, y); }},
                    shape_);
}

double Heightfield::min_elevation() const
{
  return *std::min_element(values_.begin(), values_.end());
}

double Heightfield::max_elevation() const
{
  return *std::max_element(values_.begin(), values_.end());
}

Heightfield Heightfield::translated_x(double dx) const
{
  TerrainShape moved = std::visit(
    Overloaded{[](std::monostate) -> TerrainShape { return std::monostate{}; },
               [&](WedgeProfile p) -> TerrainShape { p.center_x += dx; return p; },
               [&](StepBlockProfile p) -> TerrainShape { p.center_x += dx; return p; },
               [&](MappingProfile p) -> TerrainShape {
                 p.ridge_begin += dx;
                 p.ridge_end += dx;
                 p.trough_begin += dx;
                 p.trough_end += dx;
                 p.slope_begin += dx;
                 return p;
               }},
    shape_);
  return Heightfield({origin_.x + dx, origin_.y}, cell_size_, cols_, rows_, values_, std::move(moved));
}

void write_heightfield(std::ostream& os, const Heightfield& hf)
{
  os << fmt::format("{} {} {} {} {}\n", hf.cols(), hf.rows(), hf.cell_size(), hf.origin().x,
                    hf.origin().y);
  for (std::size_t r = 0; r < hf.rows(); ++r)
  {
    std::string line;
    for (std::size_t c = 0; c < hf.cols(); ++c)
    {
      if (c > 0)
      {
        line += ' ';
      }
      // fmt's default float formatting is the shortest round-trip form.
      line += fmt::format("{}", hf.node(c, r));
    }
    line += '\n';
    os << line;
  }
}

Heightfield read_heightfield(std::istream& is)
{
  std::size_t cols = 0;
  std::size_t rows = 0;
  double cell = 0.0;
  Vec2 origin;
  if (!(is >> cols >> rows >> cell >> origin.x >> origin.y))
  {
    throw std::invalid_argument("heightfield header must be: cols rows cell_size_mm origin_x_mm origin_y_mm");
  }
  if (cols < 2 || rows < 2)
  {
    throw std::invalid_argument("heightfield needs at least 2 x 2 nodes");
  }
  std::vector<double> values;
  values.reserve(cols * rows);
  std::string token;
  for (std::size_t i = 0; i < cols * rows; ++i)
  {
    if (!(is >> token))
    {
      throw std::invalid_argument(fmt::format("heightfield truncated after {} of {} values", i, cols * rows));
    }
    std::size_t used = 0;
    double v = 0.0;
    try
    {
      v = std::stod(token, &used);
    }
    catch (const std::exception&)
    {
      used = 0;
    }
    if (used != token.size())
    {
      throw std::invalid_argument("heightfield value is not a number: " + token);
    }
    values.push_back(v);
  }
  if (is >> token)
  {
    throw std::invalid_argument("heightfield has trailing data");
  }
  return Heightfield(origin, cell, cols, rows, std::move(values));
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

void WedgeSpec::validate() const
{
  if (!(inclination_phi_deg >= -90.0 && inclination_phi_deg <= 90.0))
  {
    throw std::invalid_argument(fmt::format("wedge inclination {} deg outside [-90, 90]", inclination_phi_deg));
  }
  if (!(apex_height_mm > 0.0) || !(width_mm > 0.0) || !(depth_mm > 0.0) || crest_width_mm < 0.0)
  {
    throw std::invalid_argument("wedge dimensions must be positive");
  }
  if (crest_width_mm >= width_mm)
  {
    throw std::invalid_argument("wedge crest wider than its footprint");
  }
}

Heightfield make_wedge(const WedgeSpec& spec, double resolution_mm)
{
  spec.validate();
  if (!(resolution_mm > 0.0))
  {
    throw std::invalid_argument("terrain resolution must be positive");
  }
  WedgeProfile profile{spec.inclination_phi_deg, spec.apex_height_mm, spec.crest_width_mm,
                       0.5 * spec.width_mm};
  return Heightfield::from_function({0.0, 0.0}, resolution_mm, node_count(spec.width_mm, resolution_mm),
                                    node_count(spec.depth_mm, resolution_mm),
                                    [&](double x, double) { return profile.elevation(x); }, profile);
}

Heightfield make_recognition_block(BlockKind kind, double resolution_mm)
{
  if (!(resolution_mm > 0.0))
  {
    throw std::invalid_argument("terrain resolution must be positive");
  }
  constexpr double kWidth = 200.0;
  constexpr double kDepth = 70.0;
  StepBlockProfile profile{kind == BlockKind::convex, 20.0, 70.0, 0.5 * kWidth};
  return Heightfield::from_function({0.0, 0.0}, resolution_mm, node_count(kWidth, resolution_mm),
                                    node_count(kDepth, resolution_mm),
                                    [&](double x, double) { return profile.elevation(x); }, profile);
}

Heightfield make_mapping_terrain(double resolution_mm)
{
  if (!(resolution_mm > 0.0))
  {
    throw std::invalid_argument("terrain resolution must be positive");
  }
  MappingProfile profile;
  constexpr double kWidth = 200.0;
  return Heightfield::from_function({0.0, profile.y_begin}, resolution_mm, node_count(kWidth, resolution_mm),
                                    node_count(profile.depth, resolution_mm),
                                    [&](double x, double y) { return profile.elevation(x, y); }, profile);
}

// ---------------------------------------------------------------------------
// Asperities
// ---------------------------------------------------------------------------

double AsperityModel::beta_mean_deg(double phi_deg) const
{
  return std::min(90.0, beta0_deg + beta_slope * (90.0 - std::abs(phi_deg)));
}

double AsperityModel::beta_floor_deg() const
{
  return rad_to_deg(std::atan(mu_global)) + beta_floor_margin_deg;
}

void AsperityModel::validate() const
{
  if (!(mu_global > 0.0) || !std::isfinite(mu_global))
  {
    throw std::invalid_argument("global friction coefficient must be positive");
  }
  if (beta_slope < 0.0)
  {
    throw std::invalid_argument("beta slope must be non-negative (steeper terrain, smaller beta)");
  }
  if (beta_spread_deg < 0.0 || beta_floor_margin_deg <= 0.0)
  {
    throw std::invalid_argument("beta spread and floor margin must be non-negative / positive");
  }
  if (!(beta_floor_deg() < 90.0))
  {
    throw std::invalid_argument("beta floor must lie below 90 deg");
  }
  if (!(breakage_force_n > 0.0))
  {
    throw std::invalid_argument("breakage force must be positive");
  }
}

double sample_asperity(const AsperityModel& model, double phi_deg, Rng& rng)
{
  const double mean = model.beta_mean_deg(phi_deg);
  const double floor = model.beta_floor_deg();
  const double lowest = std::nextafter(floor, 90.0);
  if (model.beta_spread_deg == 0.0)
  {
    return std::clamp(mean, lowest, 90.0);
  }
  std::normal_distribution<double> dist(mean, model.beta_spread_deg);
  constexpr int kMaxAttempts = 1000;
  double beta = mean;
  for (int i = 0; i < kMaxAttempts; ++i)
  {
    beta = dist(rng);
    if (beta > floor && beta <= 90.0)
    {
      return beta;
    }
  }
  return std::clamp(beta, lowest, 90.0);
}

}  // namespace pinarray

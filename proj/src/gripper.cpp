#include "pinarray/gripper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace pinarray
{

namespace
{

constexpr double kContactTol = 1e-9;

void require_positive(double v, const char* name)
{
  if (!(v > 0.0) || !std::isfinite(v))
  {
    throw std::invalid_argument(fmt::format("{} must be positive (got {})", name, v));
  }
}

// Horizontal run from (x, y) along (dx, dy) over which the terrain keeps
// rising (sign = +1) or keeps falling (sign = -1).
double monotone_run(const Heightfield& t, double x, double y, double dx, double dy, double step,
                    double limit, double sign, double& end_z)
{
  double z = t.sample(x, y);
  double run = 0.0;
  while (run + step <= limit + 1e-12)
  {
    auto next = t.try_sample(x + (run + step) * dx, y + (run + step) * dy);
    if (!next || sign * (*next - z) <= kContactTol)
    {
      break;
    }
    z = *next;
    run += step;
  }
  end_z = z;
  return run;
}

// Each half draws from its own stream so that one half's outcome never shifts
// another half's draws (keeps lock monotone in the slide distance).
void lock_half(const GripperConfig& cfg, const Heightfield& terrain, const AsperityModel& asperity,
               Rng rng, const PinState& pin, Vec2 xy, double dir, double slide, PinHalf& half)
{
  half = PinHalf{};
  half.gap_mm = slide;
  if (!pin.in_contact)
  {
    return;
  }
  auto hit = probe_face(terrain, xy.x, xy.y, dir, 0.0, pin.tip_elevation_mm + cfg.spine_height_mm, slide,
                        cfg.gap_step_mm, cfg.face_probe_limit_mm);
  if (!hit)
  {
    return;
  }
  half.gap_mm = hit->distance_mm;
  half.delta_mm = std::max(0.0, slide - hit->distance_mm);
  half.face_extent_mm = hit->extent_mm;
  half.face_phi_deg = hit->phi_deg;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  half.engaged = half.delta_mm > 0.0 && unit(rng) < cfg.engage_probability(hit->extent_mm);
  if (half.engaged)
  {
    half.beta_deg = sample_asperity(asperity, hit->phi_deg, rng);
  }
  else
  {
    half.delta_mm = 0.0;
  }
}

}  // namespace

void GripperConfig::validate() const
{
  if (blocks < 1 || pins_per_block < 1)
  {
    throw std::invalid_argument("gripper needs at least one block of one pin");
  }
  require_positive(x_pitch_mm, "x_pitch_mm");
  require_positive(y_pitch_mm, "y_pitch_mm");
  require_positive(stroke_L_mm, "stroke_L_mm");
  require_positive(pin_travel_mm, "pin_travel_mm");
  require_positive(holder_slide_max_mm, "holder_slide_max_mm");
  require_positive(elastic_modulus_E_pa, "elastic_modulus_E_pa");
  require_positive(second_moment_I_m4, "second_moment_I_m4");
  require_positive(spine_lever_l_m, "spine_lever_l_m");
  require_positive(pin_width_mm, "pin_width_mm");
  require_positive(gap_step_mm, "gap_step_mm");
  require_positive(face_probe_limit_mm, "face_probe_limit_mm");
  if (h_offset_mm < 0.0 || spine_height_mm < 0.0)
  {
    throw std::invalid_argument("h_offset_mm and spine_height_mm must be non-negative");
  }
  if (!(engage_probability_min >= 0.0 && engage_probability_min <= 1.0))
  {
    throw std::invalid_argument("engage_probability_min must lie in [0, 1]");
  }
}

double GripperConfig::engage_probability(double face_extent_mm) const
{
  if (face_extent_mm >= pin_width_mm)
  {
    return 1.0;
  }
  const double e = std::max(0.0, face_extent_mm);
  return engage_probability_min + (1.0 - engage_probability_min) * e / pin_width_mm;
}

GripperState GripperState::make(const GripperConfig& cfg, Pose pose)
{
  cfg.validate();
  GripperState s;
  s.pose = pose;
  s.pins.reserve(static_cast<std::size_t>(cfg.pin_count()));
  for (int k = 1; k <= cfg.blocks; ++k)
  {
    for (int j = 1; j <= cfg.pins_per_block; ++j)
    {
      PinState p;
      p.j = j;
      p.k = k;
      p.tip_elevation_mm = pose.z_g;
      p.front.gap_mm = 0.0;
      p.back.gap_mm = 0.0;
      s.pins.push_back(p);
    }
  }
  return s;
}

const PinState& GripperState::pin(const GripperConfig& cfg, int j, int k) const
{
  if (j < 1 || j > cfg.pins_per_block || k < 1 || k > cfg.blocks)
  {
    throw std::out_of_range(fmt::format("pin ({}, {}) out of range", j, k));
  }
  return pins.at(static_cast<std::size_t>((k - 1) * cfg.pins_per_block + (j - 1)));
}

Vec2 pin_world_xy(const GripperConfig& cfg, const Pose& pose, int j, int k)
{
  if (j < 1 || j > cfg.pins_per_block || k < 1 || k > cfg.blocks)
  {
    throw std::out_of_range(fmt::format("pin ({}, {}) out of range", j, k));
  }
  return {pose.x_g + static_cast<double>(j) * cfg.x_pitch_mm, static_cast<double>(k) * cfg.y_pitch_mm};
}

GripperState adapt(const GripperConfig& cfg, GripperState state, const Heightfield& terrain)
{
  if (state.phase != Phase::approach)
  {
    throw SimulationError("adapt requires the approach phase");
  }
  for (auto& pin : state.pins)
  {
    const Vec2 xy = pin_world_xy(cfg, state.pose, pin.j, pin.k);
    auto z = terrain.try_sample(xy.x, xy.y);
    if (!z)
    {
      throw SimulationError(fmt::format("pin ({}, {}) at ({:.3f}, {:.3f}) mm is outside the terrain", pin.j,
                                        pin.k, xy.x, xy.y));
    }
    const double needed = *z - state.pose.z_g;
    if (needed > cfg.pin_travel_mm + kContactTol)
    {
      throw SimulationError(fmt::format("press too deep: pin ({}, {}) needs {:.3f} mm of {:.3f} mm travel",
                                        pin.j, pin.k, needed, cfg.pin_travel_mm));
    }
    pin.in_contact = needed >= -kContactTol;
    pin.retraction_mm = pin.in_contact ? std::clamp(needed, 0.0, cfg.pin_travel_mm) : 0.0;
    // Conforming pins sit exactly on the sampled surface.
    pin.tip_elevation_mm = pin.in_contact ? *z : state.pose.z_g;
    pin.front = PinHalf{};
    pin.back = PinHalf{};
    pin.locked = false;
  }
  state.phase = Phase::adapt;
  state.holder_slide_mm = 0.0;
  return state;
}

std::optional<FaceHit> probe_face(const Heightfield& terrain, double x, double y, double dx, double dy,
                                  double spine_elevation, double max_distance, double step,
                                  double probe_limit)
{
  for (int i = 1;; ++i)
  {
    const double s = static_cast<double>(i) * step;
    if (s >= max_distance - 1e-12)
    {
      return std::nullopt;
    }
    const double hx = x + s * dx;
    const double hy = y + s * dy;
    auto z = terrain.try_sample(hx, hy);
    if (!z)
    {
      return std::nullopt;
    }
    if (*z > spine_elevation + kContactTol)
    {
      double top = 0.0;
      double foot = 0.0;
      const double up = monotone_run(terrain, hx, hy, dx, dy, step, probe_limit, +1.0, top);
      const double down = monotone_run(terrain, hx, hy, -dx, -dy, step, probe_limit, -1.0, foot);
      FaceHit hit;
      hit.distance_mm = s;
      hit.extent_mm = up + down;
      hit.phi_deg = hit.extent_mm > 0.0 ? rad_to_deg(std::atan2(top - foot, hit.extent_mm)) : 90.0;
      return hit;
    }
  }
}

GripperState lock(const GripperConfig& cfg, GripperState state, const Heightfield& terrain,
                  const AsperityModel& asperity, Rng& rng)
{
  if (state.phase != Phase::adapt)
  {
    throw SimulationError("lock requires the adapt phase");
  }
  const double slide = cfg.holder_slide_max_mm;
  const std::uint64_t base = rng();
  std::uint64_t index = 0;
  for (auto& pin : state.pins)
  {
    const Vec2 xy = pin_world_xy(cfg, state.pose, pin.j, pin.k);
    lock_half(cfg, terrain, asperity, make_rng(base, index, 0), pin, xy, +1.0, slide, pin.front);
    lock_half(cfg, terrain, asperity, make_rng(base, index, 1), pin, xy, -1.0, slide, pin.back);
    pin.locked = true;
    ++index;
  }
  state.holder_slide_mm = slide;
  state.phase = Phase::lock;
  return state;
}

GripperState release(GripperState state)
{
  if (state.phase != Phase::lock)
  {
    return state;
  }
  for (auto& pin : state.pins)
  {
    pin.front = PinHalf{};
    pin.back = PinHalf{};
    pin.locked = false;
  }
  state.holder_slide_mm = 0.0;
  state.phase = Phase::approach;
  return state;
}

}  // namespace pinarray

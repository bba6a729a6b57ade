#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pinarray/common.hpp"
#include "pinarray/terrain.hpp"

namespace pinarray
{

/// Geometry and material parameters of the pin array. Lengths are mm unless the
/// name says otherwise; E, I and l are SI because the cantilever formula is
/// evaluated in SI.
struct GripperConfig
{
  int blocks{3};
  int pins_per_block{7};
  double x_pitch_mm{14.0};
  double y_pitch_mm{17.4};
  /// Linearized sensing window: heights h in [h_offset, h_offset + stroke_L].
  double stroke_L_mm{20.0};
  double h_offset_mm{16.0};
  /// Mechanical retraction available to each pin. Larger than the sensing
  /// window; readings beyond the window saturate.
  double pin_travel_mm{50.0};
  double holder_slide_max_mm{6.0};
  double elastic_modulus_E_pa{2.4e9};
  double second_moment_I_m4{3.6e-13};
  double spine_lever_l_m{0.02};
  double pin_width_mm{8.0};
  /// Height of the spine point above the pin tip; a face has to rise above it
  /// to be hooked.
  double spine_height_mm{1.2};
  double gap_step_mm{0.1};
  /// Engagement probability on a face of vanishing extent.
  double engage_probability_min{0.3};
  /// Longest face run followed when measuring a face's extent and inclination.
  double face_probe_limit_mm{40.0};

  int pin_count() const { return blocks * pins_per_block; }
  /// Throws std::invalid_argument on a non-physical parameter set.
  void validate() const;
  /// 1 on faces at least one pin wide, decaying linearly to
  /// engage_probability_min as the face extent goes to zero.
  double engage_probability(double face_extent_mm) const;
};

struct Pose
{
  /// Gripper frame x; pin j sits at x_g + j * x_pitch.
  double x_g{0.0};
  /// Elevation of the fully extended pin-tip plane.
  double z_g{0.0};
};

struct PinHalf
{
  /// Horizontal clearance from the spine to the face it would hook; equals
  /// the holder slide when nothing is in reach.
  double gap_mm{0.0};
  double delta_mm{0.0};
  bool engaged{false};
  double beta_deg{90.0};
  double face_phi_deg{0.0};
  double face_extent_mm{0.0};
};

struct PinState
{
  int j{1};
  int k{1};
  /// How far the pin has been pushed back into the housing.
  double retraction_mm{0.0};
  /// World elevation of the pin tip (z_g + retraction).
  double tip_elevation_mm{0.0};
  bool in_contact{false};
  /// Front half slides toward +x, back half toward -x.
  PinHalf front;
  PinHalf back;
  bool locked{false};

  /// Extension below the housing, travel - retraction.
  double tip_height(const GripperConfig& cfg) const { return cfg.pin_travel_mm - retraction_mm; }
  bool engaged() const { return front.engaged || back.engaged; }
};

enum class Phase
{
  approach,
  adapt,
  lock
};

struct GripperState
{
  Pose pose;
  std::vector<PinState> pins;
  Phase phase{Phase::approach};
  double holder_slide_mm{0.0};

  /// Pins ordered k = 1..blocks, then j = 1..pins_per_block.
  static GripperState make(const GripperConfig& cfg, Pose pose);
  const PinState& pin(const GripperConfig& cfg, int j, int k) const;
};

/// World (x, y) of pin (j, k): x = x_g + j * x_pitch, y = k * y_pitch.
Vec2 pin_world_xy(const GripperConfig& cfg, const Pose& pose, int j, int k);

/// Press: every pin whose terrain sample lies at or above the tip plane
/// retracts onto the surface; pins over lower ground stay fully extended.
/// Throws SimulationError if a pin leaves the terrain footprint, if the press
/// would exceed the pin travel, or if the phase is not approach.
GripperState adapt(const GripperConfig& cfg, GripperState state, const Heightfield& terrain);

/// Result of a horizontal probe from a spine toward a face.
struct FaceHit
{
  double distance_mm{0.0};
  double extent_mm{0.0};
  double phi_deg{0.0};
};

/// March from (x, y) along the unit direction (dx, dy) in `step` increments,
/// strictly below `max_distance`, and report the first point whose terrain
/// rises above `spine_elevation`. The face's horizontal extent and inclination
/// are measured along the same line over the monotonically rising run that
/// contains the hit, up to `probe_limit` in each direction. Leaving the
/// footprint ends the march without a hit.
std::optional<FaceHit> probe_face(const Heightfield& terrain, double x, double y, double dx, double dy,
                                  double spine_elevation, double max_distance, double step,
                                  double probe_limit);

/// Slide the holder: gaps, deflections, engagement gating and one beta draw
/// per engaged half. Every pin is locked afterwards.
GripperState lock(const GripperConfig& cfg, GripperState state, const Heightfield& terrain,
                  const AsperityModel& asperity, Rng& rng);

/// Back to approach with the holder retracted. A state that is not locked is
/// returned unchanged.
GripperState release(GripperState state);

}  // namespace pinarray

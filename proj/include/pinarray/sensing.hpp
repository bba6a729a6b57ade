#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pinarray/common.hpp"
#include "pinarray/gripper.hpp"
#include "pinarray/terrain.hpp"

namespace pinarray
{

// Heights are pin retractions in mm. Resistance falls as a pin is pushed in:
// h = H_offset reads R_max and h = H_offset + L reads R_min, so
// h = L * (r - R_max) / (R_min - R_max) + H_offset.

struct SensorCalibration
{
  double stroke_L_mm{20.0};
  double h_offset_mm{16.0};
  std::vector<double> r_max_ohm;
  std::vector<double> r_min_ohm;
  std::vector<double> noise_sigma_mm;

  std::size_t size() const { return r_max_ohm.size(); }
  void validate() const;

  /// Identical sensors; handy for noiseless runs.
  static SensorCalibration uniform(std::size_t pins, double r_max_ohm, double r_min_ohm, double sigma_mm,
                                   double stroke_L_mm = 20.0, double h_offset_mm = 16.0);
  /// Same resistances, all noise removed.
  SensorCalibration noiseless() const;
};

struct CalibrationOptions
{
  double nominal_r_max_ohm{10000.0};
  double nominal_r_min_ohm{1000.0};
  /// Each resistance endpoint is drawn uniformly within +- this fraction.
  double resistance_spread{0.05};
  /// sigma = lo + (hi - lo) * Beta(a, b), with b chosen so the mean is sigma_mean.
  double sigma_lo_mm{0.16};
  double sigma_hi_mm{6.69};
  double sigma_mean_mm{2.4};
  double sigma_beta_a{2.0};

  double sigma_beta_b() const;
};

SensorCalibration calibrate_bank(std::size_t pins, Rng& rng, const GripperConfig& cfg = {},
                                 const CalibrationOptions& options = {});

/// Noise-free linear map from height to resistance (no clamping).
double ideal_resistance(const SensorCalibration& calib, std::size_t pin, double height_mm);

/// Height plus Normal(0, sigma) height noise, mapped to resistance and clamped
/// to the physical range [R_min / 2, R_max + (R_max - R_min) / 2]. Draws
/// nothing when the pin's sigma is zero.
double forward_resistance(const SensorCalibration& calib, std::size_t pin, double height_mm, Rng& rng);

struct HeightEstimate
{
  double height_mm{0.0};
  bool in_range{false};
};

/// Inverse map clamped to [H_offset, H_offset + L]; in_range iff
/// R_min <= r <= R_max.
HeightEstimate invert_height(const SensorCalibration& calib, std::size_t pin, double resistance_ohm);

struct PinReading
{
  int j{0};
  int k{0};
  double resistance_ohm{0.0};
  double measured_height_mm{0.0};
  bool in_range{false};
};

/// Read every pin of an adapted state.
std::vector<PinReading> read_sensors(const SensorCalibration& calib, const GripperState& state, Rng& rng);

/// Descend in fixed steps until enough pins read in range (or the travel is
/// exhausted), then press a further seat depth so the sensors sit inside
/// their window.
struct PressPolicy
{
  double step_mm{0.5};
  double in_range_fraction{0.8};
  double seat_depth_mm{8.0};
  /// Extra height above the highest terrain under the pins where the
  /// descent starts when no explicit start height is given.
  double start_clearance_mm{1.0};
};

struct PressResult
{
  GripperState state;
  std::vector<PinReading> readings;
  int descent_steps{0};
};

/// Press at x_g starting from tip plane z_start. Pass NaN for z_start to
/// start start_clearance above the highest terrain under the pins.
PressResult press_and_read(const GripperConfig& cfg, const SensorCalibration& calib, const Heightfield& terrain,
                           double x_g, double z_start, const PressPolicy& policy, Rng& rng);

enum class ShapeClass
{
  convex,
  concave
};

std::string to_string(ShapeClass s);

struct PinStatistics
{
  int j{0};
  int k{0};
  double mean_h_mm{0.0};
  double std_h_mm{0.0};
  /// Fraction of presses in which this pin read inside its window.
  double in_range_fraction{0.0};
};

struct RecognitionResult
{
  std::vector<PinStatistics> pins;
  /// Mean over pins of the per-pin std.
  double pin_averaged_std_mm{0.0};
  /// Center column mean minus edge column mean.
  double center_minus_edge_mm{0.0};
  ShapeClass shape{ShapeClass::convex};
};

struct RecognitionOptions
{
  PressPolicy press;
  /// Gripper frame x; defaults to centering the middle column on the block.
  double x_g_mm{44.0};
};

/// Repeated press-and-read over one terrain. Heights are reported as world
/// elevations z_g + h so that presses at different depths are comparable.
RecognitionResult recognize_shape(const GripperConfig& cfg, const SensorCalibration& calib,
                                  const Heightfield& terrain, int presses, Rng& rng,
                                  const RecognitionOptions& options = {});

/// `pin_j,pin_k,R_max_ohm,R_min_ohm,sigma_mm`
void write_calibration_csv(std::ostream& os, const GripperConfig& cfg, const SensorCalibration& calib);
/// `pin_j,pin_k,mean_h_mm,std_h_mm`
void write_recognition_csv(std::ostream& os, const RecognitionResult& result);

}  // namespace pinarray

#include "pinarray/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace pinarray
{

void SensorCalibration::validate() const
{
  if (!(stroke_L_mm > 0.0) || h_offset_mm < 0.0)
  {
    throw std::invalid_argument("sensor window needs L > 0 and H_offset >= 0");
  }
  if (r_min_ohm.size() != size() || noise_sigma_mm.size() != size())
  {
    throw std::invalid_argument("calibration vectors differ in length");
  }
  for (std::size_t i = 0; i < size(); ++i)
  {
    if (!(r_max_ohm[i] > r_min_ohm[i]) || !(r_min_ohm[i] > 0.0))
    {
      throw std::invalid_argument(fmt::format("pin {} needs R_max > R_min > 0", i));
    }
    if (!(noise_sigma_mm[i] >= 0.0))
    {
      throw std::invalid_argument(fmt::format("pin {} has negative noise sigma", i));
    }
  }
}

SensorCalibration SensorCalibration::uniform(std::size_t pins, double r_max, double r_min, double sigma,
                                             double stroke_L, double h_offset)
{
  SensorCalibration c;
  c.stroke_L_mm = stroke_L;
  c.h_offset_mm = h_offset;
  c.r_max_ohm.assign(pins, r_max);
  c.r_min_ohm.assign(pins, r_min);
  c.noise_sigma_mm.assign(pins, sigma);
  c.validate();
  return c;
}

SensorCalibration SensorCalibration::noiseless() const
{
  SensorCalibration c = *this;
  std::fill(c.noise_sigma_mm.begin(), c.noise_sigma_mm.end(), 0.0);
  return c;
}

double CalibrationOptions::sigma_beta_b() const
{
  const double m = (sigma_mean_mm - sigma_lo_mm) / (sigma_hi_mm - sigma_lo_mm);
  return sigma_beta_a * (1.0 - m) / m;
}

SensorCalibration calibrate_bank(std::size_t pins, Rng& rng, const GripperConfig& cfg,
                                 const CalibrationOptions& o)
{
  if (!(o.sigma_lo_mm >= 0.0 && o.sigma_lo_mm < o.sigma_mean_mm && o.sigma_mean_mm < o.sigma_hi_mm))
  {
    throw std::invalid_argument("noise sigma bounds must satisfy lo < mean < hi");
  }
  if (!(o.resistance_spread >= 0.0 && o.resistance_spread < 1.0))
  {
    throw std::invalid_argument("resistance spread must lie in [0, 1)");
  }
  if (!(o.nominal_r_min_ohm * (1.0 + o.resistance_spread) < o.nominal_r_max_ohm * (1.0 - o.resistance_spread)))
  {
    throw std::invalid_argument("nominal resistance ranges overlap");
  }
  std::uniform_real_distribution<double> spread(-o.resistance_spread, o.resistance_spread);
  std::gamma_distribution<double> ga(o.sigma_beta_a, 1.0);
  std::gamma_distribution<double> gb(o.sigma_beta_b(), 1.0);

  SensorCalibration c;
  c.stroke_L_mm = cfg.stroke_L_mm;
  c.h_offset_mm = cfg.h_offset_mm;
  for (std::size_t i = 0; i < pins; ++i)
  {
    c.r_max_ohm.push_back(o.nominal_r_max_ohm * (1.0 + spread(rng)));
    c.r_min_ohm.push_back(o.nominal_r_min_ohm * (1.0 + spread(rng)));
    const double x = ga(rng);
    const double y = gb(rng);
    const double u = x / (x + y);
    c.noise_sigma_mm.push_back(o.sigma_lo_mm + (o.sigma_hi_mm - o.sigma_lo_mm) * u);
  }
  c.validate();
  return c;
}

double ideal_resistance(const SensorCalibration& c, std::size_t pin, double height_mm)
{
  const double rmax = c.r_max_ohm.at(pin);
  const double rmin = c.r_min_ohm.at(pin);
  return rmax + (rmin - rmax) * (height_mm - c.h_offset_mm) / c.stroke_L_mm;
}

double forward_resistance(const SensorCalibration& c, std::size_t pin, double height_mm, Rng& rng)
{
  double h = height_mm;
  const double sigma = c.noise_sigma_mm.at(pin);
  if (sigma > 0.0)
  {
    std::normal_distribution<double> noise(0.0, sigma);
    h += noise(rng);
  }
  const double rmax = c.r_max_ohm[pin];
  const double rmin = c.r_min_ohm[pin];
  return std::clamp(ideal_resistance(c, pin, h), 0.5 * rmin, rmax + 0.5 * (rmax - rmin));
}

HeightEstimate invert_height(const SensorCalibration& c, std::size_t pin, double r)
{
  const double rmax = c.r_max_ohm.at(pin);
  const double rmin = c.r_min_ohm.at(pin);
  HeightEstimate out;
  // Heights exactly on the window edge survive the forward map a few ulps out.
  const double slack = 1e-12 * (rmax - rmin);
  out.in_range = r >= rmin - slack && r <= rmax + slack;
  if (r == rmax)
  {
    out.height_mm = c.h_offset_mm;
  }
  else if (r == rmin)
  {
    out.height_mm = c.h_offset_mm + c.stroke_L_mm;
  }
  else
  {
    const double h = c.stroke_L_mm * (r - rmax) / (rmin - rmax) + c.h_offset_mm;
    out.height_mm = std::clamp(h, c.h_offset_mm, c.h_offset_mm + c.stroke_L_mm);
  }
  return out;
}

std::vector<PinReading> read_sensors(const SensorCalibration& calib, const GripperState& state, Rng& rng)
{
  if (calib.size() != state.pins.size())
  {
    throw std::invalid_argument(
      fmt::format("calibration has {} pins, gripper has {}", calib.size(), state.pins.size()));
  }
  std::vector<PinReading> out;
  out.reserve(state.pins.size());
  for (std::size_t i = 0; i < state.pins.size(); ++i)
  {
    const auto& pin = state.pins[i];
    PinReading r;
    r.j = pin.j;
    r.k = pin.k;
    r.resistance_ohm = forward_resistance(calib, i, pin.retraction_mm, rng);
    const HeightEstimate h = invert_height(calib, i, r.resistance_ohm);
    r.measured_height_mm = h.height_mm;
    r.in_range = h.in_range;
    out.push_back(r);
  }
  return out;
}

namespace
{

double in_range_share(const std::vector<PinReading>& readings)
{
  const auto n = std::count_if(readings.begin(), readings.end(), [](const PinReading& r) { return r.in_range; });
  return static_cast<double>(n) / static_cast<double>(readings.size());
}

}  // namespace

PressResult press_and_read(const GripperConfig& cfg, const SensorCalibration& calib, const Heightfield& terrain,
                           double x_g, double z_start, const PressPolicy& policy, Rng& rng)
{
  if (!(policy.step_mm > 0.0) || policy.seat_depth_mm < 0.0)
  {
    throw std::invalid_argument("press step must be positive and seat depth non-negative");
  }
  double highest = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= cfg.blocks; ++k)
  {
    for (int j = 1; j <= cfg.pins_per_block; ++j)
    {
      const Vec2 xy = pin_world_xy(cfg, {x_g, 0.0}, j, k);
      auto z = terrain.try_sample(xy.x, xy.y);
      if (!z)
      {
        throw SimulationError(
          fmt::format("pin ({}, {}) at ({:.3f}, {:.3f}) mm is outside the terrain", j, k, xy.x, xy.y));
      }
      highest = std::max(highest, *z);
    }
  }
  const double z_limit = highest - cfg.pin_travel_mm;
  double z = std::isnan(z_start) ? highest + policy.start_clearance_mm : z_start;

  auto attempt = [&](double zg) {
    PressResult r;
    r.state = adapt(cfg, GripperState::make(cfg, {x_g, zg}), terrain);
    r.readings = read_sensors(calib, r.state, rng);
    return r;
  };

  PressResult result;
  int steps = 0;
  while (true)
  {
    z = std::max(z - policy.step_mm, z_limit);
    ++steps;
    result = attempt(z);
    if (in_range_share(result.readings) >= policy.in_range_fraction || z <= z_limit)
    {
      break;
    }
  }
  if (policy.seat_depth_mm > 0.0 && z > z_limit)
  {
    z = std::max(z - policy.seat_depth_mm, z_limit);
    result = attempt(z);
  }
  bool touched = false;
  for (const auto& pin : result.state.pins)
  {
    touched = touched || pin.in_contact;
  }
  if (!touched)
  {
    throw SimulationError("press ended without any pin touching the terrain");
  }
  result.descent_steps = steps;
  return result;
}

std::string to_string(ShapeClass s)
{
  return s == ShapeClass::convex ? "convex" : "concave";
}

RecognitionResult recognize_shape(const GripperConfig& cfg, const SensorCalibration& calib,
                                  const Heightfield& terrain, int presses, Rng& rng,
                                  const RecognitionOptions& options)
{
  if (presses < 1)
  {
    throw std::invalid_argument(fmt::format("press count must be at least 1 (got {})", presses));
  }
  const std::size_t n = static_cast<std::size_t>(cfg.pin_count());
  if (calib.size() != n)
  {
    throw std::invalid_argument(fmt::format("calibration has {} pins, gripper has {}", calib.size(), n));
  }
  std::vector<std::vector<double>> samples(n);
  std::vector<int> in_range(n, 0);
  for (int p = 0; p < presses; ++p)
  {
    const PressResult press = press_and_read(cfg, calib, terrain, options.x_g_mm,
                                             std::numeric_limits<double>::quiet_NaN(), options.press, rng);
    for (std::size_t i = 0; i < n; ++i)
    {
      samples[i].push_back(press.state.pose.z_g + press.readings[i].measured_height_mm);
      in_range[i] += press.readings[i].in_range ? 1 : 0;
    }
  }

  RecognitionResult out;
  double center = 0.0;
  double edge = 0.0;
  int center_n = 0;
  int edge_n = 0;
  const int mid = (cfg.pins_per_block + 1) / 2;
  for (std::size_t i = 0; i < n; ++i)
  {
    const auto& s = samples[i];
    const double m = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double ss = 0.0;
    for (double v : s)
    {
      ss += (v - m) * (v - m);
    }
    PinStatistics st;
    st.j = static_cast<int>(i) % cfg.pins_per_block + 1;
    st.k = static_cast<int>(i) / cfg.pins_per_block + 1;
    st.mean_h_mm = m;
    st.std_h_mm = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1)) : 0.0;
    st.in_range_fraction = static_cast<double>(in_range[i]) / static_cast<double>(presses);
    out.pins.push_back(st);
    out.pin_averaged_std_mm += st.std_h_mm;
    if (st.j == mid)
    {
      center += m;
      ++center_n;
    }
    if (st.j == 1 || st.j == cfg.pins_per_block)
    {
      edge += m;
      ++edge_n;
    }
  }
  out.pin_averaged_std_mm /= static_cast<double>(n);
  out.center_minus_edge_mm = center / center_n - edge / edge_n;
  out.shape = out.center_minus_edge_mm >= 0.0 ? ShapeClass::convex : ShapeClass::concave;
  return out;
}

void write_calibration_csv(std::ostream& os, const GripperConfig& cfg, const SensorCalibration& calib)
{
  os << "pin_j,pin_k,R_max_ohm,R_min_ohm,sigma_mm\n";
  for (std::size_t i = 0; i < calib.size(); ++i)
  {
    const int j = static_cast<int>(i) % cfg.pins_per_block + 1;
    const int k = static_cast<int>(i) / cfg.pins_per_block + 1;
    os << fmt::format("{},{},{:.6f},{:.6f},{:.6f}\n", j, k, calib.r_max_ohm[i], calib.r_min_ohm[i],
                      calib.noise_sigma_mm[i]);
  }
}

void write_recognition_csv(std::ostream& os, const RecognitionResult& result)
{
  os << "pin_j,pin_k,mean_h_mm,std_h_mm\n";
  for (const auto& p : result.pins)
  {
    os << fmt::format("{},{},{:.6f},{:.6f}\n", p.j, p.k, p.mean_h_mm, p.std_h_mm);
  }
}

}  // namespace pinarray

#include "pinarray/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace pinarray
{

namespace
{

struct Entry
{
  const char* key;
  std::function<std::string(const SimulationConfig&)> get;
  std::function<void(SimulationConfig&, const std::string&)> set;
};

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v)
{
  std::size_t used = 0;
  double d = 0.0;
  try
  {
    d = std::stod(v, &used);
  }
  catch (const std::exception&)
  {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(d))
  {
    throw std::invalid_argument("expected a finite number, got '" + v + "'");
  }
  return d;
}

int to_int(const std::string& v)
{
  std::size_t used = 0;
  long long n = 0;
  try
  {
    n = std::stoll(v, &used);
  }
  catch (const std::exception&)
  {
    used = 0;
  }
  if (used == 0 || used != v.size() || n < -2147483647LL || n > 2147483647LL)
  {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  return static_cast<int>(n);
}

bool to_bool(const std::string& v)
{
  if (v == "true" || v == "1")
  {
    return true;
  }
  if (v == "false" || v == "0")
  {
    return false;
  }
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v)
{
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    out.push_back(to_double(trim(item)));
  }
  if (out.empty())
  {
    throw std::invalid_argument("expected a comma-separated list of numbers");
  }
  return out;
}

std::string num(double d)
{
  return fmt::format("{}", d);
}

#define PA_DOUBLE(KEY, FIELD)                                                                   \
  Entry                                                                                         \
  {                                                                                             \
    KEY, [](const SimulationConfig& c) { return num(c.FIELD); },                                \
      [](SimulationConfig& c, const std::string& v) { c.FIELD = to_double(v); }                 \
  }
#define PA_INT(KEY, FIELD)                                                                      \
  Entry                                                                                         \
  {                                                                                             \
    KEY, [](const SimulationConfig& c) { return std::to_string(c.FIELD); },                     \
      [](SimulationConfig& c, const std::string& v) { c.FIELD = to_int(v); }                    \
  }

const std::vector<Entry>& entries()
{
  static const std::vector<Entry> table = {
    PA_INT("gripper.blocks", gripper.blocks),
    PA_INT("gripper.pins_per_block", gripper.pins_per_block),
    PA_DOUBLE("gripper.x_pitch_mm", gripper.x_pitch_mm),
    PA_DOUBLE("gripper.y_pitch_mm", gripper.y_pitch_mm),
    PA_DOUBLE("gripper.stroke_L_mm", gripper.stroke_L_mm),
    PA_DOUBLE("gripper.h_offset_mm", gripper.h_offset_mm),
    PA_DOUBLE("gripper.pin_travel_mm", gripper.pin_travel_mm),
    PA_DOUBLE("gripper.holder_slide_max_mm", gripper.holder_slide_max_mm),
    PA_DOUBLE("gripper.elastic_modulus_E_pa", gripper.elastic_modulus_E_pa),
    PA_DOUBLE("gripper.second_moment_I_m4", gripper.second_moment_I_m4),
    PA_DOUBLE("gripper.spine_lever_l_m", gripper.spine_lever_l_m),
    PA_DOUBLE("gripper.pin_width_mm", gripper.pin_width_mm),
    PA_DOUBLE("gripper.spine_height_mm", gripper.spine_height_mm),
    PA_DOUBLE("gripper.gap_step_mm", gripper.gap_step_mm),
    PA_DOUBLE("gripper.engage_probability_min", gripper.engage_probability_min),
    PA_DOUBLE("gripper.face_probe_limit_mm", gripper.face_probe_limit_mm),
    PA_DOUBLE("asperity.mu_global", asperity.mu_global),
    PA_DOUBLE("asperity.beta0_deg", asperity.beta0_deg),
    PA_DOUBLE("asperity.beta_slope", asperity.beta_slope),
    PA_DOUBLE("asperity.beta_spread_deg", asperity.beta_spread_deg),
    PA_DOUBLE("asperity.beta_floor_margin_deg", asperity.beta_floor_margin_deg),
    PA_DOUBLE("asperity.breakage_force_n", asperity.breakage_force_n),
    PA_INT("baseline.fingers", baseline.fingers),
    PA_DOUBLE("baseline.radius_mm", baseline.radius_mm),
    PA_DOUBLE("baseline.finger_deflection_mm", baseline.finger_deflection_mm),
    PA_DOUBLE("baseline.center_y_mm", baseline.center_y_mm),
    PA_DOUBLE("pull.resolution_mm", pull.resolution_mm),
    PA_DOUBLE("pull.terrain_weight_n", pull.terrain_weight_n),
    PA_DOUBLE("pull.placement_jitter_mm", pull.placement_jitter_mm),
    PA_DOUBLE("pull.press_clearance_mm", pull.press_clearance_mm),
    Entry{"pull.phi_list_deg",
          [](const SimulationConfig& c) {
            std::string s;
            for (std::size_t i = 0; i < c.phi_list_deg.size(); ++i)
            {
              s += (i ? "," : "") + num(c.phi_list_deg[i]);
            }
            return s;
          },
          [](SimulationConfig& c, const std::string& v) { c.phi_list_deg = to_list(v); }},
    PA_DOUBLE("wedge.apex_height_mm", wedge.apex_height_mm),
    PA_DOUBLE("wedge.crest_width_mm", wedge.crest_width_mm),
    PA_DOUBLE("wedge.width_mm", wedge.width_mm),
    PA_DOUBLE("wedge.depth_mm", wedge.depth_mm),
    PA_DOUBLE("wedge.surface_grit", wedge.surface_grit),
    PA_DOUBLE("sensor.nominal_r_max_ohm", calibration.nominal_r_max_ohm),
    PA_DOUBLE("sensor.nominal_r_min_ohm", calibration.nominal_r_min_ohm),
    PA_DOUBLE("sensor.resistance_spread", calibration.resistance_spread),
    PA_DOUBLE("sensor.sigma_lo_mm", calibration.sigma_lo_mm),
    PA_DOUBLE("sensor.sigma_hi_mm", calibration.sigma_hi_mm),
    PA_DOUBLE("sensor.sigma_mean_mm", calibration.sigma_mean_mm),
    PA_DOUBLE("sensor.sigma_beta_a", calibration.sigma_beta_a),
    PA_DOUBLE("press.step_mm", scan.press.step_mm),
    PA_DOUBLE("press.in_range_fraction", scan.press.in_range_fraction),
    PA_DOUBLE("press.seat_depth_mm", scan.press.seat_depth_mm),
    PA_DOUBLE("press.start_clearance_mm", scan.press.start_clearance_mm),
    PA_DOUBLE("recognize.x_g_mm", recognition.x_g_mm),
    PA_DOUBLE("scan.delta_x_mm", scan.delta_x_mm),
    PA_INT("scan.steps", scan.steps),
    PA_DOUBLE("scan.start_x_g_mm", scan.start.x_g),
    PA_DOUBLE("scan.safe_z_mm", scan.start.z_g),
    Entry{"scan.include_clamped",
          [](const SimulationConfig& c) { return std::string(c.scan.include_clamped ? "true" : "false"); },
          [](SimulationConfig& c, const std::string& v) { c.scan.include_clamped = to_bool(v); }},
    PA_DOUBLE("grid.bin_x_mm", grid.bin_x_mm),
    PA_DOUBLE("grid.bin_y_mm", grid.bin_y_mm),
    PA_DOUBLE("grid.origin_x_mm", grid.origin_x_mm),
    PA_DOUBLE("grid.origin_y_mm", grid.origin_y_mm),
    Entry{"grid.truth",
          [](const SimulationConfig& c) {
            return std::string(c.grid.truth == TruthSampling::center ? "center" : "column_mean");
          },
          [](SimulationConfig& c, const std::string& v) {
            if (v == "center")
            {
              c.grid.truth = TruthSampling::center;
            }
            else if (v == "column_mean")
            {
              c.grid.truth = TruthSampling::column_mean;
            }
            else
            {
              throw std::invalid_argument("expected center or column_mean, got '" + v + "'");
            }
          }},
  };
  return table;
}

#undef PA_DOUBLE
#undef PA_INT

}  // namespace

void SimulationConfig::validate() const
{
  gripper.validate();
  asperity.validate();
  baseline.validate();
  WedgeSpec w = wedge;
  for (double phi : phi_list_deg)
  {
    w.inclination_phi_deg = phi;
    w.validate();
  }
  scan.validate();
  if (!(pull.resolution_mm > 0.0) || pull.terrain_weight_n < 0.0 || pull.placement_jitter_mm < 0.0)
  {
    throw std::invalid_argument("pull options need resolution > 0, weight >= 0 and jitter >= 0");
  }
  if (!(scan.press.step_mm > 0.0) || scan.press.seat_depth_mm < 0.0 ||
      !(scan.press.in_range_fraction > 0.0 && scan.press.in_range_fraction <= 1.0))
  {
    throw std::invalid_argument("press policy needs step > 0, seat >= 0 and fraction in (0, 1]");
  }
  if (!(grid.bin_x_mm > 0.0) || !(grid.bin_y_mm > 0.0))
  {
    throw std::invalid_argument("grid columns must have positive size");
  }
}

SimulationConfig parse_config(std::istream& is, const std::string& source_name)
{
  SimulationConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line))
  {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
    {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError(fmt::format("{}:{}: expected key = value", source_name, line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = entries();
    auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return key == e.key; });
    if (it == table.end())
    {
      throw ConfigError(fmt::format("{}:{}: unknown key '{}'", source_name, line_no, key));
    }
    if (!seen.insert(key).second)
    {
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", source_name, line_no, key));
    }
    try
    {
      it->set(cfg, value);
    }
    catch (const std::invalid_argument& e)
    {
      throw ConfigError(fmt::format("{}:{}: {}: {}", source_name, line_no, key, e.what()));
    }
  }
  // Recognition shares the press policy with the scan.
  cfg.recognition.press = cfg.scan.press;
  try
  {
    cfg.validate();
  }
  catch (const std::invalid_argument& e)
  {
    throw ConfigError(fmt::format("{}: {}", source_name, e.what()));
  }
  return cfg;
}

SimulationConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse_config(in, path);
}

std::string dump_config(const SimulationConfig& cfg)
{
  std::string out =
    "# Pin-array gripper simulator configuration.\n"
    "# Lengths in mm, forces in N, angles in deg; E in Pa, I in m^4, l in m.\n";
  for (const auto& e : entries())
  {
    out += fmt::format("{} = {}\n", e.key, e.get(cfg));
  }
  return out;
}

std::vector<std::string> config_keys()
{
  std::vector<std::string> keys;
  for (const auto& e : entries())
  {
    keys.emplace_back(e.key);
  }
  return keys;
}

}  // namespace pinarray

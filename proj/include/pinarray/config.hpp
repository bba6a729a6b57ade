#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pinarray/gripper.hpp"
#include "pinarray/mapping.hpp"
#include "pinarray/mechanics.hpp"
#include "pinarray/sensing.hpp"
#include "pinarray/terrain.hpp"

namespace pinarray
{

/// Everything a campaign reads from a config file.
struct SimulationConfig
{
  GripperConfig gripper;
  AsperityModel asperity;
  BaselineConfig baseline;
  PullTestOptions pull;
  WedgeSpec wedge;
  std::vector<double> phi_list_deg{-90.0, -60.0, -30.0, 0.0, 30.0, 60.0, 90.0};
  CalibrationOptions calibration;
  RecognitionOptions recognition;
  ScanPlan scan;
  GridSpec grid;

  void validate() const;
};

/// Flat `key = value` lines; `#` starts a comment. Keys absent from the file
/// keep their defaults. Unknown keys, duplicate keys and unparsable values
/// raise ConfigError naming the line.
SimulationConfig parse_config(std::istream& is, const std::string& source_name = "<config>");
SimulationConfig load_config(const std::string& path);

/// Every key in a fixed order with round-trip values; parse_config of the
/// output reproduces the input exactly.
std::string dump_config(const SimulationConfig& cfg);

/// Known keys, in dump order.
std::vector<std::string> config_keys();

}  // namespace pinarray

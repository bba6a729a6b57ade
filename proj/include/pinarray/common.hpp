#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace pinarray
{

/// Raised when a simulation precondition about the physical setup is broken
/// (gripper footprint off the terrain, phase called out of order, a press that
/// never touches anything). Distinct from std::invalid_argument, which is used
/// for malformed parameters.
class SimulationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable configuration.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

/// Independent stream for (campaign seed, stream tag, trial index). Trials seeded
/// this way give the same result regardless of execution order.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng{seq};
}

// Stream tags keep the draws of different subsystems apart under one seed.
namespace streams
{
inline constexpr std::uint64_t kPullProposed = 1;
inline constexpr std::uint64_t kPullBaseline = 2;
inline constexpr std::uint64_t kRecognizeConvex = 3;
inline constexpr std::uint64_t kRecognizeConcave = 4;
inline constexpr std::uint64_t kMapping = 5;
inline constexpr std::uint64_t kCalibration = 6;
}  // namespace streams

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace pinarray

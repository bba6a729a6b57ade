#include "pinarray/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <utility>

#include <fmt/format.h>

namespace pinarray
{

double pushing_force(double delta_mm, double E_pa, double I_m4, double l_m)
{
  if (!(E_pa > 0.0) || !(I_m4 > 0.0) || !(l_m > 0.0))
  {
    throw std::invalid_argument("E, I and l must be positive");
  }
  if (delta_mm < 0.0)
  {
    throw std::invalid_argument("deflection must be non-negative");
  }
  const double delta_m = delta_mm * 1e-3;
  return 3.0 * delta_m * E_pa * I_m4 / (l_m * l_m * l_m);
}

bool is_self_locking(double mu, double beta_deg)
{
  return deg_to_rad(beta_deg) <= std::atan(mu) + kSingularityEpsRad;
}

double local_friction(double mu, double beta_deg)
{
  if (beta_deg > 90.0)
  {
    throw std::invalid_argument(fmt::format("beta {} deg above 90", beta_deg));
  }
  if (is_self_locking(mu, beta_deg))
  {
    throw SingularBetaError(fmt::format("beta {} deg is within the self-locking band of mu = {}", beta_deg, mu));
  }
  if (beta_deg == 90.0)
  {
    return mu;
  }
  const double t = std::tan(deg_to_rad(beta_deg));
  return (1.0 + mu * t) / (t - mu);
}

ContactRecord make_contact_from(double pushing_force_n, double mu_prime, double mu, double breakage_force_n)
{
  ContactRecord c;
  c.pushing_force_n = pushing_force_n;
  c.mu_prime = mu_prime;
  const double sliding = mu * pushing_force_n;
  if (std::isinf(mu_prime))
  {
    c.self_locking = true;
    c.bound_n = pushing_force_n > 0.0 ? std::max(breakage_force_n, sliding) : 0.0;
    return c;
  }
  const double grip = mu_prime * pushing_force_n;
  c.broken = grip > breakage_force_n;
  c.bound_n = std::max(std::min(grip, breakage_force_n), sliding);
  return c;
}

ContactRecord make_contact(int j, int k, ContactSide side, double delta_mm, double beta_deg,
                           const GripperConfig& cfg, const AsperityModel& asperity)
{
  const double P = pushing_force(delta_mm, cfg.elastic_modulus_E_pa, cfg.second_moment_I_m4, cfg.spine_lever_l_m);
  const double mu_prime = is_self_locking(asperity.mu_global, beta_deg)
                            ? std::numeric_limits<double>::infinity()
                            : local_friction(asperity.mu_global, beta_deg);
  ContactRecord c = make_contact_from(P, mu_prime, asperity.mu_global, asperity.breakage_force_n);
  c.j = j;
  c.k = k;
  c.side = side;
  c.delta_mm = delta_mm;
  c.beta_deg = beta_deg;
  return c;
}

std::vector<ContactRecord> collect_contacts(const GripperConfig& cfg, const GripperState& state,
                                            const AsperityModel& asperity)
{
  std::vector<ContactRecord> out;
  for (const auto& pin : state.pins)
  {
    if (pin.front.engaged)
    {
      out.push_back(make_contact(pin.j, pin.k, ContactSide::front, pin.front.delta_mm, pin.front.beta_deg, cfg,
                                 asperity));
    }
    if (pin.back.engaged)
    {
      out.push_back(
        make_contact(pin.j, pin.k, ContactSide::back, pin.back.delta_mm, pin.back.beta_deg, cfg, asperity));
    }
  }
  return out;
}

double holding_condition(const std::vector<ContactRecord>& contacts)
{
  // Sorted summation keeps the result independent of contact order.
  std::vector<double> bounds;
  bounds.reserve(contacts.size());
  for (const auto& c : contacts)
  {
    bounds.push_back(c.bound_n);
  }
  std::sort(bounds.begin(), bounds.end());
  return std::accumulate(bounds.begin(), bounds.end(), 0.0);
}

ReleaseOutcome release_capacity(const std::vector<ContactRecord>& contacts)
{
  std::map<std::pair<int, int>, double> per_pin;
  for (const auto& c : contacts)
  {
    if (c.bound_n > 0.0)
    {
      per_pin[{c.j, c.k}] += c.bound_n;
    }
  }
  ReleaseOutcome out;
  if (per_pin.empty())
  {
    return out;
  }
  double weakest = std::numeric_limits<double>::infinity();
  for (const auto& [key, bound] : per_pin)
  {
    weakest = std::min(weakest, bound);
  }
  out.n = static_cast<int>(per_pin.size());
  out.capacity_n = static_cast<double>(out.n) * weakest;
  return out;
}

void summarize(PullTestResult& r)
{
  r.trials = static_cast<int>(r.holding_forces_n.size());
  if (r.trials == 0)
  {
    r.mean_F = 0.0;
    r.std_F = 0.0;
    return;
  }
  const double n = static_cast<double>(r.trials);
  r.mean_F = std::accumulate(r.holding_forces_n.begin(), r.holding_forces_n.end(), 0.0) / n;
  double ss = 0.0;
  for (double f : r.holding_forces_n)
  {
    ss += (f - r.mean_F) * (f - r.mean_F);
  }
  r.std_F = r.trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

namespace
{

void check_trials(int trials)
{
  if (trials < 1)
  {
    throw std::invalid_argument(fmt::format("trial count must be at least 1 (got {})", trials));
  }
}

void record_trial(PullTestResult& r, const std::vector<ContactRecord>& contacts, double weight_n)
{
  const ReleaseOutcome rel = release_capacity(contacts);
  const double F = rel.capacity_n >= weight_n && rel.n > 0 ? rel.capacity_n : 0.0;
  r.holding_forces_n.push_back(F);
  r.contact_counts.push_back(rel.n);
  r.per_pin_share_n.push_back(rel.n > 0 ? F / static_cast<double>(rel.n) : 0.0);
}

double jitter(Rng& rng, double amplitude)
{
  if (amplitude <= 0.0)
  {
    return 0.0;
  }
  std::uniform_real_distribution<double> d(-amplitude, amplitude);
  return d(rng);
}

}  // namespace

PullTestResult pull_test(const GripperConfig& cfg, const AsperityModel& asperity, const WedgeSpec& spec,
                         int trials, Rng& rng, const PullTestOptions& options)
{
  check_trials(trials);
  cfg.validate();
  asperity.validate();
  const Heightfield terrain = make_wedge(spec, options.resolution_mm);

  PullTestResult result;
  result.phi_deg = spec.inclination_phi_deg;
  const std::uint64_t base = rng();
  const double center_offset = 0.5 * static_cast<double>(cfg.pins_per_block + 1) * cfg.x_pitch_mm;

  for (int t = 0; t < trials; ++t)
  {
    Rng trial_rng = make_rng(base, static_cast<std::uint64_t>(t));
    Pose pose;
    pose.x_g = 0.5 * spec.width_mm + jitter(trial_rng, options.placement_jitter_mm) - center_offset;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int k = 1; k <= cfg.blocks; ++k)
    {
      for (int j = 1; j <= cfg.pins_per_block; ++j)
      {
        const Vec2 xy = pin_world_xy(cfg, pose, j, k);
        const double z = terrain.sample(xy.x, xy.y);
        lo = std::min(lo, z);
        hi = std::max(hi, z);
      }
    }
    pose.z_g = std::max(lo - options.press_clearance_mm, hi - cfg.pin_travel_mm);

    GripperState state = GripperState::make(cfg, pose);
    state = adapt(cfg, std::move(state), terrain);
    state = lock(cfg, std::move(state), terrain, asperity, trial_rng);
    record_trial(result, collect_contacts(cfg, state, asperity), options.terrain_weight_n);
  }
  summarize(result);
  return result;
}

void BaselineConfig::validate() const
{
  if (fingers < 1)
  {
    throw std::invalid_argument("baseline needs at least one finger");
  }
  if (!(radius_mm > 0.0) || !(finger_deflection_mm > 0.0))
  {
    throw std::invalid_argument("baseline radius and finger deflection must be positive");
  }
}

PullTestResult baseline_pull_test(const GripperConfig& cfg, const BaselineConfig& baseline,
                                  const AsperityModel& asperity, const WedgeSpec& spec, int trials, Rng& rng,
                                  const PullTestOptions& options)
{
  check_trials(trials);
  cfg.validate();
  baseline.validate();
  asperity.validate();
  const Heightfield terrain = make_wedge(spec, options.resolution_mm);

  PullTestResult result;
  result.phi_deg = spec.inclination_phi_deg;
  const std::uint64_t base = rng();
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int t = 0; t < trials; ++t)
  {
    Rng trial_rng = make_rng(base, static_cast<std::uint64_t>(t));
    const double cx = 0.5 * spec.width_mm + jitter(trial_rng, options.placement_jitter_mm);
    const double cy = baseline.center_y_mm;
    const std::uint64_t finger_base = trial_rng();

    std::vector<ContactRecord> contacts;
    for (int f = 0; f < baseline.fingers; ++f)
    {
      const double angle = 2.0 * kPi * static_cast<double>(f) / static_cast<double>(baseline.fingers);
      const double ux = std::cos(angle);
      const double uy = std::sin(angle);
      const double sx = cx + baseline.radius_mm * ux;
      const double sy = cy + baseline.radius_mm * uy;
      const double tip = terrain.sample(sx, sy);
      auto hit = probe_face(terrain, sx, sy, -ux, -uy, tip + cfg.spine_height_mm, baseline.radius_mm,
                            cfg.gap_step_mm, cfg.face_probe_limit_mm);
      if (!hit)
      {
        continue;
      }
      Rng finger_rng = make_rng(finger_base, static_cast<std::uint64_t>(f));
      if (!(unit(finger_rng) < cfg.engage_probability(hit->extent_mm)))
      {
        continue;
      }
      const double beta = sample_asperity(asperity, hit->phi_deg, finger_rng);
      contacts.push_back(
        make_contact(f + 1, 0, ContactSide::finger, baseline.finger_deflection_mm, beta, cfg, asperity));
    }
    record_trial(result, contacts, options.terrain_weight_n);
  }
  summarize(result);
  return result;
}

void write_trials_csv(std::ostream& os, const std::vector<PullTestResult>& results)
{
  os << "phi_deg,trial,F_N,n_contacts\n";
  for (const auto& r : results)
  {
    for (std::size_t t = 0; t < r.holding_forces_n.size(); ++t)
    {
      os << fmt::format("{:g},{},{:.6f},{}\n", r.phi_deg, t + 1, r.holding_forces_n[t], r.contact_counts[t]);
    }
  }
}

void write_summary_csv(std::ostream& os, const std::vector<PullTestResult>& results)
{
  os << "phi_deg,mean_F,std_F\n";
  for (const auto& r : results)
  {
    os << fmt::format("{:g},{:.6f},{:.6f}\n", r.phi_deg, r.mean_F, r.std_F);
  }
}

}  // namespace pinarray

#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "pinarray/common.hpp"
#include "pinarray/gripper.hpp"
#include "pinarray/terrain.hpp"

namespace pinarray
{

/// Margin above atan(mu) below which an asperity self-locks.
inline constexpr double kSingularityEpsRad = 1e-3;

/// Cantilever tip force 3 * delta * E * I / l^3 in N, delta in mm.
double pushing_force(double delta_mm, double E_pa, double I_m4, double l_m);

/// Thrown by local_friction inside the self-locking band.
class SingularBetaError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

bool is_self_locking(double mu, double beta_deg);

/// Effective friction (1 + mu tan b) / (tan b - mu). Returns mu exactly at
/// b = 90 deg. Throws SingularBetaError when b <= atan(mu) + eps.
double local_friction(double mu, double beta_deg);

enum class ContactSide
{
  front,
  back,
  finger
};

struct ContactRecord
{
  /// Pin (j, k) for the pin array; finger number in j and k = 0 for the
  /// baseline.
  int j{0};
  int k{0};
  ContactSide side{ContactSide::front};
  double delta_mm{0.0};
  double beta_deg{90.0};
  double pushing_force_n{0.0};
  /// +inf for self-locking contacts.
  double mu_prime{0.0};
  bool self_locking{false};
  /// mu' * P reached the breakage force; the contact holds up to the breakage
  /// force, then slides with plain friction.
  bool broken{false};
  /// Largest share of external load this contact sustains.
  double bound_n{0.0};
};

ContactRecord make_contact(int j, int k, ContactSide side, double delta_mm, double beta_deg,
                           const GripperConfig& cfg, const AsperityModel& asperity);

/// Explicit-value variant used by tests and by callers that already know P and mu'.
ContactRecord make_contact_from(double pushing_force_n, double mu_prime, double mu, double breakage_force_n);

/// Engaged halves of a locked state.
std::vector<ContactRecord> collect_contacts(const GripperConfig& cfg, const GripperState& state,
                                            const AsperityModel& asperity);

/// Aggregate no-release threshold: sum of contact bounds. Both halves of a
/// pin appear as separate contacts, which is where the factor of two lives.
double holding_condition(const std::vector<ContactRecord>& contacts);

struct ReleaseOutcome
{
  /// Pins (or fingers) with at least one engaged contact.
  int n{0};
  /// External load at which the weakest pin slips under equal sharing.
  double capacity_n{0.0};
};

/// Equal-share release: the external load F is split as F / n over the
/// contacting pins and the first pin to slip releases the whole grasp.
ReleaseOutcome release_capacity(const std::vector<ContactRecord>& contacts);

struct PullTestOptions
{
  double resolution_mm{1.0};
  /// Weight of the terrain block hanging on the gripper (500 g).
  double terrain_weight_n{4.9};
  /// Uniform lateral placement error per trial, +-.
  double placement_jitter_mm{7.0};
  /// How far below the lowest terrain under the pins the tip plane is pressed.
  double press_clearance_mm{1.0};
};

struct PullTestResult
{
  double phi_deg{0.0};
  int trials{0};
  std::vector<double> holding_forces_n;
  double mean_F{0.0};
  double std_F{0.0};
  std::vector<int> contact_counts;
  std::vector<double> per_pin_share_n;
};

/// Sample mean and (n - 1) standard deviation; std is 0 for one trial.
void summarize(PullTestResult& result);

/// Simulated Z pull on a wedge. Each trial draws its own stream from `rng`
/// via a single base draw, so trials are independent of evaluation order.
/// A trial whose release capacity is below the terrain weight drops the
/// terrain and records exactly 0 N; otherwise the capacity is recorded.
PullTestResult pull_test(const GripperConfig& cfg, const AsperityModel& asperity, const WedgeSpec& spec,
                         int trials, Rng& rng, const PullTestOptions& options = {});

/// Conventional radial spine gripper used for comparison. Fingers start on a
/// circle around the grasp center and close inward, so they only pinch.
struct BaselineConfig
{
  int fingers{8};
  double radius_mm{30.0};
  /// Compliant deflection of a finger that reaches a face.
  double finger_deflection_mm{6.0};
  /// Center row y of the grasp.
  double center_y_mm{34.8};

  void validate() const;
};

PullTestResult baseline_pull_test(const GripperConfig& cfg, const BaselineConfig& baseline,
                                  const AsperityModel& asperity, const WedgeSpec& spec, int trials, Rng& rng,
                                  const PullTestOptions& options = {});

/// `phi_deg,trial,F_N,n_contacts`, one row per trial.
void write_trials_csv(std::ostream& os, const std::vector<PullTestResult>& results);
/// `phi_deg,mean_F,std_F`, one row per result.
void write_summary_csv(std::ostream& os, const std::vector<PullTestResult>& results);

}  // namespace pinarray
